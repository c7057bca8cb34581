#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "frontlab/polymat.hpp"

namespace frontlab {

enum class RootClass { Simple, DoubleDouble, Degenerate };
enum class PinchState { Pinched, NotPinched, Undetermined, Unchecked };

const char* to_string(RootClass c);
const char* to_string(PinchState p);

struct PinchVerdict {
    PinchState state = PinchState::Unchecked;
    std::string reason;
};

struct DoubleRoot {
    cplx lambda;
    cplx nu;
    double res_d = 0.0;    ///< |d_c| relative to the magnitude of its terms
    double res_dnu = 0.0;  ///< |∂ν d_c| relative to the magnitude of its terms
    RootClass classification = RootClass::Simple;
    PinchVerdict pinched;
    int multiplicity = 1;  ///< number of discriminant roots that refined to this point
};

struct DoubleRootOptions {
    double tol_root = 1e-10;
    double tol_class = 1e-6;
    double tol_dedup = 1e-7;
    double discard_re = 1e6;
    int max_newton = 100;
};

struct PinchOptions {
    double tau_max = -1.0;  ///< ≤ 0 selects 1e3·(1+|λ_*|)
    int n_steps = 400;
    double min_step = 1e-12;
    double tilt = 0.0;  ///< ray direction angle; the fallback retries ±0.05
};

struct ContinuationOptions {
    double collision_guard = 1e-2;
    double min_step = 1e-10;
    DoubleRootOptions roots;
    PinchOptions pinch;
};

struct EffectiveDiffusivity {
    cplx d_eff;
    bool well_posed = false;
};

/// Relative residuals (res_d, res_dnu) of a candidate double root.
std::pair<double, double> double_root_residuals(const ComovingDispersion& dr, cplx lam, cplx nu);

std::vector<DoubleRoot> find_double_roots(const ComovingDispersion& dr, const DoubleRootOptions& opt = {});

DoubleRoot newton_double_root(const ComovingDispersion& dr, cplx lam0, cplx nu0, const DoubleRootOptions& opt = {});

PinchVerdict check_pinching(const ComovingDispersion& dr, const DoubleRoot& root, const PinchOptions& opt = {});

RootClass classify_double_root(const ComovingDispersion& dr, const DoubleRoot& root,
                               const DoubleRootOptions& opt = {});

EffectiveDiffusivity effective_diffusivity(const ComovingDispersion& dr, const DoubleRoot& root,
                                           const DoubleRootOptions& opt = {});

using DispersionFamily = std::function<ComovingDispersion(double)>;

std::vector<DoubleRoot> continue_double_root(const DispersionFamily& family, const DoubleRoot& root,
                                             std::span<const double> path, const ContinuationOptions& opt = {});

}  // namespace frontlab
