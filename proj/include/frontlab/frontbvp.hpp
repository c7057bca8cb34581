#pragma once

#include <array>
#include <functional>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "frontlab/fd.hpp"
#include "frontlab/models.hpp"

namespace frontlab {

/// Residual and sparse Jacobian of a square nonlinear system.
struct NewtonSystem {
    std::function<Vec(const Vec&)> residual;
    std::function<fd::SpMat(const Vec&)> jacobian;
};

struct NewtonOptions {
    double tol = 1e-10;
    int max_iter = 40;
    double min_damping = 1.0 / 1024;
};

struct NewtonReport {
    int iterations = 0;
    double residual = 0.0;
};

/// Damped Newton with backtracking on the residual max-norm.
NewtonReport newton_solve(const NewtonSystem& sys, Vec& x, const NewtonOptions& opt = {});

struct FrontProfile {
    std::vector<double> xi;
    Mat u;  ///< N × n
    double c = 0.0;
    Vec wake;
    cplx nu_tail;
    double residual = 0.0;
    int iterations = 0;
};

enum class RightBoundary {
    Dirichlet,  ///< u = 0 and even derivatives vanish at ξ = L
    Free,       ///< one-sided stencils; fixed speed only, closed by the phase condition
};

struct FrontOptions {
    int n = 0;                 ///< grid points; 0 picks spacing 0.05
    int accuracy = 4;
    RightBoundary right = RightBoundary::Dirichlet;
    /// Phase value M; NaN selects half the wake value of component 0.
    double phase_value = std::numeric_limits<double>::quiet_NaN();
    /// Phase window [L−, L+]; empty selects 0.35 L ± 1.
    std::optional<std::pair<double, double>> phase_window;
    int phase_component = 0;
    NewtonOptions newton;
};

struct FrontGuess {
    double c = 0.0;
    /// Profile on the solver grid; empty selects a logistic ramp to the wake state.
    Mat u;
    /// Decay rate of the default ramp.
    double steepness = 1.0;
};

/// Grid points used for a domain of length L.
int front_grid_points(double L, const FrontOptions& opt);

NewtonSystem front_system(const ModelSpec& model, double L, bool unknown_speed, double c_fixed,
                          const FrontOptions& opt);

FrontProfile solve_front_newton(const ModelSpec& model, double L, bool unknown_speed, const FrontGuess& guess,
                                const FrontOptions& opt = {});

struct FarfieldCoreDecomp {
    Mat w;  ///< core, N × n
    double a = 0.0;
    double b = 0.0;
    double eta = 0.0;
    double xi_c = 0.0;  ///< reference point of (a(ξ−ξ_c)+b) e^{−η(ξ−ξ_c)}
    std::pair<double, double> cut{0.0, 0.0};       ///< χ_+ rises from 0 to 1 here
    std::pair<double, double> wake_cut{0.0, 0.0};  ///< χ_− falls from 1 to 0 here
    double core_rate = 0.0;  ///< fitted decay rate of w; infinite when w is below noise
    Vec wake;
    Vec e0, e1;  ///< Jordan chain of the double root at ν = −η
};

struct PulledOptions {
    FrontOptions front;
    double cut_halfwidth = 5.0;
    /// Cut center as a fraction of L.
    double cut_center = 0.5;
    double phase_center = 0.35;
    double localization_fraction = 0.1;
    bool check_core_decay = true;
};

struct PulledFront {
    FrontProfile profile;
    FarfieldCoreDecomp decomp;
};

NewtonSystem pulled_system(const ModelSpec& model, double c, double eta, double L, const PulledOptions& opt);

/// Farfield-core Newton solve at fixed speed c with leading edge (a(ξ−ξ_c)+b)e^{−η(ξ−ξ_c)}.
PulledFront solve_pulled_front(const ModelSpec& model, double c, double eta, double L,
                               const std::optional<PulledFront>& guess = std::nullopt,
                               const PulledOptions& opt = {});

/// Reconstructs q = χ_−u_− + w + χ_+ψ on the grid.
Mat reconstruct(const FarfieldCoreDecomp& d, const std::vector<double>& xi);

/// Speed and decay rate of the marginal pinched double root for a model.
using LinearData = std::function<std::pair<double, double>(const ModelSpec&)>;
LinearData linear_data_from_spreading();

struct TransitionResult {
    double mu = 0.0;
    double c_lin = 0.0;
    double eta = 0.0;
    PulledFront front;
    std::vector<std::pair<double, double>> history;  ///< (μ, a)
};

TransitionResult detect_transition(const ModelFamily& family, std::pair<double, double> bracket, double L,
                                   const LinearData& lin = linear_data_from_spreading(),
                                   const PulledOptions& opt = {});

struct BranchPoint {
    double mu = 0.0;
    FrontProfile profile;
};

struct ContinuationReport {
    std::vector<BranchPoint> branch;
    bool terminated = false;  ///< Newton failed at the minimal step before the path end
};

/// Free-speed front continuation; arclength uses (u, c, μ) with a secant tangent.
ContinuationReport continue_front(const ModelFamily& family, const FrontProfile& seed, double L,
                                  const std::vector<double>& path, bool arclength,
                                  const FrontOptions& opt = {});

struct FrontSpectrum {
    double weight_eta = 0.0;
    std::vector<cplx> eigenvalues;  ///< decreasing real part
    cplx leading;
    CVec leading_vector;  ///< unweighted coordinates
    /// |cos| between the eigenvector closest to 0 and u*′, in weighted coordinates.
    double translation_correlation = 0.0;
    cplx nearest_zero;
    double sigma_min = 0.0;  ///< smallest singular value of the weighted operator
};

/// Rightmost eigenvalues of e^{ηs}(P(∂)+c∂+f′(u*))e^{−ηs} with a smooth ramp s′ from 0 to 1 over
/// [ramp_start, ramp_start+10]; second-order symbols only.
FrontSpectrum front_spectrum(const ModelSpec& model, const FrontProfile& profile, double eta, int n_eigs,
                             double ramp_start = 0.0);

enum class TailClass { Steep, Generic };

struct DecayFit {
    cplx nu;
    TailClass cls = TailClass::Generic;
    int points = 0;
};

DecayFit front_decay_rate(const ModelSpec& model, const FrontProfile& profile);

/// C^4 ramp rising from 0 at t ≤ 0 to 1 at t ≥ 1; returns derivatives 0..4 with respect to t.
std::array<double, 5> smooth_ramp(double t);

}  // namespace frontlab
