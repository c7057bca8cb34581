#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "frontlab/doubleroot.hpp"

namespace frontlab {

struct SpreadingOptions {
    DoubleRootOptions roots;
    PinchOptions pinch;
    bool include_multiple = false;  ///< also accept DoubleDouble roots as growth modes
    double tol_marginal = 1e-8;
    int scan_points = 17;
};

struct SpreadingResult {
    double c_lin = 0.0;
    double omega_lin = 0.0;
    cplx nu_lin;
    double eta_lin = 0.0;
    double k_lin = 0.0;
    cplx d_eff;
    bool d_eff_well_posed = false;
    DoubleRoot source_root;
    bool multi_interval = false;
    bool bracket_verified = false;
    std::pair<double, double> final_bracket{0.0, 0.0};
    bool reduced = false;  ///< repeated factors were divided out before the search
};

/// Pinched double root of maximal Re λ; NonePinched lists every root in the message.
DoubleRoot rightmost_pinched(const ComovingDispersion& dr, const SpreadingOptions& opt = {});

SpreadingResult linear_spreading_speed(const MatrixPolynomial& base,
                                       std::optional<std::pair<double, double>> bracket = std::nullopt,
                                       const SpreadingOptions& opt = {});

struct GroupVelocitySeed {
    double c0 = 0.0;
    double k_star = 0.0;
    DoubleRoot root;
};

GroupVelocitySeed group_velocity_seed(const MatrixPolynomial& base);

struct MarginalCandidate {
    double c = 0.0;
    double omega = 0.0;
    cplx nu;
};

std::vector<MarginalCandidate> scalar_marginal_system(const MatrixPolynomial& base);

struct WavenumberPrediction {
    double k_lin = 0.0;
    double k_node = 0.0;
};

WavenumberPrediction wavenumber_predictions(const SpreadingResult& sr);

double weighted_max(const ComovingDispersion& dr, double eta, std::span<const double> k_grid);

}  // namespace frontlab
