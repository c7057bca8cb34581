#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "frontlab/models.hpp"
#include "frontlab/spreading.hpp"

namespace frontlab {

/// Periodic solution u(x,t) = U(kx − ωt), U 2π-periodic in ζ.
struct WaveTrain {
    double k = 0.0;
    double omega = 0.0;
    Mat profile;  ///< N × n_per
    double residual = 0.0;
    double group_velocity = 0.0;  ///< dω/dk
};

struct WaveTrainOptions {
    double tol = 1e-10;
    int max_iter = 40;
    /// Profiles with max amplitude below this are rejected as the trivial state.
    double min_amplitude = 1e-3;
};

/// Uniform collocation points ζ_i = 2πi/n.
std::vector<double> periodic_grid(int n_per);

/// Spectral derivative of order j on the 2π-periodic grid (dense n × n).
Mat spectral_derivative(int n_per, int j);

/// Newton on (profile, ω); the phase condition is taken against the guess profile.
WaveTrain solve_wave_train(const ModelSpec& model, double k, double omega0, const Mat& profile0,
                           const WaveTrainOptions& opt = {});

/// Residual and dense Jacobian in x = (profile column-major, ω).
struct DenseSystem {
    std::function<Vec(const Vec&)> residual;
    std::function<Mat(const Vec&)> jacobian;
};

/// The system solved by solve_wave_train, with the phase condition taken against `reference`.
DenseSystem wave_train_system(const ModelSpec& model, double k, const Mat& reference);

/// Small-amplitude seed from the most unstable Fourier mode at wavenumber k.
WaveTrain seed_wave_train(const ModelSpec& model, double k, int n_per = 64, const WaveTrainOptions& opt = {});

/// Wavenumbers with Re λ(ik) > 0 for the linearization at 0, as [k_lo, k_hi] of the band containing k_peak.
struct UnstableBand {
    double k_lo = 0.0;
    double k_hi = 0.0;
    double k_peak = 0.0;
};
UnstableBand unstable_band(const ModelSpec& model, double k_max = 10.0);

struct DispersionCurve {
    std::vector<WaveTrain> samples;  ///< increasing k
    std::optional<double> fold_low;  ///< continuation stopped below at this k
    std::optional<double> fold_high;
};

struct DispersionOptions {
    int n_samples = 61;
    /// Throw FoldDetected instead of returning a curve truncated at the fold.
    bool throw_on_fold = false;
    WaveTrainOptions newton;
};

DispersionCurve nonlinear_dispersion(const ModelSpec& model, std::pair<double, double> k_range,
                                     const WaveTrain& seed, const DispersionOptions& opt = {});

struct WavenumberSolution {
    double k = 0.0;
    double omega_nl = 0.0;
    double branch = 1.0;  ///< sign s in p·s·ω_lin = q(ω_nl − c k)
    double comoving_group_velocity = 0.0;
    bool admissible = false;
    double resonance_residual = 0.0;
    WaveTrain train;
};

/// All k in the curve's range with p·(±ω_lin) = q·(ω_nl(k) − c_lin k), refined on the true ω_nl.
std::vector<WavenumberSolution> select_wavenumber(const ModelSpec& model, const SpreadingResult& sr,
                                                  const DispersionCurve& curve, int p, int q,
                                                  const WaveTrainOptions& opt = {});

}  // namespace frontlab
