#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "frontlab/fd.hpp"
#include "frontlab/models.hpp"

namespace frontlab {

enum class BoundaryKind { InvasionBox, Periodic };

enum class InitialKind { Step, NegativeStep, Gaussian, Zero };

struct InitialCondition {
    InitialKind kind = InitialKind::Step;
    double width = 10.0;
    /// Step level; defaults to the model's wake state, else `amplitude` in component 0.
    std::vector<double> value;
    double amplitude = 1.0;
};

struct SimConfig {
    double L = 300.0;
    int n_grid = 3001;
    double dt = 0.05;
    double t_end = 100.0;
    BoundaryKind bc = BoundaryKind::InvasionBox;
    InitialCondition ic;
    std::optional<double> comoving_speed;
    bool shift_reinsert = false;
    double sample_interval = 0.5;
    /// Level-set threshold δ; 0 selects 0.1 times the wake amplitude.
    double threshold = 0.0;
    /// Tracked component, or −1 for the Euclidean norm over components.
    int component = -1;
    /// Running-max window for oscillatory wakes; 0 disables.
    double envelope_width = 0.0;
    std::vector<double> snapshot_times;
    double blowup_guard = 1e150;
    double stop_fraction = 0.9;
    bool parallel = false;
};

struct TrackSample {
    double t = 0.0;
    double x = 0.0;
};

struct FrontTrack {
    double threshold = 0.0;
    int component = -1;
    std::vector<TrackSample> samples;
};

struct Snapshot {
    double t = 0.0;
    Mat u;  ///< N × n
};

enum class RunStatus { Completed, FrontReachedBoundary };
const char* to_string(RunStatus s);

struct SimResult {
    Mat state;  ///< N × n
    double t_final = 0.0;
    double h = 0.0;
    FrontTrack track;
    /// Tracks at half and twice the primary threshold.
    std::vector<FrontTrack> variants;
    std::vector<Snapshot> snapshots;
    RunStatus status = RunStatus::Completed;
    /// Accumulated re-centering shift (comoving runs).
    double shift_total = 0.0;
    int steps = 0;
};

struct SpeedEstimate {
    std::vector<TrackSample> c_raw;  ///< (t, x'(t))
    double c_ext = 0.0;
    double a1 = 0.0;
    double kappa_log = 0.0;
    double offset = 0.0;
    double resid_speed = 0.0;
    double resid_log = 0.0;
    double t0 = 0.0;
    double t1 = 0.0;
};

SimResult run_invasion(const ModelSpec& model, const SimConfig& cfg);

/// Same integrator applied to the linearization at u = 0.
SimResult run_linear(const ModelSpec& model, const SimConfig& cfg);

/// Window defaults to the last 60% of the track.
SpeedEstimate estimate_speed(const FrontTrack& track, std::optional<std::pair<double, double>> window = std::nullopt);

struct ComovingResult {
    SimResult sim;
    double drift = 0.0;
    std::vector<TrackSample> position;  ///< front position in the frame, shifts included
    Mat profile;
};

ComovingResult run_comoving(const ModelSpec& model, double c0, SimConfig cfg);

/// sup{x : a(x) > δ} with cubic interpolation of the crossing; 0 when nothing exceeds δ.
double front_position(const Vec& amp, double h, double delta);

/// Centered-difference speeds of a track.
std::vector<TrackSample> raw_speeds(const FrontTrack& track);

}  // namespace frontlab
