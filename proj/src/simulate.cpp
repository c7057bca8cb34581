#include "frontlab/simulate.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "frontlab/error.hpp"
#include "frontlab/kernels.hpp"

namespace frontlab {

const char* to_string(RunStatus s) {
    return s == RunStatus::Completed ? "completed" : "front_reached_boundary";
}

double front_position(const Vec& amp, double h, double delta) {
    const int n = static_cast<int>(amp.size());
    int i = n - 1;
    while (i >= 0 && !(amp[i] > delta)) --i;
    if (i < 0) return 0.0;
    if (i == n - 1) return h * (n - 1);
    // Cubic through i−1..i+2, crossing located by bisection on [x_i, x_{i+1}].
    int lo = std::max(0, std::min(i - 1, n - 4));
    double xs[4], ys[4];
    for (int k = 0; k < 4; ++k) {
        xs[k] = lo + k;
        ys[k] = amp[lo + k] - delta;
    }
    auto p = [&](double x) {
        double s = 0.0;
        for (int a = 0; a < 4; ++a) {
            double w = ys[a];
            for (int b = 0; b < 4; ++b)
                if (b != a) w *= (x - xs[b]) / (xs[a] - xs[b]);
            s += w;
        }
        return s;
    };
    double a = i, b = i + 1;
    for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        if (p(m) > 0)
            a = m;
        else
            b = m;
    }
    return h * 0.5 * (a + b);
}

namespace {

Vec amplitude(const Eigen::Map<const Mat>& u, int component, double h, double envelope) {
    const int n = static_cast<int>(u.cols());
    Vec amp(n);
    for (int i = 0; i < n; ++i) amp[i] = component < 0 ? u.col(i).norm() : std::abs(u(component, i));
    if (envelope <= 0) return amp;
    int w = std::max(1, static_cast<int>(std::lround(0.5 * envelope / h)));
    Vec env(n);
    for (int i = 0; i < n; ++i) {
        int lo = std::max(0, i - w), hi = std::min(n - 1, i + w);
        env[i] = amp.segment(lo, hi - lo + 1).maxCoeff();
    }
    return env;
}

Mat initial_state(const ModelSpec& m, const SimConfig& cfg, const fd::Grid& g) {
    const int N = m.dim();
    Mat u = Mat::Zero(N, g.n);
    const auto& ic = cfg.ic;
    Vec level = Vec::Zero(N);
    if (!ic.value.empty()) {
        if (static_cast<int>(ic.value.size()) != N)
            throw Error(ErrorKind::InvalidArgument, "initial value has wrong number of components");
        for (int c = 0; c < N; ++c) level[c] = ic.value[c];
    } else if (!m.wake_state.empty() && ic.kind == InitialKind::Step) {
        for (int c = 0; c < N; ++c) level[c] = m.wake_state[c];
    } else {
        level[0] = ic.amplitude;
    }
    if (ic.kind == InitialKind::NegativeStep && ic.value.empty()) level = -level.cwiseAbs();
    for (int i = 0; i < g.n; ++i) {
        double x = g.x(i);
        switch (ic.kind) {
            case InitialKind::Step:
            case InitialKind::NegativeStep:
                if (x < ic.width) u.col(i) = level;
                break;
            case InitialKind::Gaussian:
                if (x < 5 * ic.width) u.col(i) = level * std::exp(-(x / ic.width) * (x / ic.width));
                break;
            case InitialKind::Zero:
                break;
        }
    }
    return u;
}

class Integrator {
public:
    Integrator(const ModelSpec& m, const SimConfig& cfg)
        : m_(m), cfg_(cfg), N_(m.dim()) {
        if (cfg.n_grid < 128) throw Error(ErrorKind::InvalidArgument, "n_grid must be at least 128");
        if (!(cfg.dt > 0) || !(cfg.t_end >= 0)) throw Error(ErrorKind::InvalidArgument, "need dt > 0, t_end >= 0");
        bool per = cfg.bc == BoundaryKind::Periodic;
        g_ = fd::make_grid(cfg.L, cfg.n_grid, per ? fd::Side::Periodic : fd::Side::Even,
                           per ? fd::Side::Periodic : fd::Side::Odd);
        std::vector<Mat> coeffs = m.symbol.coeffs();
        if (cfg.comoving_speed) {
            if (coeffs.size() < 2) coeffs.resize(2, Mat::Zero(N_, N_));
            coeffs[1] += *cfg.comoving_speed * Mat::Identity(N_, N_);
        }
        A_ = fd::assemble(g_, coeffs);
        if (m.has_g()) D2_ = fd::kron_nodes(fd::derivative(g_, 2), N_);
        if (!per) {
            // Dirichlet node at x = L is held at zero.
            A_ = A_.transpose();
            for (int c = 0; c < N_; ++c) A_.col((g_.n - 1) * N_ + c) *= 0.0;
            A_ = A_.transpose();
            A_.prune(0.0);
        }
        fd::SpMat I(A_.rows(), A_.cols());
        I.setIdentity();
        euler_.compute(I - cfg.dt * A_);
        sbdf2_.compute(1.5 * I - cfg.dt * A_);
        if (euler_.info() != Eigen::Success || sbdf2_.info() != Eigen::Success)
            throw Error(ErrorKind::SingularJacobian, "implicit operator factorization failed");
    }

    const fd::Grid& grid() const { return g_; }

    Vec reaction(const Vec& u) const {
        Vec out(u.size());
        Eigen::Map<const Mat> U(u.data(), N_, g_.n);
        Eigen::Map<Mat> O(out.data(), N_, g_.n);
        Mat tmp(N_, g_.n);
        if (cfg_.parallel)
            kernels::reaction_omp(m_.f, U, tmp);
        else
            kernels::reaction_serial(m_.f, U, tmp);
        O = tmp;
        if (m_.has_g()) {
            Mat gv(N_, g_.n);
            kernels::reaction_serial(m_.g, U, gv);
            out += D2_ * Eigen::Map<const Vec>(gv.data(), gv.size());
        }
        if (cfg_.bc != BoundaryKind::Periodic) out.tail(N_).setZero();
        return out;
    }

    Vec step_euler(const Vec& u, const Vec& fu) const { return euler_.solve(u + cfg_.dt * fu); }

    Vec step_sbdf2(const Vec& u, const Vec& up, const Vec& fu, const Vec& fp) const {
        return sbdf2_.solve(2.0 * u - 0.5 * up + cfg_.dt * (2.0 * fu - fp));
    }

private:
    const ModelSpec& m_;
    const SimConfig& cfg_;
    int N_;
    fd::Grid g_;
    fd::SpMat A_, D2_;
    Eigen::SparseLU<fd::SpMat> euler_, sbdf2_;
};

/// Shifts the state by k nodes toward x = 0 (k > 0) or away from it (k < 0).
void shift_nodes(Vec& u, int N, int k) {
    const int n = static_cast<int>(u.size()) / N;
    Vec out(u.size());
    Eigen::Map<const Mat> U(u.data(), N, n);
    Eigen::Map<Mat> O(out.data(), N, n);
    for (int i = 0; i < n; ++i) {
        int src = i + k;
        if (src >= n)
            O.col(i).setZero();
        else if (src < 0)
            O.col(i) = U.col(0);
        else
            O.col(i) = U.col(src);
    }
    u = out;
}

SimResult integrate(const ModelSpec& m, const SimConfig& cfg) {
    Integrator in(m, cfg);
    const fd::Grid& g = in.grid();
    const int N = m.dim();
    Mat u0 = initial_state(m, cfg, g);
    Vec u = Eigen::Map<const Vec>(u0.data(), u0.size());
    if (cfg.bc != BoundaryKind::Periodic) u.tail(N).setZero();

    double delta = cfg.threshold;
    if (delta <= 0) {
        double wake = 0.0;
        if (!m.wake_state.empty()) {
            for (double v : m.wake_state) wake += v * v;
            wake = std::sqrt(wake);
        }
        if (cfg.component >= 0 && !m.wake_state.empty()) wake = std::abs(m.wake_state[cfg.component]);
        if (wake == 0.0) wake = u.cwiseAbs().maxCoeff();
        delta = 0.1 * (wake > 0 ? wake : 1.0);
    }
    SimResult res;
    res.h = g.h;
    res.track = {delta, cfg.component, {}};
    res.variants = {{0.5 * delta, cfg.component, {}}, {2.0 * delta, cfg.component, {}}};

    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    const long every = std::max(1L, std::lround(cfg.sample_interval / cfg.dt));
    std::vector<double> snaps = cfg.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    size_t next_snap = 0;

    auto record = [&](double t, const Vec& state) -> bool {
        Eigen::Map<const Mat> U(state.data(), N, g.n);
        Vec amp = amplitude(U, cfg.component, g.h, cfg.envelope_width);
        double x = front_position(amp, g.h, delta);
        res.track.samples.push_back({t, x + res.shift_total});
        for (auto& v : res.variants)
            v.samples.push_back({t, front_position(amp, g.h, v.threshold) + res.shift_total});
        return x > cfg.stop_fraction * g.length() && cfg.bc != BoundaryKind::Periodic && !cfg.shift_reinsert;
    };
    auto snapshot = [&](double t, const Vec& state) {
        while (next_snap < snaps.size() && snaps[next_snap] <= t + 0.5 * cfg.dt) {
            res.snapshots.push_back({t, Eigen::Map<const Mat>(state.data(), N, g.n)});
            ++next_snap;
        }
    };
    auto recenter = [&](Vec& a, Vec& b) {
        if (!cfg.shift_reinsert) return;
        double x = res.track.samples.back().x - res.shift_total;
        int k = static_cast<int>(std::lround((x - 0.5 * g.length()) / g.h));
        if (std::abs(k) < 1) return;
        shift_nodes(a, N, k);
        shift_nodes(b, N, k);
        if (cfg.bc != BoundaryKind::Periodic) {
            a.tail(N).setZero();
            b.tail(N).setZero();
        }
        res.shift_total += k * g.h;
    };

    snapshot(0.0, u);
    record(0.0, u);
    Vec up = u, fp = in.reaction(u);
    double t = 0.0;
    for (long s = 1; s <= nsteps; ++s) {
        Vec fu = in.reaction(u);
        Vec un = s == 1 ? in.step_euler(u, fu) : in.step_sbdf2(u, up, fu, fp);
        up = std::move(u);
        fp = std::move(fu);
        u = std::move(un);
        t = s * cfg.dt;
        res.steps = static_cast<int>(s);
        double mx = u.cwiseAbs().maxCoeff();
        if (!std::isfinite(mx) || mx > cfg.blowup_guard)
            throw Error(ErrorKind::Blowup, "solution exceeded guard at t=" + std::to_string(t));
        snapshot(t, u);
        if (s % every == 0 || s == nsteps) {
            bool hit = record(t, u);
            if (hit) {
                res.status = RunStatus::FrontReachedBoundary;
                break;
            }
            if (cfg.shift_reinsert) {
                recenter(u, up);
                fp = in.reaction(up);
            }
        }
    }
    res.t_final = t;
    res.state = Eigen::Map<const Mat>(u.data(), N, g.n);
    return res;
}

}  // namespace

SimResult run_invasion(const ModelSpec& model, const SimConfig& cfg) { return integrate(model, cfg); }

SimResult run_linear(const ModelSpec& model, const SimConfig& cfg) {
    ModelSpec lin = linearized(model);
    lin.wake_state = model.wake_state;
    return integrate(lin, cfg);
}

std::vector<TrackSample> raw_speeds(const FrontTrack& track) {
    const auto& s = track.samples;
    std::vector<TrackSample> out;
    for (size_t i = 1; i + 1 < s.size(); ++i)
        out.push_back({s[i].t, (s[i + 1].x - s[i - 1].x) / (s[i + 1].t - s[i - 1].t)});
    return out;
}

SpeedEstimate estimate_speed(const FrontTrack& track, std::optional<std::pair<double, double>> window) {
    const auto& s = track.samples;
    if (s.size() < 3) throw Error(ErrorKind::InsufficientSamples, "track has fewer than 3 samples");
    double t1 = s.back().t;
    double t0 = 0.4 * t1;
    if (window) std::tie(t0, t1) = *window;
    if (!(t0 >= 0.2 * t1) || !(t1 > t0))
        throw Error(ErrorKind::InvalidArgument, "fit window must satisfy t1 > t0 >= 0.2 t1");
    SpeedEstimate est;
    est.t0 = t0;
    est.t1 = t1;
    est.c_raw = raw_speeds(track);
    std::vector<TrackSample> cw, xw;
    for (const auto& c : est.c_raw)
        if (c.t >= t0 && c.t <= t1 && c.t > 0) cw.push_back(c);
    for (const auto& x : s)
        if (x.t >= t0 && x.t <= t1 && x.t > 0) xw.push_back(x);
    if (cw.size() < 20) throw Error(ErrorKind::InsufficientSamples, std::to_string(cw.size()) + " samples in window");

    Mat A(cw.size(), 2);
    Vec b(cw.size());
    for (size_t i = 0; i < cw.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / cw[i].t;
        b[i] = cw[i].x;
    }
    Vec coef = A.colPivHouseholderQr().solve(b);
    est.c_ext = coef[0];
    est.a1 = coef[1];
    est.resid_speed = (A * coef - b).norm() / std::sqrt(static_cast<double>(cw.size()));

    Mat B(xw.size(), 2);
    Vec y(xw.size());
    for (size_t i = 0; i < xw.size(); ++i) {
        B(i, 0) = -std::log(xw[i].t);
        B(i, 1) = 1.0;
        y[i] = xw[i].x - est.c_ext * xw[i].t;
    }
    Vec k = B.colPivHouseholderQr().solve(y);
    est.kappa_log = k[0];
    est.offset = k[1];
    est.resid_log = (B * k - y).norm() / std::sqrt(static_cast<double>(xw.size()));
    if (!std::isfinite(est.c_ext)) throw Error(ErrorKind::InsufficientSamples, "speed fit is not finite");
    return est;
}

ComovingResult run_comoving(const ModelSpec& model, double c0, SimConfig cfg) {
    cfg.comoving_speed = c0;
    cfg.shift_reinsert = true;
    ComovingResult out;
    out.sim = integrate(model, cfg);
    out.position = out.sim.track.samples;
    out.drift = 0.0;
    size_t start = out.position.size() / 2;
    if (out.position.size() - start >= 2) {
        Mat A(out.position.size() - start, 2);
        Vec b(A.rows());
        for (size_t i = start; i < out.position.size(); ++i) {
            A(i - start, 0) = 1.0;
            A(i - start, 1) = out.position[i].t;
            b[i - start] = out.position[i].x;
        }
        out.drift = A.colPivHouseholderQr().solve(b)[1];
    }
    out.profile = out.sim.state;
    return out;
}

}  // namespace frontlab
