#include "frontlab/wavetrain.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "frontlab/error.hpp"

namespace frontlab {

namespace {

using RowJac = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Block (i,l) = D(i,l) P, node-major.
Mat kron_block(const Mat& D, const Mat& P) {
    const int n = static_cast<int>(D.rows()), N = static_cast<int>(P.rows());
    Mat out = Mat::Zero(n * N, n * N);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l)
            if (D(i, l) != 0.0) out.block(i * N, l * N, N, N) = D(i, l) * P;
    return out;
}

struct Operators {
    int N = 1, n = 0;
    std::vector<Mat> terms;  ///< P_j ⊗ D_j
    Mat D1N;
};

Operators operators(const ModelSpec& m, int n) {
    Operators ops;
    ops.N = m.dim();
    ops.n = n;
    const auto& P = m.symbol.coeffs();
    for (int j = 0; j < static_cast<int>(P.size()); ++j) ops.terms.push_back(kron_block(spectral_derivative(n, j), P[j]));
    ops.D1N = kron_block(spectral_derivative(n, 1), Mat::Identity(ops.N, ops.N));
    return ops;
}

Mat linear_part(const Operators& ops, double k) {
    Mat L = Mat::Zero(ops.n * ops.N, ops.n * ops.N);
    double kj = 1.0;
    for (const Mat& T : ops.terms) {
        L += kj * T;
        kj *= k;
    }
    return L;
}

/// ∂/∂k of Σ k^j P_j D_j applied to U.
Vec dk_part(const Operators& ops, double k, const Vec& U) {
    Vec out = Vec::Zero(U.size());
    for (int j = 1; j < static_cast<int>(ops.terms.size()); ++j) out += j * std::pow(k, j - 1) * (ops.terms[j] * U);
    return out;
}

Vec nonlinear(const ModelSpec& m, const Vec& U) {
    const int N = m.dim(), n = static_cast<int>(U.size()) / N;
    Vec out(U.size());
    for (int i = 0; i < n; ++i) m.f(U.data() + i * N, out.data() + i * N);
    return out;
}

Mat nonlinear_jac(const ModelSpec& m, const Vec& U) {
    const int N = m.dim(), n = static_cast<int>(U.size()) / N;
    Mat out = Mat::Zero(U.size(), U.size());
    RowJac j(N, N);
    for (int i = 0; i < n; ++i) {
        m.df(U.data() + i * N, j.data());
        out.block(i * N, i * N, N, N) = j;
    }
    return out;
}

struct TrainSystem {
    const ModelSpec& m;
    const Operators& ops;
    Mat Lk;
    Vec ref, dref;

    Vec residual(const Vec& x) const {
        const int nN = ops.n * ops.N;
        Vec U = x.head(nN);
        Vec R(nN + 1);
        R.head(nN) = Lk * U + x[nN] * (ops.D1N * U) + nonlinear(m, U);
        R[nN] = (U - ref).dot(dref);
        return R;
    }
    Mat jacobian(const Vec& x) const {
        const int nN = ops.n * ops.N;
        Vec U = x.head(nN);
        Mat J = Mat::Zero(nN + 1, nN + 1);
        J.topLeftCorner(nN, nN) = Lk + x[nN] * ops.D1N + nonlinear_jac(m, U);
        J.col(nN).head(nN) = ops.D1N * U;
        J.row(nN).head(nN) = dref.transpose();
        return J;
    }
};

double amplitude(const Vec& U) { return U.cwiseAbs().maxCoeff(); }

double group_velocity(const ModelSpec& m, const Operators& ops, double k, const Vec& x) {
    const int nN = ops.n * ops.N;
    Vec U = x.head(nN);
    TrainSystem sys{m, ops, linear_part(ops, k), U, ops.D1N * U};
    Vec rhs = Vec::Zero(nN + 1);
    rhs.head(nN) = -dk_part(ops, k, U);
    Vec d = sys.jacobian(x).partialPivLu().solve(rhs);
    return d[nN];
}

WaveTrain solve_with(const ModelSpec& m, const Operators& ops, double k, double omega0, const Mat& profile0,
                     const WaveTrainOptions& opt) {
    const int N = ops.N, n = ops.n, nN = N * n;
    if (profile0.rows() != N || profile0.cols() != n)
        throw Error(ErrorKind::InvalidArgument, "guess profile must be N x n_per");
    Vec x(nN + 1);
    x.head(nN) = Eigen::Map<const Vec>(profile0.data(), nN);
    x[nN] = omega0;
    TrainSystem sys{m, ops, linear_part(ops, k), x.head(nN), ops.D1N * x.head(nN)};
    Vec r = sys.residual(x);
    double nr = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(nr)) throw Error(ErrorKind::InvalidArgument, "guess residual is not finite");
    int it = 0;
    for (; it < opt.max_iter && nr >= opt.tol; ++it) {
        Mat J = sys.jacobian(x);
        Eigen::PartialPivLU<Mat> lu(J);
        Vec dx = lu.solve(-r);
        if (!dx.allFinite() || lu.rcond() < 1e-15) {
            Eigen::BDCSVD<Mat> svd(J);
            throw Error(ErrorKind::SingularJacobian,
                        "smallest singular value " + std::to_string(svd.singularValues().minCoeff()));
        }
        double lam = 1.0;
        bool ok = false;
        while (lam >= 1.0 / 1024) {
            Vec xt = x + lam * dx;
            Vec rt = sys.residual(xt);
            double nt = rt.cwiseAbs().maxCoeff();
            if (std::isfinite(nt) && nt < nr) {
                x = xt;
                r = rt;
                nr = nt;
                ok = true;
                break;
            }
            lam *= 0.5;
        }
        if (!ok) break;
    }
    if (nr >= opt.tol)
        throw Error(ErrorKind::NoConvergence,
                    "wave train at k = " + std::to_string(k) + ": residual " + std::to_string(nr));
    if (amplitude(x.head(nN)) < opt.min_amplitude)
        throw Error(ErrorKind::NoConvergence, "wave train at k = " + std::to_string(k) + " collapsed to the trivial state");
    WaveTrain w;
    w.k = k;
    w.omega = x[nN];
    w.profile = Eigen::Map<const Mat>(x.data(), N, n);
    w.residual = nr;
    w.group_velocity = group_velocity(m, ops, k, x);
    return w;
}

Vec pack(const WaveTrain& w) {
    Vec x(w.profile.size() + 1);
    x.head(w.profile.size()) = Eigen::Map<const Vec>(w.profile.data(), w.profile.size());
    x[w.profile.size()] = w.omega;
    return x;
}

}  // namespace

std::vector<double> periodic_grid(int n_per) {
    std::vector<double> z(n_per);
    for (int i = 0; i < n_per; ++i) z[i] = 2 * std::numbers::pi * i / n_per;
    return z;
}

Mat spectral_derivative(int n, int j) {
    if (n < 4 || n % 2) throw Error(ErrorKind::InvalidArgument, "n_per must be even and at least 4");
    if (j == 0) return Mat::Identity(n, n);
    // Fourier multipliers (im)^j; the Nyquist mode is dropped for odd j.
    std::vector<cplx> s(n);
    for (int q = 0; q < n; ++q) {
        int m = q <= n / 2 ? q : q - n;
        if (q == n / 2 && j % 2) {
            s[q] = 0.0;
            continue;
        }
        s[q] = std::pow(cplx(0.0, m), j);
    }
    // Circulant: D(i,l) = d(i−l).
    std::vector<double> d(n);
    for (int r = 0; r < n; ++r) {
        cplx acc = 0.0;
        for (int q = 0; q < n; ++q) acc += s[q] * std::polar(1.0, 2 * std::numbers::pi * q * r / n);
        d[r] = acc.real() / n;
    }
    Mat D(n, n);
    for (int i = 0; i < n; ++i)
        for (int l = 0; l < n; ++l) D(i, l) = d[((i - l) % n + n) % n];
    return D;
}

WaveTrain solve_wave_train(const ModelSpec& model, double k, double omega0, const Mat& profile0,
                           const WaveTrainOptions& opt) {
    if (profile0.cols() < 32) throw Error(ErrorKind::InvalidArgument, "n_per must be at least 32");
    Operators ops = operators(model, static_cast<int>(profile0.cols()));
    return solve_with(model, ops, k, omega0, profile0, opt);
}

DenseSystem wave_train_system(const ModelSpec& model, double k, const Mat& reference) {
    auto m = std::make_shared<ModelSpec>(model);
    auto ops = std::make_shared<Operators>(operators(model, static_cast<int>(reference.cols())));
    if (reference.rows() != ops->N) throw Error(ErrorKind::InvalidArgument, "reference profile must be N x n_per");
    Vec U = Eigen::Map<const Vec>(reference.data(), reference.size());
    auto sys = std::make_shared<TrainSystem>(TrainSystem{*m, *ops, linear_part(*ops, k), U, ops->D1N * U});
    return {[m, ops, sys](const Vec& x) { return sys->residual(x); },
            [m, ops, sys](const Vec& x) { return sys->jacobian(x); }};
}

WaveTrain seed_wave_train(const ModelSpec& model, double k, int n_per, const WaveTrainOptions& opt) {
    const int N = model.dim();
    CMat A = model.symbol.symbol(cplx(0.0, k)) + model.symbol.linearization().cast<cplx>();
    Eigen::ComplexEigenSolver<CMat> es(A);
    // Largest growth; within a conjugate pair the member giving ω ≥ 0.
    int best = 0;
    for (int i = 1; i < N; ++i) {
        cplx a = es.eigenvalues()[i], b = es.eigenvalues()[best];
        if (a.real() > b.real() + 1e-12 || (std::abs(a.real() - b.real()) <= 1e-12 && a.imag() < b.imag())) best = i;
    }
    cplx lam = es.eigenvalues()[best];
    if (lam.real() <= 0)
        throw Error(ErrorKind::StableState, "no unstable mode at k = " + std::to_string(k));
    CVec v = es.eigenvectors().col(best);
    v /= v.norm();
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    v *= std::abs(v[imax]) / v[imax];
    Operators ops = operators(model, n_per);
    std::vector<double> z = periodic_grid(n_per);
    Mat mode(N, n_per);
    for (int i = 0; i < n_per; ++i) mode.col(i) = (v * std::polar(1.0, z[i])).real();
    double base = std::sqrt(lam.real());
    Error last(ErrorKind::NoConvergence, "no seed amplitude converged");
    for (double s : {1.0, 1.2, 0.7, 1.6, 0.4, 2.5, 0.2}) {
        try {
            return solve_with(model, ops, k, -lam.imag(), s * base * mode, opt);
        } catch (const Error& e) {
            last = e;
        }
    }
    throw last;
}

UnstableBand unstable_band(const ModelSpec& model, double k_max) {
    const MatrixPolynomial& P = model.symbol;
    auto growth = [&](double k) {
        CMat A = P.symbol(cplx(0.0, k)) + P.linearization().cast<cplx>();
        Eigen::ComplexEigenSolver<CMat> es(A, false);
        double g = -1e300;
        for (int i = 0; i < A.rows(); ++i) g = std::max(g, es.eigenvalues()[i].real());
        return g;
    };
    const int n = 4001;
    UnstableBand b;
    double gbest = -1e300;
    for (int i = 0; i < n; ++i) {
        double k = k_max * i / (n - 1), g = growth(k);
        if (g > gbest) {
            gbest = g;
            b.k_peak = k;
        }
    }
    if (gbest <= 0) throw Error(ErrorKind::StableState, "no unstable wavenumbers in [0, " + std::to_string(k_max) + "]");
    auto edge = [&](double inside, double outside) {
        if (growth(outside) > 0) return outside;
        for (int it = 0; it < 200 && std::abs(outside - inside) > 1e-13; ++it) {
            double mid = 0.5 * (inside + outside);
            (growth(mid) > 0 ? inside : outside) = mid;
        }
        return inside;
    };
    double step = k_max / (n - 1);
    double lo = b.k_peak, hi = b.k_peak;
    while (lo > 0 && growth(std::max(lo - step, 0.0)) > 0) lo = std::max(lo - step, 0.0);
    while (hi < k_max && growth(std::min(hi + step, k_max)) > 0) hi = std::min(hi + step, k_max);
    b.k_lo = lo > 0 ? edge(lo, lo - step) : 0.0;
    b.k_hi = hi < k_max ? edge(hi, hi + step) : k_max;
    return b;
}

DispersionCurve nonlinear_dispersion(const ModelSpec& model, std::pair<double, double> k_range, const WaveTrain& seed,
                                     const DispersionOptions& opt) {
    DispersionCurve curve;
    auto [k_lo, k_hi] = k_range;
    if (!(k_hi > k_lo) || opt.n_samples < 1) return curve;
    if (seed.k < k_lo - 1e-12 || seed.k > k_hi + 1e-12)
        throw Error(ErrorKind::InvalidArgument, "seed wavenumber lies outside the range");
    Operators ops = operators(model, static_cast<int>(seed.profile.cols()));
    std::vector<double> grid = opt.n_samples == 1 ? std::vector<double>{k_lo} : linspace(k_lo, k_hi, opt.n_samples);
    const double min_step = 1e-6 * (k_hi - k_lo);

    // March from the seed towards each end, landing on every grid point.
    auto march = [&](int dir) {
        std::vector<WaveTrain> out;
        WaveTrain prev = seed, cur = seed;
        bool have_prev = false;
        std::vector<double> targets;
        for (double k : grid)
            if ((dir > 0 && k >= seed.k - 1e-14) || (dir < 0 && k < seed.k - 1e-14)) targets.push_back(k);
        if (dir < 0) std::reverse(targets.begin(), targets.end());
        double step = grid.size() > 1 ? (grid[1] - grid[0]) : (k_hi - k_lo);
        for (double target : targets) {
            while (std::abs(target - cur.k) > 1e-14) {
                double k = cur.k + dir * std::min(step, std::abs(target - cur.k));
                Vec guess = pack(cur);
                if (have_prev && prev.k != cur.k) guess += (k - cur.k) / (cur.k - prev.k) * (pack(cur) - pack(prev));
                Mat prof = Eigen::Map<const Mat>(guess.data(), ops.N, ops.n);
                try {
                    WaveTrain w = solve_with(model, ops, k, guess[guess.size() - 1], prof, opt.newton);
                    prev = cur;
                    cur = w;
                    have_prev = true;
                    step = std::min(step * 1.5, grid.size() > 1 ? grid[1] - grid[0] : k_hi - k_lo);
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::SingularJacobian) throw;
                    step *= 0.5;
                    if (step < min_step) {
                        if (opt.throw_on_fold)
                            throw Error(ErrorKind::FoldDetected, "continuation failed at k = " + std::to_string(cur.k));
                        (dir > 0 ? curve.fold_high : curve.fold_low) = cur.k;
                        return out;
                    }
                }
            }
            out.push_back(cur);
        }
        return out;
    };
    std::vector<WaveTrain> up = march(1), down = march(-1);
    std::reverse(down.begin(), down.end());
    curve.samples = std::move(down);
    curve.samples.insert(curve.samples.end(), up.begin(), up.end());
    return curve;
}

std::vector<WavenumberSolution> select_wavenumber(const ModelSpec& model, const SpreadingResult& sr,
                                                  const DispersionCurve& curve, int p, int q,
                                                  const WaveTrainOptions& opt) {
    if (p < 1 || q < 1) throw Error(ErrorKind::InvalidArgument, "p and q must be at least 1");
    if (curve.samples.empty()) throw Error(ErrorKind::InvalidArgument, "empty dispersion curve");
    const double c = sr.c_lin;
    const auto& S = curve.samples;
    Operators ops = operators(model, static_cast<int>(S.front().profile.cols()));
    std::vector<WavenumberSolution> out;
    std::vector<double> branches = {1.0};
    if (sr.omega_lin != 0.0) branches.push_back(-1.0);
    for (double s : branches) {
        auto g = [&](double omega, double k) { return q * (omega - c * k) - p * s * sr.omega_lin; };
        for (size_t i = 0; i + 1 <= S.size(); ++i) {
            double g0 = g(S[i].omega, S[i].k);
            bool root_here = g0 == 0.0;
            bool bracket = i + 1 < S.size() && g0 * g(S[i + 1].omega, S[i + 1].k) < 0;
            if (!root_here && !bracket) continue;
            // Bisection on the cubic Hermite interpolant of ω between samples.
            double k = S[i].k;
            if (bracket) {
                const WaveTrain &a = S[i], &b = S[i + 1];
                double hk = b.k - a.k;
                auto interp = [&](double kk) {
                    double t = (kk - a.k) / hk, t2 = t * t, t3 = t2 * t;
                    return (2 * t3 - 3 * t2 + 1) * a.omega + (t3 - 2 * t2 + t) * hk * a.group_velocity +
                           (-2 * t3 + 3 * t2) * b.omega + (t3 - t2) * hk * b.group_velocity;
                };
                double lo = a.k, hi = b.k, glo = g0;
                for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
                    double mid = 0.5 * (lo + hi), gm = g(interp(mid), mid);
                    if (gm * glo > 0) {
                        lo = mid;
                        glo = gm;
                    } else {
                        hi = mid;
                    }
                }
                k = 0.5 * (lo + hi);
            }
            // Newton on the true ω_nl(k), re-solving the wave train each step.
            const WaveTrain& near = (bracket && std::abs(S[i + 1].k - k) < std::abs(S[i].k - k)) ? S[i + 1] : S[i];
            WaveTrain w = solve_with(model, ops, k, near.omega + near.group_velocity * (k - near.k), near.profile, opt);
            for (int it = 0; it < 30; ++it) {
                double gv = g(w.omega, w.k);
                if (std::abs(gv) < 1e-12) break;
                double dg = q * (w.group_velocity - c);
                if (dg == 0.0) break;
                double kn = w.k - gv / dg;
                w = solve_with(model, ops, kn, w.omega + w.group_velocity * (kn - w.k), w.profile, opt);
            }
            WavenumberSolution sol;
            sol.k = w.k;
            sol.omega_nl = w.omega;
            sol.branch = s;
            sol.comoving_group_velocity = w.group_velocity - c;
            sol.admissible = sol.comoving_group_velocity < 0;
            sol.resonance_residual = std::abs(g(w.omega, w.k));
            sol.train = std::move(w);
            out.push_back(std::move(sol));
        }
    }
    if (out.empty())
        throw Error(ErrorKind::NoSolutionInRange, "no resonant wavenumber in [" + std::to_string(S.front().k) + ", " +
                                                      std::to_string(S.back().k) + "]");
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.k < b.k; });
    return out;
}

}  // namespace frontlab
