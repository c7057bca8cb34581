#include "frontlab/frontbvp.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <memory>

#include "frontlab/error.hpp"
#include "frontlab/spreading.hpp"

namespace frontlab {

using fd::SpMat;
using Trip = Eigen::Triplet<double>;

namespace {

double max_abs(const Vec& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

double smallest_singular_value(const SpMat& J) {
    if (J.rows() > 4000) return std::numeric_limits<double>::quiet_NaN();
    Mat D(J);
    Eigen::BDCSVD<Mat> svd(D);
    return svd.singularValues().minCoeff();
}

/// Block diagonal of pointwise Jacobians at the node-major state U.
SpMat block_jacobian(const PointJac& df, const Vec& U, int N) {
    const int n = static_cast<int>(U.size()) / N;
    std::vector<Trip> trip;
    trip.reserve(static_cast<size_t>(n) * N * N);
    std::vector<double> jac(N * N);
    for (int i = 0; i < n; ++i) {
        df(U.data() + i * N, jac.data());
        for (int a = 0; a < N; ++a)
            for (int b = 0; b < N; ++b)
                if (jac[a * N + b] != 0.0) trip.emplace_back(i * N + a, i * N + b, jac[a * N + b]);
    }
    SpMat out(U.size(), U.size());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Vec pointwise(const PointMap& f, const Vec& U, int N) {
    Vec out(U.size());
    const int n = static_cast<int>(U.size()) / N;
    for (int i = 0; i < n; ++i) f(U.data() + i * N, out.data() + i * N);
    return out;
}

/// Uniform weights over nodes inside [lo, hi]; nearest node when the window is narrower than h.
std::vector<std::pair<int, double>> window_weights(const fd::Grid& g, double lo, double hi) {
    std::vector<std::pair<int, double>> w;
    for (int i = 0; i < g.n; ++i)
        if (g.x(i) >= lo - 1e-12 && g.x(i) <= hi + 1e-12) w.emplace_back(i, 1.0);
    if (w.empty()) {
        int i = std::clamp(static_cast<int>(std::lround(0.5 * (lo + hi) / g.h)), 0, g.n - 1);
        w.emplace_back(i, 1.0);
    }
    for (auto& p : w) p.second = 1.0 / w.size();
    return w;
}

/// Appends every entry of M except those in rows flagged by `drop`.
void append_rows(std::vector<Trip>& trip, const SpMat& M, const std::vector<char>& drop) {
    for (int k = 0; k < M.outerSize(); ++k)
        for (SpMat::InnerIterator it(M, k); it; ++it)
            if (!drop[it.row()]) trip.emplace_back(it.row(), it.col(), it.value());
}

std::vector<double> grid_points(const fd::Grid& g) {
    std::vector<double> xi(g.n);
    for (int i = 0; i < g.n; ++i) xi[i] = g.x(i);
    return xi;
}

Vec wake_of(const ModelSpec& m) {
    if (m.wake_state.empty())
        throw Error(ErrorKind::InvalidArgument, m.name + ": front solves need a stationary wake state");
    return Eigen::Map<const Vec>(m.wake_state.data(), m.wake_state.size());
}

}  // namespace

std::array<double, 5> smooth_ramp(double t) {
    std::array<double, 5> d{};
    if (t <= 0) return d;
    if (t >= 1) {
        d[0] = 1.0;
        return d;
    }
    // 126t^5 − 420t^6 + 540t^7 − 315t^8 + 70t^9
    static const double c[10] = {0, 0, 0, 0, 0, 126, -420, 540, -315, 70};
    for (int k = 0; k <= 4; ++k) {
        double s = 0.0;
        for (int p = 9; p >= k; --p) {
            double coef = c[p];
            for (int q = 0; q < k; ++q) coef *= (p - q);
            s += coef * std::pow(t, p - k);
        }
        d[k] = s;
    }
    return d;
}

NewtonReport newton_solve(const NewtonSystem& sys, Vec& x, const NewtonOptions& opt) {
    Vec r = sys.residual(x);
    double nr = max_abs(r);
    if (!std::isfinite(nr)) throw Error(ErrorKind::NoConvergence, "initial residual is not finite");
    for (int it = 0; it < opt.max_iter; ++it) {
        if (nr < opt.tol) return {it, nr};
        SpMat J = sys.jacobian(x);
        J.makeCompressed();
        Eigen::SparseLU<SpMat> lu;
        lu.analyzePattern(J);
        lu.factorize(J);
        if (lu.info() != Eigen::Success)
            throw Error(ErrorKind::SingularJacobian,
                        "smallest singular value " + std::to_string(smallest_singular_value(J)));
        Vec dx = lu.solve(-r);
        if (!dx.allFinite())
            throw Error(ErrorKind::SingularJacobian,
                        "smallest singular value " + std::to_string(smallest_singular_value(J)));
        double lam = 1.0;
        bool accepted = false;
        while (lam >= opt.min_damping) {
            Vec xt = x + lam * dx;
            Vec rt = sys.residual(xt);
            double nt = max_abs(rt);
            if (std::isfinite(nt) && nt < nr) {
                x = std::move(xt);
                r = std::move(rt);
                nr = nt;
                accepted = true;
                break;
            }
            lam *= 0.5;
        }
        if (!accepted)
            throw Error(ErrorKind::NoConvergence,
                        "line search failed after " + std::to_string(it) + " iterations, residual " +
                            std::to_string(nr));
    }
    if (nr < opt.tol) return {opt.max_iter, nr};
    throw Error(ErrorKind::NoConvergence,
                std::to_string(opt.max_iter) + " iterations, residual " + std::to_string(nr));
}

int front_grid_points(double L, const FrontOptions& opt) {
    return opt.n > 0 ? opt.n : static_cast<int>(std::lround(L / 0.05)) + 1;
}

namespace {

struct FrontCtx {
    int N = 1, n = 0;
    fd::Grid g;
    SpMat A, D1, D2;
    bool unknown = false, free = false, has_g = false;
    double c_fixed = 0.0;
    std::vector<std::pair<int, double>> phase;
    int pc = 0;
    double M = 0.0;
    PointMap f, gfun;
    PointJac df, dg;
};

}  // namespace

NewtonSystem front_system(const ModelSpec& model, double L, bool unknown_speed, double c_fixed,
                          const FrontOptions& opt) {
    auto ctx = std::make_shared<FrontCtx>();
    ctx->N = model.dim();
    ctx->free = opt.right == RightBoundary::Free;
    if (ctx->free && unknown_speed)
        throw Error(ErrorKind::InvalidArgument, "free right boundary requires a fixed speed");
    if (ctx->free && model.order() != 2)
        throw Error(ErrorKind::NotApplicable, "free right boundary supports second-order symbols only");
    ctx->n = front_grid_points(L, opt);
    ctx->g = fd::make_grid(L, ctx->n, fd::Side::Even, ctx->free ? fd::Side::OneSided : fd::Side::Odd, opt.accuracy);
    ctx->A = fd::assemble(ctx->g, model.symbol.coeffs());
    ctx->D1 = fd::kron_nodes(fd::derivative(ctx->g, 1), ctx->N);
    ctx->has_g = model.has_g();
    if (ctx->has_g) ctx->D2 = fd::kron_nodes(fd::derivative(ctx->g, 2), ctx->N);
    ctx->unknown = unknown_speed;
    ctx->c_fixed = c_fixed;
    ctx->pc = opt.phase_component;
    if (ctx->pc < 0 || ctx->pc >= ctx->N) throw Error(ErrorKind::InvalidArgument, "phase component out of range");
    auto win = opt.phase_window.value_or(std::make_pair(0.35 * L - 1.0, 0.35 * L + 1.0));
    ctx->phase = window_weights(ctx->g, win.first, win.second);
    ctx->M = std::isnan(opt.phase_value) ? 0.5 * wake_of(model)[ctx->pc] : opt.phase_value;
    ctx->f = model.f;
    ctx->df = model.df;
    ctx->gfun = model.g;
    ctx->dg = model.dg;

    NewtonSystem sys;
    sys.residual = [ctx](const Vec& x) {
        const int N = ctx->N, n = ctx->n, nN = N * n;
        Vec U = x.head(nN);
        double c = ctx->unknown ? x[nN] : ctx->c_fixed;
        Vec R = ctx->A * U + c * (ctx->D1 * U) + pointwise(ctx->f, U, N);
        if (ctx->has_g) R += ctx->D2 * pointwise(ctx->gfun, U, N);
        double ph = -ctx->M;
        for (auto [i, w] : ctx->phase) ph += w * U[i * N + ctx->pc];
        if (ctx->free) {
            R[(n - 1) * N] = ph;
            return R;
        }
        R.segment((n - 1) * N, N) = U.segment((n - 1) * N, N);
        if (!ctx->unknown) return R;
        Vec out(nN + 1);
        out << R, ph;
        return out;
    };
    sys.jacobian = [ctx](const Vec& x) {
        const int N = ctx->N, n = ctx->n, nN = N * n;
        Vec U = x.head(nN);
        double c = ctx->unknown ? x[nN] : ctx->c_fixed;
        SpMat K = ctx->A + c * ctx->D1 + block_jacobian(ctx->df, U, N);
        if (ctx->has_g) K += ctx->D2 * block_jacobian(ctx->dg, U, N);
        int size = ctx->unknown ? nN + 1 : nN;
        std::vector<char> drop(nN, 0);
        if (ctx->free)
            drop[(n - 1) * N] = 1;
        else
            for (int a = 0; a < N; ++a) drop[(n - 1) * N + a] = 1;
        std::vector<Trip> trip;
        trip.reserve(K.nonZeros() + 2 * nN);
        append_rows(trip, K, drop);
        int phase_row = ctx->free ? (n - 1) * N : nN;
        if (!ctx->free)
            for (int a = 0; a < N; ++a) trip.emplace_back((n - 1) * N + a, (n - 1) * N + a, 1.0);
        if (ctx->free || ctx->unknown)
            for (auto [i, w] : ctx->phase) trip.emplace_back(phase_row, i * N + ctx->pc, w);
        if (ctx->unknown) {
            Vec dc = ctx->D1 * U;
            for (int r = 0; r < nN; ++r)
                if (!drop[r] && dc[r] != 0.0) trip.emplace_back(r, nN, dc[r]);
        }
        SpMat J(size, size);
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    };
    return sys;
}

FrontProfile solve_front_newton(const ModelSpec& model, double L, bool unknown_speed, const FrontGuess& guess,
                                const FrontOptions& opt) {
    const int N = model.dim();
    const int n = front_grid_points(L, opt);
    NewtonSystem sys = front_system(model, L, unknown_speed, guess.c, opt);
    fd::Grid g = fd::make_grid(L, n, fd::Side::Even,
                               opt.right == RightBoundary::Free ? fd::Side::OneSided : fd::Side::Odd, opt.accuracy);
    Vec x(unknown_speed ? n * N + 1 : n * N);
    if (guess.u.size()) {
        if (guess.u.rows() != N || guess.u.cols() != n)
            throw Error(ErrorKind::InvalidArgument, "guess profile does not match the grid");
        x.head(n * N) = Eigen::Map<const Vec>(guess.u.data(), n * N);
    } else {
        Vec wake = wake_of(model);
        auto win = opt.phase_window.value_or(std::make_pair(0.35 * L - 1.0, 0.35 * L + 1.0));
        double xc = 0.5 * (win.first + win.second);
        for (int i = 0; i < n; ++i)
            x.segment(i * N, N) = wake / (1.0 + std::exp(guess.steepness * (g.x(i) - xc)));
    }
    if (opt.right == RightBoundary::Dirichlet) x.segment((n - 1) * N, N).setZero();
    if (unknown_speed) x[n * N] = guess.c;
    NewtonReport rep = newton_solve(sys, x, opt.newton);
    FrontProfile p;
    p.xi = grid_points(g);
    p.u = Eigen::Map<const Mat>(x.data(), N, n);
    p.c = unknown_speed ? x[n * N] : guess.c;
    if (!model.wake_state.empty()) p.wake = wake_of(model);
    p.residual = rep.residual;
    p.iterations = rep.iterations;
    p.nu_tail = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    try {
        p.nu_tail = front_decay_rate(model, p).nu;
    } catch (const Error&) {
    }
    return p;
}

namespace {

/// Null vector e0 of A(−η) and generalized vector e1 with A e1 = −A′ e0.
std::pair<Vec, Vec> jordan_chain(const MatrixPolynomial& P, double c, double eta, const Vec& wake) {
    const int N = P.dim();
    double nu = -eta;
    Mat A = P.linearization() + c * nu * Mat::Identity(N, N);
    Mat dA = c * Mat::Identity(N, N);
    for (int j = 0; j <= P.order(); ++j) {
        A += P.coeff(j) * std::pow(nu, j);
        if (j >= 1) dA += j * P.coeff(j) * std::pow(nu, j - 1);
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Vec e0 = svd.matrixV().col(N - 1);
    double s = wake.size() == N ? e0.dot(wake) : 0.0;
    if (std::abs(s) < 1e-12) {
        Eigen::Index k;
        e0.cwiseAbs().maxCoeff(&k);
        s = e0[k];
    }
    if (s < 0) e0 = -e0;
    Vec e1 = Vec::Zero(N);
    if (N > 1) {
        e1 = svd.solve(-dA * e0);
        e1 -= e1.dot(e0) * e0;
    }
    return {e0, e1};
}

struct PulledCtx {
    int N = 1, n = 0;
    fd::Grid g;
    SpMat K;  // A + c D1
    PointMap f;
    PointJac df;
    Vec Lu, La, Lb;     // linear operator applied to the farfield parts
    Vec Qu, Qa, Qb;     // farfield parts themselves
    std::vector<std::pair<int, double>> phase;
    std::vector<std::pair<int, double>> loc;  // localization weights per node
    Vec e0;
    int pc = 0;
    double M = 0.0;
};

/// Farfield derivatives up to order 2m: u_− part and the a, b coefficient parts.
void farfield_parts(const fd::Grid& g, int order, const Vec& wake, const Vec& e0, const Vec& e1, double eta,
                    double xi_c, std::pair<double, double> cut, std::pair<double, double> wcut,
                    std::vector<Vec>& Fu, std::vector<Vec>& Fa, std::vector<Vec>& Fb) {
    const int N = static_cast<int>(e0.size());
    const int n = g.n;
    Fu.assign(order + 1, Vec::Zero(n * N));
    Fa = Fu;
    Fb = Fu;
    const double width = cut.second - cut.first, wwidth = wcut.second - wcut.first;
    for (int i = 0; i < n; ++i) {
        double xi = g.x(i);
        auto r = smooth_ramp((xi - cut.first) / width);
        auto rw = smooth_ramp((xi - wcut.first) / wwidth);
        double chi[5], chim[5];
        for (int k = 0; k < 5; ++k) {
            chi[k] = r[k] / std::pow(width, k);
            chim[k] = (k == 0 ? 1.0 - rw[0] : -rw[k]) / std::pow(wwidth, k);
        }
        double s = xi - xi_c, E = std::exp(-eta * s);
        for (int j = 0; j <= order; ++j) {
            // (χ_− u_−)^{(j)}
            double cm = j <= 4 ? chim[j] : 0.0;
            Fu[j].segment(i * N, N) = cm * wake;
            // Σ_k C(j,k) χ^{(k)} ψ^{(j−k)}; ψ^{(p)} = E[(−η)^p (a s + b) e0 + p(−η)^{p−1} a e0 + (−η)^p a e1]
            Vec va = Vec::Zero(N), vb = Vec::Zero(N);
            double binom = 1.0;
            for (int k = 0; k <= j; ++k) {
                if (k > 0) binom = binom * (j - k + 1) / k;
                if (k > 4) break;
                int p = j - k;
                double mp = std::pow(-eta, p);
                double mp1 = p > 0 ? p * std::pow(-eta, p - 1) : 0.0;
                va += binom * chi[k] * E * ((mp * s + mp1) * e0 + mp * e1);
                vb += binom * chi[k] * E * mp * e0;
            }
            Fa[j].segment(i * N, N) = va;
            Fb[j].segment(i * N, N) = vb;
        }
    }
}

Vec apply_symbol(const MatrixPolynomial& P, double c, const std::vector<Vec>& F, int N) {
    const int n = static_cast<int>(F[0].size()) / N;
    Vec out = Vec::Zero(F[0].size());
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= P.order(); ++j) out.segment(i * N, N) += P.coeff(j) * F[j].segment(i * N, N);
        out.segment(i * N, N) += c * F[1].segment(i * N, N);
    }
    return out;
}

struct PulledSetup {
    std::shared_ptr<PulledCtx> ctx;
    FarfieldCoreDecomp proto;
};

PulledSetup pulled_setup(const ModelSpec& model, double c, double eta, double L, const PulledOptions& opt) {
    if (model.has_g()) throw Error(ErrorKind::NotApplicable, "farfield-core solves need a pointwise nonlinearity");
    if (!(eta > 0)) throw Error(ErrorKind::InvalidArgument, "eta must be positive");
    auto ctx = std::make_shared<PulledCtx>();
    const int N = model.dim();
    ctx->N = N;
    ctx->n = front_grid_points(L, opt.front);
    ctx->g = fd::make_grid(L, ctx->n, fd::Side::Even, fd::Side::Odd, opt.front.accuracy);
    ctx->K = fd::assemble(ctx->g, model.symbol.coeffs()) + c * fd::kron_nodes(fd::derivative(ctx->g, 1), N);
    ctx->f = model.f;
    ctx->df = model.df;
    Vec wake = wake_of(model);
    auto [e0, e1] = jordan_chain(model.symbol, c, eta, wake);
    ctx->e0 = e0;
    double xi_c = opt.phase_center * L;
    double cut_lo = opt.cut_center * L - opt.cut_halfwidth, cut_hi = opt.cut_center * L + opt.cut_halfwidth;
    double wcut_lo = xi_c - opt.cut_halfwidth, wcut_hi = xi_c + opt.cut_halfwidth;
    if (wcut_lo < 0.0 || cut_lo <= xi_c + 1.0 || cut_hi >= L * (1 - opt.localization_fraction))
        throw Error(ErrorKind::InvalidArgument, "domain too short for the cut-off and phase placement");
    std::vector<Vec> Fu, Fa, Fb;
    farfield_parts(ctx->g, model.order(), wake, e0, e1, eta, xi_c, {cut_lo, cut_hi}, {wcut_lo, wcut_hi}, Fu, Fa,
                   Fb);
    ctx->Lu = apply_symbol(model.symbol, c, Fu, N);
    ctx->La = apply_symbol(model.symbol, c, Fa, N);
    ctx->Lb = apply_symbol(model.symbol, c, Fb, N);
    ctx->Qu = Fu[0];
    ctx->Qa = Fa[0];
    ctx->Qb = Fb[0];
    ctx->pc = opt.front.phase_component;
    auto win = opt.front.phase_window.value_or(std::make_pair(xi_c - 1.0, xi_c + 1.0));
    ctx->phase = window_weights(ctx->g, win.first, win.second);
    ctx->M = std::isnan(opt.front.phase_value) ? 0.5 * wake[ctx->pc] : opt.front.phase_value;
    int start = static_cast<int>(std::floor((1 - opt.localization_fraction) * (ctx->n - 1)));
    int count = (ctx->n - 1) - start;
    for (int i = start; i < ctx->n - 1; ++i)
        ctx->loc.emplace_back(i, std::exp(eta * (ctx->g.x(i) - L)) / count);

    PulledSetup out;
    out.ctx = ctx;
    out.proto.eta = eta;
    out.proto.xi_c = xi_c;
    out.proto.cut = {cut_lo, cut_hi};
    out.proto.wake_cut = {wcut_lo, wcut_hi};
    out.proto.wake = wake;
    out.proto.e0 = e0;
    out.proto.e1 = e1;
    return out;
}

NewtonSystem make_pulled_system(std::shared_ptr<PulledCtx> ctx) {
    NewtonSystem sys;
    sys.residual = [ctx](const Vec& x) {
        const int N = ctx->N, n = ctx->n, nN = N * n;
        Vec W = x.head(nN);
        double a = x[nN], b = x[nN + 1];
        Vec q = W + ctx->Qu + a * ctx->Qa + b * ctx->Qb;
        Vec R(nN + 2);
        R.head(nN) = ctx->K * W + ctx->Lu + a * ctx->La + b * ctx->Lb + pointwise(ctx->f, q, N);
        R.segment((n - 1) * N, N) = W.segment((n - 1) * N, N);
        double ph = -ctx->M;
        for (auto [i, w] : ctx->phase) ph += w * q[i * N + ctx->pc];
        double lo = 0.0;
        for (auto [i, w] : ctx->loc) lo += w * ctx->e0.dot(W.segment(i * N, N));
        R[nN] = ph;
        R[nN + 1] = lo;
        return R;
    };
    sys.jacobian = [ctx](const Vec& x) {
        const int N = ctx->N, n = ctx->n, nN = N * n;
        Vec W = x.head(nN);
        double a = x[nN], b = x[nN + 1];
        Vec q = W + ctx->Qu + a * ctx->Qa + b * ctx->Qb;
        SpMat F = block_jacobian(ctx->df, q, N);
        SpMat K = ctx->K + F;
        std::vector<char> drop(nN, 0);
        for (int c = 0; c < N; ++c) drop[(n - 1) * N + c] = 1;
        std::vector<Trip> trip;
        trip.reserve(K.nonZeros() + 4 * nN);
        append_rows(trip, K, drop);
        for (int c = 0; c < N; ++c) trip.emplace_back((n - 1) * N + c, (n - 1) * N + c, 1.0);
        Vec ca = ctx->La + F * ctx->Qa, cb = ctx->Lb + F * ctx->Qb;
        for (int r = 0; r < nN; ++r) {
            if (drop[r]) continue;
            if (ca[r] != 0.0) trip.emplace_back(r, nN, ca[r]);
            if (cb[r] != 0.0) trip.emplace_back(r, nN + 1, cb[r]);
        }
        double pa = 0.0, pb = 0.0;
        for (auto [i, w] : ctx->phase) {
            trip.emplace_back(nN, i * N + ctx->pc, w);
            pa += w * ctx->Qa[i * N + ctx->pc];
            pb += w * ctx->Qb[i * N + ctx->pc];
        }
        if (pa != 0.0) trip.emplace_back(nN, nN, pa);
        if (pb != 0.0) trip.emplace_back(nN, nN + 1, pb);
        for (auto [i, w] : ctx->loc)
            for (int c = 0; c < N; ++c)
                if (ctx->e0[c] != 0.0) trip.emplace_back(nN + 1, i * N + c, w * ctx->e0[c]);
        SpMat J(nN + 2, nN + 2);
        J.setFromTriplets(trip.begin(), trip.end());
        return J;
    };
    return sys;
}

/// Decay rate −slope of log|v| by least squares over points above the noise floor.
double log_slope_rate(const std::vector<double>& xi, const std::vector<double>& v, double floor, int min_pts) {
    std::vector<double> xs, ys;
    for (size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > floor) {
            xs.push_back(xi[i]);
            ys.push_back(std::log(std::abs(v[i])));
        }
    if (static_cast<int>(xs.size()) < min_pts) return std::numeric_limits<double>::infinity();
    Mat A(xs.size(), 2);
    Vec y(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) {
        A(i, 0) = 1.0;
        A(i, 1) = xs[i];
        y[i] = ys[i];
    }
    return -A.colPivHouseholderQr().solve(y)[1];
}

}  // namespace

NewtonSystem pulled_system(const ModelSpec& model, double c, double eta, double L, const PulledOptions& opt) {
    return make_pulled_system(pulled_setup(model, c, eta, L, opt).ctx);
}

Mat reconstruct(const FarfieldCoreDecomp& d, const std::vector<double>& xi) {
    const int N = static_cast<int>(d.e0.size());
    const int n = static_cast<int>(xi.size());
    Mat q(N, n);
    double width = d.cut.second - d.cut.first;
    for (int i = 0; i < n; ++i) {
        double chi = smooth_ramp((xi[i] - d.cut.first) / width)[0];
        double chim = 1.0 - smooth_ramp((xi[i] - d.wake_cut.first) / (d.wake_cut.second - d.wake_cut.first))[0];
        double s = xi[i] - d.xi_c, E = std::exp(-d.eta * s);
        Vec psi = E * ((d.a * s + d.b) * d.e0 + d.a * d.e1);
        q.col(i) = chim * d.wake + d.w.col(i) + chi * psi;
    }
    return q;
}

PulledFront solve_pulled_front(const ModelSpec& model, double c, double eta, double L,
                               const std::optional<PulledFront>& guess, const PulledOptions& opt) {
    PulledSetup setup = pulled_setup(model, c, eta, L, opt);
    auto ctx = setup.ctx;
    const int N = ctx->N, n = ctx->n, nN = N * n;
    NewtonSystem sys = make_pulled_system(ctx);
    std::vector<double> xi = grid_points(ctx->g);
    Vec x(nN + 2);
    if (guess && guess->decomp.w.cols() == n && guess->decomp.w.rows() == N) {
        x.head(nN) = Eigen::Map<const Vec>(guess->decomp.w.data(), nN);
        x[nN] = guess->decomp.a;
        x[nN + 1] = guess->decomp.b;
    } else {
        // Logistic ramp matched to a pure e^{−η(ξ−ξ_c)} leading edge.
        double b0 = setup.proto.e0.dot(setup.proto.wake);
        Vec q0(nN);
        for (int i = 0; i < n; ++i)
            q0.segment(i * N, N) = setup.proto.wake / (1.0 + std::exp(eta * (xi[i] - setup.proto.xi_c)));
        x[nN] = 0.0;
        x[nN + 1] = b0;
        x.head(nN) = q0 - ctx->Qu - b0 * ctx->Qb;
        x.segment((n - 1) * N, N).setZero();
    }
    NewtonReport rep = newton_solve(sys, x, opt.front.newton);

    PulledFront out;
    out.decomp = setup.proto;
    out.decomp.w = Eigen::Map<const Mat>(x.data(), N, n);
    out.decomp.a = x[nN];
    out.decomp.b = x[nN + 1];
    out.profile.xi = xi;
    out.profile.u = reconstruct(out.decomp, xi);
    out.profile.c = c;
    out.profile.wake = setup.proto.wake;
    out.profile.residual = rep.residual;
    out.profile.iterations = rep.iterations;
    out.profile.nu_tail = cplx(-eta, 0.0);

    std::vector<double> xs, ws;
    double hi = L * (1 - opt.localization_fraction);
    for (int i = 0; i < n; ++i)
        if (xi[i] >= out.decomp.cut.second && xi[i] <= hi) {
            xs.push_back(xi[i]);
            ws.push_back(out.decomp.e0.dot(out.decomp.w.col(i)));
        }
    out.decomp.core_rate = log_slope_rate(xs, ws, 1e-13, 10);
    if (opt.check_core_decay && out.decomp.core_rate <= 1.05 * eta)
        throw Error(ErrorKind::WeakCoreDecay, "core decays at rate " + std::to_string(out.decomp.core_rate) +
                                                  " <= 1.05 eta = " + std::to_string(1.05 * eta) +
                                                  " (a = " + std::to_string(out.decomp.a) + ")");
    return out;
}

LinearData linear_data_from_spreading() {
    return [](const ModelSpec& m) {
        SpreadingResult sr = linear_spreading_speed(m.symbol);
        return std::make_pair(sr.c_lin, sr.eta_lin);
    };
}

TransitionResult detect_transition(const ModelFamily& family, std::pair<double, double> bracket, double L,
                                   const LinearData& lin, const PulledOptions& opt_in) {
    PulledOptions opt = opt_in;
    opt.check_core_decay = false;
    TransitionResult tr;
    std::optional<PulledFront> last;
    auto eval = [&](double mu) {
        ModelSpec m = family(mu);
        auto [c, eta] = lin(m);
        PulledFront pf;
        try {
            pf = solve_pulled_front(m, c, eta, L, last, opt);
        } catch (const Error& e) {
            if (!last) throw;
            pf = solve_pulled_front(m, c, eta, L, std::nullopt, opt);
        }
        last = pf;
        tr.history.emplace_back(mu, pf.decomp.a);
        return std::make_tuple(pf.decomp.a, c, eta, pf);
    };
    double lo = bracket.first, hi = bracket.second;
    double alo = std::get<0>(eval(lo));
    double ahi = std::get<0>(eval(hi));
    if (alo * ahi > 0)
        throw Error(ErrorKind::NoSignChange, "a = " + std::to_string(alo) + " and " + std::to_string(ahi) +
                                                 " at the bracket ends");
    // Illinois variant of regula falsi.
    int side = 0;
    for (int it = 0; it < 60; ++it) {
        double mu = (lo * ahi - hi * alo) / (ahi - alo);
        auto [am, cm, em, pm] = eval(mu);
        tr.mu = mu;
        tr.c_lin = cm;
        tr.eta = em;
        tr.front = pm;
        if (am == 0.0) break;
        if (am * ahi > 0) {
            hi = mu;
            ahi = am;
            if (side == 1) alo *= 0.5;
            side = 1;
        } else {
            lo = mu;
            alo = am;
            if (side == -1) ahi *= 0.5;
            side = -1;
        }
        if (std::abs(hi - lo) < 1e-8 * (1.0 + std::abs(mu))) break;
    }
    return tr;
}

namespace {

Vec profile_vector(const FrontProfile& p) {
    Vec x(p.u.size() + 1);
    x.head(p.u.size()) = Eigen::Map<const Vec>(p.u.data(), p.u.size());
    x[p.u.size()] = p.c;
    return x;
}

FrontProfile profile_from(const ModelSpec& m, const Vec& x, double L, const FrontOptions& opt, NewtonReport rep) {
    const int N = m.dim(), n = front_grid_points(L, opt);
    FrontProfile p;
    fd::Grid g = fd::make_grid(L, n, fd::Side::Even, fd::Side::Odd, opt.accuracy);
    p.xi = grid_points(g);
    p.u = Eigen::Map<const Mat>(x.data(), N, n);
    p.c = x[N * n];
    if (!m.wake_state.empty()) p.wake = wake_of(m);
    p.residual = rep.residual;
    p.iterations = rep.iterations;
    p.nu_tail = cplx(std::numeric_limits<double>::quiet_NaN(), 0.0);
    try {
        p.nu_tail = front_decay_rate(m, p).nu;
    } catch (const Error&) {
    }
    return p;
}

}  // namespace

ContinuationReport continue_front(const ModelFamily& family, const FrontProfile& seed, double L,
                                  const std::vector<double>& path, bool arclength, const FrontOptions& opt_in) {
    FrontOptions opt = opt_in;
    opt.right = RightBoundary::Dirichlet;
    ContinuationReport rep;
    if (path.empty()) return rep;
    rep.branch.push_back({path.front(), seed});
    if (path.size() == 1) return rep;
    const double span = std::abs(path.back() - path.front());
    const double min_step = 1e-5 * std::max(span, 1e-3);

    if (!arclength) {
        Vec prev_x, cur_x = profile_vector(seed);
        double prev_mu = path.front(), cur_mu = path.front();
        for (size_t k = 1; k < path.size(); ++k) {
            double target = path[k];
            double step = target - cur_mu;
            while (std::abs(target - cur_mu) > 1e-14) {
                double mu = cur_mu + step;
                if ((step > 0 && mu > target) || (step < 0 && mu < target)) mu = target;
                Vec x = cur_x;
                if (prev_x.size() == cur_x.size() && prev_mu != cur_mu)
                    x += (mu - cur_mu) / (cur_mu - prev_mu) * (cur_x - prev_x);
                try {
                    ModelSpec m = family(mu);
                    NewtonSystem sys = front_system(m, L, true, 0.0, opt);
                    NewtonReport r = newton_solve(sys, x, opt.newton);
                    prev_x = cur_x;
                    prev_mu = cur_mu;
                    cur_x = x;
                    cur_mu = mu;
                    rep.branch.push_back({mu, profile_from(m, x, L, opt, r)});
                    step = std::copysign(std::min(std::abs(step) * 1.5, std::abs(target - cur_mu)), step);
                    if (step == 0.0) break;
                } catch (const Error& e) {
                    if (e.kind() == ErrorKind::ParameterOutOfRange) throw;
                    step *= 0.5;
                    if (std::abs(step) < min_step) {
                        rep.terminated = true;
                        return rep;
                    }
                }
            }
        }
        return rep;
    }

    // Pseudo-arclength in (u, c, μ) with secant tangents.
    const double mu_end = path.back();
    const double dir = mu_end > path.front() ? 1.0 : -1.0;
    Vec X0(seed.u.size() + 2);
    X0.head(seed.u.size() + 1) = profile_vector(seed);
    X0[seed.u.size() + 1] = path.front();
    const int dim = static_cast<int>(X0.size());
    const int nu_idx = dim - 1;
    // First tangent from a short natural step.
    double dmu0 = dir * std::max(span / 50.0, 10 * min_step);
    Vec X1 = X0;
    {
        ModelSpec m = family(X0[nu_idx] + dmu0);
        Vec x = X0.head(dim - 1);
        NewtonSystem sys = front_system(m, L, true, 0.0, opt);
        newton_solve(sys, x, opt.newton);
        X1.head(dim - 1) = x;
        X1[nu_idx] = X0[nu_idx] + dmu0;
        rep.branch.push_back({X1[nu_idx], profile_from(m, x, L, opt, {0, 0.0})});
    }
    double ds = (X1 - X0).norm();
    const double ds_min = 1e-4 * ds;
    while (dir * (X1[nu_idx] - mu_end) < 0) {
        Vec t = (X1 - X0).normalized();
        Vec X = X1 + ds * t;
        Vec Xbase = X1;
        bool ok = false;
        for (int it = 0; it < opt.newton.max_iter; ++it) {
            double mu = X[nu_idx];
            ModelSpec m;
            try {
                m = family(mu);
            } catch (const Error&) {
                break;
            }
            NewtonSystem sys = front_system(m, L, true, 0.0, opt);
            Vec x = X.head(dim - 1);
            Vec R = sys.residual(x);
            double arc = t.dot(X - Xbase) - ds;
            double nr = std::max(max_abs(R), std::abs(arc));
            if (!std::isfinite(nr)) break;
            if (nr < opt.newton.tol) {
                ok = true;
                break;
            }
            double hmu = 1e-6 * (1 + std::abs(mu));
            Vec dRdmu = (front_system(family(mu + hmu), L, true, 0.0, opt).residual(x) -
                         front_system(family(mu - hmu), L, true, 0.0, opt).residual(x)) /
                        (2 * hmu);
            SpMat J = sys.jacobian(x);
            std::vector<Trip> trip;
            for (int k = 0; k < J.outerSize(); ++k)
                for (SpMat::InnerIterator i2(J, k); i2; ++i2) trip.emplace_back(i2.row(), i2.col(), i2.value());
            for (int r = 0; r < dim - 1; ++r)
                if (dRdmu[r] != 0.0) trip.emplace_back(r, nu_idx, dRdmu[r]);
            for (int cidx = 0; cidx < dim; ++cidx)
                if (t[cidx] != 0.0) trip.emplace_back(dim - 1, cidx, t[cidx]);
            SpMat Ja(dim, dim);
            Ja.setFromTriplets(trip.begin(), trip.end());
            Eigen::SparseLU<SpMat> lu;
            lu.compute(Ja);
            if (lu.info() != Eigen::Success) break;
            Vec rhs(dim);
            rhs << -R, -arc;
            Vec dX = lu.solve(rhs);
            if (!dX.allFinite()) break;
            X += dX;
        }
        if (!ok) {
            ds *= 0.5;
            if (ds < ds_min) {
                rep.terminated = true;
                return rep;
            }
            continue;
        }
        X0 = X1;
        X1 = X;
        ModelSpec m = family(X[nu_idx]);
        rep.branch.push_back({X[nu_idx], profile_from(m, X.head(dim - 1), L, opt, {0, 0.0})});
        ds *= 1.3;
    }
    // Land exactly on the path end.
    rep.branch.pop_back();
    ModelSpec m = family(mu_end);
    Vec x = X0.head(dim - 1);
    double w = (mu_end - X0[nu_idx]) / (X1[nu_idx] - X0[nu_idx]);
    x += w * (X1.head(dim - 1) - X0.head(dim - 1));
    NewtonReport r = newton_solve(front_system(m, L, true, 0.0, opt), x, opt.newton);
    rep.branch.push_back({mu_end, profile_from(m, x, L, opt, r)});
    return rep;
}

FrontSpectrum front_spectrum(const ModelSpec& model, const FrontProfile& profile, double eta, int n_eigs,
                             double ramp_start) {
    if (model.order() != 2) throw Error(ErrorKind::NotApplicable, "front spectra support second-order symbols only");
    if (model.has_g()) throw Error(ErrorKind::NotApplicable, "front spectra need a pointwise nonlinearity");
    const int N = model.dim();
    const int n = static_cast<int>(profile.xi.size());
    const double L = profile.xi.back();
    fd::Grid g = fd::make_grid(L, n, fd::Side::Even, fd::Side::Odd, 4);
    Mat D1 = Mat(fd::derivative(g, 1)), D2 = Mat(fd::derivative(g, 2));
    const Mat& P0 = model.symbol.coeff(0);
    const Mat& P1 = model.symbol.coeff(1);
    const Mat& P2 = model.symbol.coeff(2);
    const Mat I = Mat::Identity(N, N);
    const int m = n - 1;  // Dirichlet node dropped
    Mat Lw = Mat::Zero(m * N, m * N);
    std::vector<double> sig(n), dsig(n), s(n);
    for (int i = 0; i < n; ++i) {
        double t = (profile.xi[i] - ramp_start) / 10.0;
        auto r = smooth_ramp(t);
        sig[i] = eta * r[0];
        dsig[i] = eta * r[1] / 10.0;
        // Antiderivative of the ramp: 21t^6 − 60t^7 + 67.5t^8 − 35t^9 + 7t^10, equal to 1/2 at t = 1.
        double tc = std::clamp(t, 0.0, 1.0);
        double S = 21 * std::pow(tc, 6) - 60 * std::pow(tc, 7) + 67.5 * std::pow(tc, 8) - 35 * std::pow(tc, 9) +
                   7 * std::pow(tc, 10);
        s[i] = 10.0 * S + (t > 1 ? 10.0 * (t - 1) : 0.0);
    }
    std::vector<double> jac(N * N);
    for (int i = 0; i < m; ++i) {
        Mat first = -2 * sig[i] * P2 + P1 + profile.c * I;
        model.df(profile.u.col(i).data(), jac.data());
        Mat fp = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(jac.data(), N, N);
        Mat zero = P2 * (sig[i] * sig[i] - dsig[i]) - sig[i] * (P1 + profile.c * I) + P0 + fp;
        for (int k = 0; k < m; ++k) {
            double d1 = D1(i, k), d2 = D2(i, k);
            if (d1 == 0.0 && d2 == 0.0 && k != i) continue;
            Mat blk = d2 * P2 + d1 * first;
            if (k == i) blk += zero;
            Lw.block(i * N, k * N, N, N) = blk;
        }
    }
    Eigen::EigenSolver<Mat> es(Lw, true);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigFailure, "dense eigensolver failed");
    CVec ev = es.eigenvalues();
    std::vector<int> idx(ev.size());
    for (int i = 0; i < static_cast<int>(idx.size()); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (ev[a].real() != ev[b].real()) return ev[a].real() > ev[b].real();
        return ev[a].imag() > ev[b].imag();
    });
    FrontSpectrum out;
    out.weight_eta = eta;
    int keep = std::min<int>(n_eigs, static_cast<int>(idx.size()));
    for (int k = 0; k < keep; ++k) out.eigenvalues.push_back(ev[idx[k]]);
    out.leading = ev[idx[0]];
    CMat V = es.eigenvectors();
    out.leading_vector = CVec::Zero(n * N);
    for (int i = 0; i < m; ++i)
        out.leading_vector.segment(i * N, N) = V.col(idx[0]).segment(i * N, N) * std::exp(-eta * s[i]);
    int iz = 0;
    for (int k = 1; k < ev.size(); ++k)
        if (std::abs(ev[k]) < std::abs(ev[iz])) iz = k;
    out.nearest_zero = ev[iz];
    // Weighted translation mode e^{ηs} u*′.
    Mat U = profile.u;
    Vec tw(m * N);
    for (int i = 0; i < m; ++i)
        for (int c = 0; c < N; ++c) {
            double du = 0.0;
            for (int k = 0; k < n; ++k)
                if (D1(i, k) != 0.0) du += D1(i, k) * U(c, k);
            tw[i * N + c] = std::exp(s[i] * eta) * du;
        }
    CVec v = V.col(iz);
    out.translation_correlation = std::abs(v.dot(tw.cast<cplx>())) / (v.norm() * tw.norm());
    Eigen::BDCSVD<Mat> svd(Lw);
    out.sigma_min = svd.singularValues().minCoeff();
    return out;
}

DecayFit front_decay_rate(const ModelSpec& model, const FrontProfile& p) {
    const int n = static_cast<int>(p.xi.size());
    if (n < 8) throw Error(ErrorKind::TailBelowNoise, "profile too short");
    Vec u0 = p.u.row(0).transpose();
    double umax = u0.cwiseAbs().maxCoeff();
    if (!(umax > 0)) throw Error(ErrorKind::TailBelowNoise, "profile vanishes");
    // Tail: beyond the last point above 1% of the maximum, below 90% of the domain, above 1e−13.
    int start = n - 1;
    while (start > 0 && std::abs(u0[start]) < 1e-2 * umax) --start;
    int stop = static_cast<int>(0.9 * (n - 1));
    std::vector<int> idx;
    for (int i = start + 1; i < stop; ++i)
        if (std::abs(u0[i]) > 1e-13) idx.push_back(i);
        else break;
    if (idx.size() < 30) throw Error(ErrorKind::TailBelowNoise, std::to_string(idx.size()) + " tail points");
    const double h = p.xi[1] - p.xi[0];
    const int m = static_cast<int>(idx.size());
    DecayFit out;
    out.points = m;
    // Single exponential first.
    Mat A(m, 2);
    Vec y(m);
    for (int k = 0; k < m; ++k) {
        A(k, 0) = 1.0;
        A(k, 1) = p.xi[idx[k]];
        y[k] = std::log(std::abs(u0[idx[k]]));
    }
    Vec coef = A.colPivHouseholderQr().solve(y);
    double rel = (A * coef - y).cwiseAbs().maxCoeff();
    cplx nu(coef[1], 0.0);
    bool sign_change = false;
    for (int k = 1; k < m; ++k)
        if (u0[idx[k]] * u0[idx[k - 1]] < 0) sign_change = true;
    if (rel > 1e-6 || sign_change) {
        // Two-term Prony fit u_{k+2} = p u_{k+1} + q u_k, rows scaled by |u_{k+1}|.
        Mat B(m - 2, 2);
        Vec z(m - 2);
        for (int k = 0; k + 2 < m; ++k) {
            double s = 1.0 / std::abs(u0[idx[k + 1]]);
            B(k, 0) = u0[idx[k + 1]] * s;
            B(k, 1) = u0[idx[k]] * s;
            z[k] = u0[idx[k + 2]] * s;
        }
        Vec pq = B.colPivHouseholderQr().solve(z);
        cplx disc = std::sqrt(cplx(pq[0] * pq[0] + 4 * pq[1], 0.0));
        cplx z1 = 0.5 * (pq[0] + disc), z2 = 0.5 * (pq[0] - disc);
        cplx n1 = std::log(z1) / h, n2 = std::log(z2) / h;
        if (std::abs(disc.imag()) > 0) {
            nu = n1.imag() >= 0 ? n1 : n2;
        } else {
            // Amplitudes from a least-squares fit; keep the mode dominating mid-tail.
            Eigen::MatrixXcd C(m, 2);
            Eigen::VectorXcd yy(m);
            for (int k = 0; k < m; ++k) {
                C(k, 0) = std::pow(z1, k);
                C(k, 1) = std::pow(z2, k);
                yy[k] = u0[idx[k]];
            }
            Eigen::VectorXcd amp = C.colPivHouseholderQr().solve(yy);
            int mid = m / 2;
            double d1 = std::abs(amp[0] * std::pow(z1, mid)), d2 = std::abs(amp[1] * std::pow(z2, mid));
            nu = d1 >= d2 ? n1 : n2;
        }
    }
    out.nu = nu;
    // ν_± from the comoving dispersion relation at λ = 0.
    ComovingDispersion dr(model.symbol, p.c);
    std::vector<cplx> roots = nu_roots(dr, 0.0);
    std::vector<double> neg;
    for (cplx r : roots)
        if (r.real() < 0) neg.push_back(r.real());
    std::sort(neg.begin(), neg.end(), std::greater<>());
    if (neg.size() >= 2) {
        double nplus = neg[0], nminus = neg[1];
        for (double v : neg)
            if (v < nplus - 1e-8) {
                nminus = v;
                break;
            }
        out.cls = std::abs(nu.real() - nminus) < std::abs(nu.real() - nplus) ? TailClass::Steep : TailClass::Generic;
    }
    return out;
}

}  // namespace frontlab
