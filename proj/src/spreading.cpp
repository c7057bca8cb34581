#include "frontlab/spreading.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "frontlab/error.hpp"
#include "frontlab/kernels.hpp"

namespace frontlab {

namespace {

struct Prepared {
    ComovingDispersion dr;
    std::vector<DoubleRoot> roots;
};

Prepared prepare(const ComovingDispersion& dr, const DoubleRootOptions& opt) {
    try {
        return {dr, find_double_roots(dr, opt)};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::DegenerateFamily) throw;
    }
    auto red = dr.squarefree();
    return {red, find_double_roots(red, opt)};
}

std::string describe(const std::vector<DoubleRoot>& roots) {
    std::ostringstream os;
    os.precision(10);
    os << "no pinched double root among " << roots.size() << ":";
    for (const auto& r : roots)
        os << " [lambda=" << r.lambda << " nu=" << r.nu << " " << to_string(r.classification) << " "
           << to_string(r.pinched.state) << "]";
    return os.str();
}

std::pair<DoubleRoot, ComovingDispersion> rightmost_impl(const ComovingDispersion& dr, const SpreadingOptions& opt) {
    auto prep = prepare(dr, opt.roots);
    auto& roots = prep.roots;
    // Group roots with equal Re λ (within tol_dedup); inside a group Im λ ≥ 0 comes first.
    std::stable_sort(roots.begin(), roots.end(),
                     [](const DoubleRoot& a, const DoubleRoot& b) { return a.lambda.real() > b.lambda.real(); });
    for (size_t i = 0; i < roots.size();) {
        size_t j = i + 1;
        while (j < roots.size() && roots[i].lambda.real() - roots[j].lambda.real() < opt.roots.tol_dedup) ++j;
        std::stable_sort(roots.begin() + i, roots.begin() + j,
                         [](const DoubleRoot& a, const DoubleRoot& b) { return a.lambda.imag() > b.lambda.imag(); });
        std::stable_partition(roots.begin() + i, roots.begin() + j,
                              [&](const DoubleRoot& a) { return a.lambda.imag() >= -opt.roots.tol_dedup; });
        i = j;
    }
    // Simple roots first; multiple roots only when requested or when no simple root is pinched.
    for (int pass = 0; pass < 2; ++pass) {
        for (auto& r : roots) {
            bool simple = r.classification == RootClass::Simple;
            bool multiple = r.classification == RootClass::DoubleDouble;
            bool eligible = pass == 0 ? (simple || (opt.include_multiple && multiple)) : multiple;
            if (!eligible) continue;
            if (r.pinched.state == PinchState::Unchecked) r.pinched = check_pinching(prep.dr, r, opt.pinch);
            if (r.pinched.state == PinchState::Pinched) return {r, prep.dr};
        }
        if (opt.include_multiple) break;
    }
    throw Error(ErrorKind::NonePinched, describe(roots));
}

double growth(const MatrixPolynomial& base, double c, const SpreadingOptions& opt) {
    try {
        return rightmost_impl(ComovingDispersion(base, c), opt).first.lambda.real();
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NonePinched) return -std::numeric_limits<double>::infinity();
        throw;
    }
}

ComovingDispersion frame(const MatrixPolynomial& base, double c, bool reduced) {
    ComovingDispersion dr(base, c);
    return reduced ? dr.squarefree() : dr;
}

}  // namespace

DoubleRoot rightmost_pinched(const ComovingDispersion& dr, const SpreadingOptions& opt) {
    return rightmost_impl(dr, opt).first;
}

SpreadingResult linear_spreading_speed(const MatrixPolynomial& base, std::optional<std::pair<double, double>> bracket,
                                       const SpreadingOptions& opt) {
    double c_lo = bracket ? bracket->first : 1e-2;
    double c_hi = 0.0;
    if (bracket) {
        c_hi = bracket->second;
    } else {
        const int m2 = base.order();
        auto ks = linspace(-20.0, 20.0, 801);
        double wm = weighted_max(ComovingDispersion(base, 0.0), 0.0, ks);
        double scale = std::max(1.0, std::pow(base.coeff(m2).norm(), 1.0 / m2));
        c_hi = 4.0 * std::pow(std::max(1.0, wm), (m2 - 1.0) / m2) * scale;
    }
    if (!(c_hi > c_lo)) throw Error(ErrorKind::BracketInvalid, "empty bracket");
    bool lo_ok = growth(base, c_lo, opt) > 0.0;
    // Near-coincident roots at tiny speeds can hide the pinched pair; retry further up.
    for (double f : {1.0 / 64, 1.0 / 32, 1.0 / 16, 1.0 / 8})
        if (!lo_ok && !bracket && f * c_hi > c_lo) {
            lo_ok = growth(base, f * c_hi, opt) > 0.0;
            if (lo_ok) c_lo = f * c_hi;
        }
    if (!lo_ok) throw Error(ErrorKind::BracketInvalid, "rightmost pinched root is not unstable at c_lo");
    for (int k = 0; growth(base, c_hi, opt) >= 0.0; ++k) {
        if (bracket || k > 20) throw Error(ErrorKind::BracketInvalid, "rightmost pinched root is not stable at c_hi");
        c_hi *= 2.0;
    }

    auto xs = linspace(c_lo, c_hi, std::max(opt.scan_points, 3));
    auto gs = kernels::map_omp([&](double c) { return growth(base, c, opt); }, xs);
    int changes = 0;
    size_t pick = 0;
    for (size_t i = 0; i + 1 < xs.size(); ++i)
        if ((gs[i] > 0.0) != (gs[i + 1] > 0.0)) {
            ++changes;
            if (gs[i] > 0.0) pick = i;
        }
    SpreadingResult sr;
    sr.multi_interval = changes > 1;
    double lo = xs[pick], hi = xs[pick + 1];
    while (hi - lo > 1e-7 * (1.0 + hi)) {
        double mid = 0.5 * (lo + hi);
        (growth(base, mid, opt) > 0.0 ? lo : hi) = mid;
    }

    auto [r0, dr0] = rightmost_impl(ComovingDispersion(base, lo), opt);
    const bool reduced = dr0.reduced();
    sr.reduced = reduced;
    // Newton on (ω, ν, c) for d = ∂ν d = 0 at λ = iω, using ∂c d = −ν ∂λ d.
    double w = r0.lambda.imag(), c = lo;
    cplx nu = r0.nu;
    for (int it = 0; it < 60; ++it) {
        auto dr = frame(base, c, reduced);
        const auto& bp = dr.polynomial();
        cplx lam(0.0, w);
        cplx d = bp(lam, nu), dn = bp.deriv(0, 1, lam, nu);
        cplx dl = bp.deriv(1, 0, lam, nu), dln = bp.deriv(1, 1, lam, nu), dnn = bp.deriv(0, 2, lam, nu);
        cplx col[4][2] = {{cplx(0, 1) * dl, cplx(0, 1) * dln},
                          {dn, dnn},
                          {cplx(0, 1) * dn, cplx(0, 1) * dnn},
                          {-nu * dl, -dl - nu * dln}};
        Eigen::Matrix4d J;
        Eigen::Vector4d F(d.real(), d.imag(), dn.real(), dn.imag());
        for (int k = 0; k < 4; ++k) J.col(k) << col[k][0].real(), col[k][0].imag(), col[k][1].real(), col[k][1].imag();
        Eigen::JacobiSVD<Eigen::Matrix4d> svd(J, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-13);
        Eigen::Vector4d s = svd.solve(F);
        w -= s(0);
        nu -= cplx(s(1), s(2));
        c -= s(3);
        if (s.norm() < 1e-14 * (1.0 + std::abs(c) + std::abs(nu) + std::abs(w))) break;
    }
    auto drc = frame(base, c, reduced);
    DoubleRoot root = newton_double_root(drc, cplx(0.0, w), nu, opt.roots);
    auto [check, drcheck] = rightmost_impl(ComovingDispersion(base, c), opt);
    auto near = [&](const DoubleRoot& a, cplx l, cplx n) {
        return std::abs(a.lambda - l) + std::abs(a.nu - n) < 1e-5 * (1.0 + std::abs(l) + std::abs(n));
    };
    if (!near(check, root.lambda, root.nu) && !near(check, std::conj(root.lambda), std::conj(root.nu)))
        throw Error(ErrorKind::TrackingLost, "marginal root differs from the rightmost pinched root at c_lin");
    root.pinched = check.pinched;
    if (root.lambda.imag() < 0.0) {
        root.lambda = std::conj(root.lambda);
        root.nu = std::conj(root.nu);
    }
    sr.c_lin = c;
    sr.omega_lin = root.lambda.imag();
    sr.nu_lin = root.nu;
    sr.eta_lin = -root.nu.real();
    sr.k_lin = root.nu.imag();
    sr.source_root = root;
    try {
        auto e = effective_diffusivity(drc, root, opt.roots);
        sr.d_eff = e.d_eff;
        sr.d_eff_well_posed = e.well_posed;
    } catch (const Error&) {
        sr.d_eff = cplx(std::nan(""), std::nan(""));
    }
    const double dc = 4e-9;
    try {
        auto a = newton_double_root(frame(base, c - dc, reduced), root.lambda, root.nu, opt.roots);
        auto b = newton_double_root(frame(base, c + dc, reduced), root.lambda, root.nu, opt.roots);
        sr.bracket_verified = a.lambda.real() > 0.0 && b.lambda.real() < 0.0;
    } catch (const Error&) {
        sr.bracket_verified = false;
    }
    sr.final_bracket = {c - dc, c + dc};
    return sr;
}

GroupVelocitySeed group_velocity_seed(const MatrixPolynomial& base) {
    const int m2 = base.order();
    const double lead = std::max(base.coeff(m2).norm(), 1e-300);
    double rho = 1.0;
    for (int j = 0; j < m2; ++j) rho = std::max(rho, std::pow(base.coeff(j).norm() / lead, 1.0 / (m2 - j)));
    rho = std::max(rho, std::pow(base.linearization().norm() / lead, 1.0 / m2));
    const double K = 10.0 * rho;
    auto ks = linspace(-K, K, 4001);
    auto rows = kernels::spectrum_omp(base, 0.0, 0.0, ks);
    size_t bi = 0, bj = 0;
    double best = -1e300;
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j) {
            double re = rows[i][j].real();
            if (re > best + 1e-12 || (std::abs(re - best) <= 1e-12 && ks[i] > ks[bi])) best = re, bi = i, bj = j;
        }
    if (best <= 0.0) throw Error(ErrorKind::StableState, "essential spectrum is stable at c = 0");
    // Follow the branch through the eigenvalue closest to a reference value.
    auto branch = [&](double k, cplx ref) {
        Eigen::ComplexEigenSolver<CMat> es(base.comoving_matrix(cplx(0.0, k), 0.0), false);
        cplx out = es.eigenvalues()[0];
        for (int i = 1; i < es.eigenvalues().size(); ++i)
            if (std::abs(es.eigenvalues()[i] - ref) < std::abs(out - ref)) out = es.eigenvalues()[i];
        return out;
    };
    cplx ref = rows[bi][bj];
    double a = ks[bi > 0 ? bi - 1 : bi], b = ks[bi + 1 < ks.size() ? bi + 1 : bi];
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        if (branch(x1, ref).real() > branch(x2, ref).real()) b = x2;
        else a = x1;
    }
    const double kstar = 0.5 * (a + b);
    const cplx lk = branch(kstar, ref);
    const double h = 1e-5;
    cplx dlk = (branch(kstar + h, lk) - branch(kstar - h, lk)) / (2.0 * h);
    GroupVelocitySeed s;
    s.c0 = -dlk.imag();
    s.k_star = kstar;
    ComovingDispersion dr(base, s.c0);
    cplx nu(0.0, kstar);
    cplx lam = lk + s.c0 * nu;
    try {
        s.root = newton_double_root(dr, lam, nu);
    } catch (const Error&) {
        s.root.lambda = lam;
        s.root.nu = nu;
        std::tie(s.root.res_d, s.root.res_dnu) = double_root_residuals(dr, lam, nu);
        s.root.classification = classify_double_root(dr, s.root);
    }
    return s;
}

std::vector<MarginalCandidate> scalar_marginal_system(const MatrixPolynomial& base) {
    if (base.dim() != 1) throw Error(ErrorKind::InvalidArgument, "scalar_marginal_system needs N = 1");
    std::vector<cplx> S(base.order() + 1);
    for (int j = 0; j <= base.order(); ++j) S[j] = base.coeff(j)(0, 0);
    S[0] += base.linearization()(0, 0);
    std::vector<cplx> S1(S.size() - 1), S2(S.size() > 2 ? S.size() - 2 : 1, 0.0);
    for (size_t j = 1; j < S.size(); ++j) S1[j - 1] = double(j) * S[j];
    for (size_t j = 1; j < S1.size(); ++j) S2[j - 1] = double(j) * S1[j];
    auto ev = [](const std::vector<cplx>& a, cplx x) { return poly::eval(a, x); };
    auto G = [&](cplx nu) { return ev(S1, nu) - ev(S, nu).real() / nu.real(); };
    std::vector<MarginalCandidate> out;
    for (double r0 : linspace(-4.0, -0.02, 20))
        for (double i0 : linspace(0.0, 4.0, 20)) {
            cplx nu(r0, i0);
            bool conv = false;
            for (int it = 0; it < 60; ++it) {
                cplx g = G(nu);
                if (!std::isfinite(std::abs(g))) break;
                if (std::abs(g) < 1e-13 * (1.0 + std::abs(ev(S1, nu)))) {
                    conv = true;
                    break;
                }
                double vr = nu.real();
                cplx s1 = ev(S1, nu), s2 = ev(S2, nu), s0 = ev(S, nu);
                cplx dr_ = s2 - (s1.real() * vr - s0.real()) / (vr * vr);
                cplx di_ = cplx(0, 1) * s2 + s1.imag() / vr;
                Eigen::Matrix2d J;
                J << dr_.real(), di_.real(), dr_.imag(), di_.imag();
                Eigen::Vector2d step = J.fullPivLu().solve(Eigen::Vector2d(g.real(), g.imag()));
                if (!step.allFinite()) break;
                nu -= cplx(step(0), step(1));
            }
            if (!conv || std::abs(nu.real()) < 1e-8 || nu.real() > 0.0) continue;
            MarginalCandidate m;
            m.c = -ev(S1, nu).real();
            cplx lam = ev(S, nu) + m.c * nu;
            if (std::abs(lam.real()) > 1e-8 * (1.0 + std::abs(lam))) continue;
            m.omega = lam.imag();
            m.nu = nu;
            if (m.omega < 0.0) {
                m.omega = -m.omega;
                m.nu = std::conj(m.nu);
            }
            bool dup = false;
            for (const auto& o : out)
                if (std::abs(o.nu - m.nu) < 1e-8 * (1.0 + std::abs(m.nu)) && std::abs(o.c - m.c) < 1e-8) dup = true;
            if (!dup) out.push_back(m);
        }
    if (out.empty()) throw Error(ErrorKind::NoSolutions, "scalar marginal system has no solution with Re nu < 0");
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.c > b.c; });
    return out;
}

WavenumberPrediction wavenumber_predictions(const SpreadingResult& sr) {
    WavenumberPrediction w;
    w.k_lin = sr.k_lin;
    w.k_node = sr.omega_lin == 0.0 ? 0.0 : sr.omega_lin / sr.c_lin;
    return w;
}

double weighted_max(const ComovingDispersion& dr, double eta, std::span<const double> k_grid) {
    return essential_spectrum(dr, eta, k_grid).max_re;
}

}  // namespace frontlab
