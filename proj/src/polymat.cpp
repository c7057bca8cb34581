#include "frontlab/polymat.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "frontlab/error.hpp"
#include "frontlab/kernels.hpp"

namespace frontlab {

MatrixPolynomial::MatrixPolynomial(std::vector<Mat> coeffs, Mat J) : coeffs_(std::move(coeffs)), J_(std::move(J)) {
    const int n = static_cast<int>(J_.rows());
    if (n < 1 || J_.cols() != n) throw Error(ErrorKind::InvalidArgument, "J must be square and nonempty");
    const int order = static_cast<int>(coeffs_.size()) - 1;
    if (order < 2 || order % 2 != 0)
        throw Error(ErrorKind::InvalidArgument, "symbol order must be even and at least 2");
    for (const auto& P : coeffs_)
        if (P.rows() != n || P.cols() != n) throw Error(ErrorKind::InvalidArgument, "coefficient shape mismatch");
}

CMat MatrixPolynomial::symbol(cplx nu) const {
    const int n = dim();
    CMat S = CMat::Zero(n, n);
    for (int j = order(); j >= 0; --j) S = S * nu + coeffs_[j].cast<cplx>();
    return S;
}

CMat MatrixPolynomial::comoving_matrix(cplx nu, double c) const {
    CMat S = symbol(nu) + J_.cast<cplx>();
    S.diagonal().array() += c * nu;
    return S;
}

MatrixPolynomial MatrixPolynomial::reflected() const {
    auto cs = coeffs_;
    for (size_t j = 1; j < cs.size(); j += 2) cs[j] = -cs[j];
    return MatrixPolynomial(cs, J_);
}

bool MatrixPolynomial::is_even() const {
    for (size_t j = 1; j < coeffs_.size(); j += 2)
        if (coeffs_[j].cwiseAbs().maxCoeff() != 0.0) return false;
    return true;
}

WellPosedness check_well_posedness(const MatrixPolynomial& p) {
    WellPosedness w;
    const int m2 = p.order();
    const double lead = p.coeff(m2).norm();
    double rho = 1.0;
    if (lead > 0.0) {
        for (int j = 0; j < m2; ++j)
            rho = std::max(rho, std::pow(p.coeff(j).norm() / lead, 1.0 / (m2 - j)));
        rho = std::max(rho, std::pow(p.linearization().norm() / lead, 1.0 / m2));
    }
    w.K = 10.0 * rho;
    // Leading symbol (ik)^{2m} P_2m = (−1)^m k^{2m} P_2m.
    Mat L = (m2 / 2 % 2 == 0 ? 1.0 : -1.0) * p.coeff(m2);
    Eigen::EigenSolver<Mat> es(L, false);
    double top = -1e300;
    for (int i = 0; i < L.rows(); ++i) top = std::max(top, es.eigenvalues()[i].real());
    w.delta = -top;
    w.leading_singular = std::abs(p.coeff(m2).determinant()) < 1e-14 * std::max(1.0, std::pow(lead, p.dim()));
    auto max_re_at = [&](double k) {
        Eigen::ComplexEigenSolver<CMat> ce(p.comoving_matrix(cplx(0.0, k), 0.0), false);
        double r = -1e300;
        for (int i = 0; i < p.dim(); ++i) r = std::max(r, ce.eigenvalues()[i].real());
        return r;
    };
    w.max_re = -1e300;
    for (double k : linspace(-w.K, w.K, 801)) w.max_re = std::max(w.max_re, max_re_at(k));
    w.ok = w.delta > 0.0 && std::isfinite(w.max_re);
    if (w.ok) {
        for (double k : linspace(w.K, 3.0 * w.K, 41)) {
            double bound = w.max_re - 0.5 * w.delta * (std::pow(k, m2) - std::pow(w.K, m2));
            if (max_re_at(k) > bound + 1e-9 * std::pow(k, m2)) w.ok = false;
        }
    }
    return w;
}

namespace {

constexpr double kPhaseLambda = 0.4142;
constexpr double kPhaseNu = 0.7321;

cplx det_at(const MatrixPolynomial& p, double c, cplx lam, cplx nu) {
    CMat M = p.comoving_matrix(nu, c);
    M.diagonal().array() -= lam;
    if (M.rows() == 1) return M(0, 0);
    if (M.rows() == 2) return M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    return M.partialPivLu().determinant();
}

BivariatePolynomial interpolate_bivariate(int dl, int dn, const std::function<std::vector<cplx>(cplx)>& nu_values) {
    auto lam_nodes = poly::circle_nodes(dl + 1, 1.0, kPhaseLambda);
    std::vector<std::vector<cplx>> per_lam(dl + 1);
    for (int p = 0; p <= dl; ++p) per_lam[p] = poly::interpolate_circle(nu_values(lam_nodes[p]), 1.0, kPhaseNu);
    BivariatePolynomial bp(dl, dn);
    std::vector<cplx> col(dl + 1);
    for (int j = 0; j <= dn; ++j) {
        for (int p = 0; p <= dl; ++p) col[p] = per_lam[p][j];
        auto cj = poly::interpolate_circle(col, 1.0, kPhaseLambda);
        for (int i = 0; i <= dl; ++i) bp.at(i, j) = cj[i];
    }
    return bp;
}

}  // namespace

ComovingDispersion::ComovingDispersion(const MatrixPolynomial& base, double c) : base_(base), c_(c) {
    const int N = base_.dim();
    const int dn = base_.order() * N;
    auto nu_nodes = poly::circle_nodes(dn + 1, 1.0, kPhaseNu);
    poly_ = interpolate_bivariate(N, dn, [&](cplx lam) {
        std::vector<cplx> v(dn + 1);
        for (int q = 0; q <= dn; ++q) v[q] = det_at(base_, c_, lam, nu_nodes[q]);
        return v;
    });
    poly_.trim(1e-13);
}

cplx eval_dispersion(const ComovingDispersion& dr, cplx lam, cplx nu) {
    return det_at(dr.base(), dr.speed(), lam, nu);
}

std::vector<cplx> nu_roots(const ComovingDispersion& dr, cplx lam) {
    const auto& bp = dr.polynomial();
    auto a = bp.nu_coefficients(lam);
    int deg = poly::effective_degree(a, 1e-14);
    if (deg < bp.deg_nu())
        throw Error(ErrorKind::DegenerateLeadingCoefficient,
                    "nu-degree drops to " + std::to_string(deg) + " at this lambda");
    return poly::roots(a, deg);
}

ComovingDispersion ComovingDispersion::squarefree() const {
    const int dn = poly_.deg_nu();
    const int dl = poly_.deg_lambda();
    auto lam_nodes = poly::circle_nodes(dl + 1, 1.0, kPhaseLambda);
    // Cluster the roots at each node; representatives define the square-free factor.
    std::vector<std::vector<cplx>> reps(dl + 1);
    std::map<int, int> count_votes;
    for (int p = 0; p <= dl; ++p) {
        auto r = nu_roots(*this, lam_nodes[p]);
        std::vector<bool> used(r.size(), false);
        for (size_t i = 0; i < r.size(); ++i) {
            if (used[i]) continue;
            cplx sum = r[i];
            int cnt = 1;
            used[i] = true;
            for (size_t j = i + 1; j < r.size(); ++j)
                if (!used[j] && std::abs(r[j] - r[i]) < 1e-5 * (1.0 + std::abs(r[i]))) {
                    used[j] = true;
                    sum += r[j];
                    ++cnt;
                }
            cplx rep = sum / double(cnt);
            if (cnt > 1) {
                // A cnt-fold root is a simple root of the (cnt−1)-th derivative.
                std::vector<cplx> a = poly_.nu_coefficients(lam_nodes[p]);
                for (int k = 1; k < cnt; ++k) {
                    std::vector<cplx> da(a.size() > 1 ? a.size() - 1 : 1, 0.0);
                    for (size_t j = 1; j < a.size(); ++j) da[j - 1] = double(j) * a[j];
                    a = da;
                }
                for (int it = 0; it < 4; ++it) {
                    cplx v, dv;
                    poly::eval_d(a, rep, v, dv);
                    if (dv == 0.0) break;
                    rep -= v / dv;
                }
            }
            reps[p].push_back(rep);
        }
        count_votes[static_cast<int>(reps[p].size())]++;
    }
    int ns = 0, best = -1;
    for (auto [n, v] : count_votes)
        if (v > best) best = v, ns = n;
    if (ns == dn) return *this;
    auto nu_nodes = poly::circle_nodes(ns + 1, 1.0, kPhaseNu);
    ComovingDispersion out = *this;
    int node = 0;
    out.poly_ = interpolate_bivariate(dl, ns, [&](cplx) {
        const auto& rp = reps[node++];
        std::vector<cplx> v(ns + 1);
        for (int q = 0; q <= ns; ++q) {
            cplx prod = 1.0;
            for (size_t i = 0; i < rp.size() && i < static_cast<size_t>(ns); ++i) prod *= nu_nodes[q] - rp[i];
            v[q] = prod;
        }
        return v;
    });
    out.poly_.trim(1e-11);
    out.reduced_ = true;
    return out;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> x(std::max(n, 0));
    if (n == 1) x[0] = a;
    for (int i = 0; i < n && n > 1; ++i) x[i] = a + (b - a) * i / (n - 1);
    return x;
}

SpectrumCurve essential_spectrum(const ComovingDispersion& dr, double eta, std::span<const double> k_grid) {
    SpectrumCurve sc;
    sc.weight_eta = eta;
    auto rows = kernels::spectrum_omp(dr.base(), dr.speed(), eta, k_grid);
    sc.max_re = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rows.size(); ++i) {
        auto& row = rows[i];
        if (i > 0) {
            // Greedy continuity matching against the previous sample.
            const auto& prev = sc.samples.back().lambdas;
            std::vector<cplx> ordered(row.size());
            std::vector<bool> taken(row.size(), false);
            for (size_t a = 0; a < prev.size(); ++a) {
                size_t best = 0;
                double bd = 1e300;
                for (size_t b = 0; b < row.size(); ++b)
                    if (!taken[b] && std::abs(row[b] - prev[a]) < bd) bd = std::abs(row[b] - prev[a]), best = b;
                taken[best] = true;
                ordered[a] = row[best];
            }
            row = ordered;
        }
        for (auto l : row) sc.max_re = std::max(sc.max_re, l.real());
        sc.samples.push_back({k_grid[i], row});
    }
    return sc;
}

}  // namespace frontlab
