#include "frontlab/poly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "frontlab/error.hpp"

namespace frontlab {
namespace poly {

cplx eval(std::span<const cplx> a, cplx x) {
    cplx p = 0.0;
    for (size_t j = a.size(); j-- > 0;) p = p * x + a[j];
    return p;
}

void eval_d(std::span<const cplx> a, cplx x, cplx& p, cplx& dp) {
    p = 0.0;
    dp = 0.0;
    for (size_t j = a.size(); j-- > 0;) {
        dp = dp * x + p;
        p = p * x + a[j];
    }
}

int effective_degree(std::span<const cplx> a, double rel_tol) {
    double m = 0.0;
    for (auto v : a) m = std::max(m, std::abs(v));
    if (m == 0.0) return -1;
    for (int j = static_cast<int>(a.size()) - 1; j >= 0; --j)
        if (std::abs(a[j]) > rel_tol * m) return j;
    return -1;
}

std::vector<cplx> roots(std::span<const cplx> a, int degree, int polish_steps) {
    if (degree < 0 || degree >= static_cast<int>(a.size()) || a[degree] == 0.0)
        throw Error(ErrorKind::InvalidArgument, "poly::roots: bad degree");
    std::vector<cplx> r;
    if (degree == 0) return r;
    const cplx lead = a[degree];
    // Scale the variable so the coefficients are balanced: x = s*y.
    double s = 0.0;
    for (int j = 0; j < degree; ++j)
        if (a[j] != 0.0) s = std::max(s, std::pow(std::abs(a[j] / lead), 1.0 / (degree - j)));
    if (s == 0.0) s = 1.0;
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(degree, degree);
    for (int j = 0; j < degree; ++j) C(0, j) = -a[degree - 1 - j] / lead / std::pow(s, j + 1);
    for (int j = 1; j < degree; ++j) C(j, j - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::NoConvergence, "companion eigenvalues");
    r.resize(degree);
    for (int j = 0; j < degree; ++j) r[j] = es.eigenvalues()[j] * s;
    std::span<const cplx> aa(a.data(), degree + 1);
    for (auto& x : r) {
        for (int it = 0; it < polish_steps; ++it) {
            cplx p, dp;
            eval_d(aa, x, p, dp);
            if (dp == 0.0) break;
            cplx step = p / dp;
            cplx xn = x - step;
            cplx pn, dpn;
            eval_d(aa, xn, pn, dpn);
            if (std::abs(pn) < std::abs(p)) x = xn;
            else break;
        }
    }
    return r;
}

std::vector<cplx> circle_nodes(int count, double radius, double phase) {
    std::vector<cplx> z(count);
    for (int j = 0; j < count; ++j)
        z[j] = std::polar(radius, (2.0 * std::numbers::pi * j + phase) / count);
    return z;
}

std::vector<cplx> interpolate_circle(std::span<const cplx> values, double radius, double phase) {
    const int n = static_cast<int>(values.size());
    std::vector<cplx> c(n, 0.0);
    for (int k = 0; k < n; ++k) {
        cplx s = 0.0;
        for (int j = 0; j < n; ++j)
            s += values[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(j) * k / n);
        c[k] = s / double(n) * std::polar(std::pow(radius, -k), -phase * k / n);
    }
    return c;
}

}  // namespace poly

BivariatePolynomial::BivariatePolynomial(int deg_lambda, int deg_nu)
    : dl_(deg_lambda), dn_(deg_nu), c_(static_cast<size_t>(deg_lambda + 1) * (deg_nu + 1), 0.0) {}

namespace {
// falling factorial n(n-1)...(n-p+1)
double falling(int n, int p) {
    double f = 1.0;
    for (int k = 0; k < p; ++k) f *= (n - k);
    return f;
}
}  // namespace

cplx BivariatePolynomial::deriv(int p, int q, cplx lam, cplx nu) const {
    cplx total = 0.0;
    for (int i = dl_; i >= p; --i) {
        cplx row = 0.0;
        for (int j = dn_; j >= q; --j) row = row * nu + at(i, j) * falling(j, q);
        total = total * lam + row * falling(i, p);
    }
    return total;
}

std::vector<cplx> BivariatePolynomial::nu_coefficients(cplx lam) const {
    std::vector<cplx> a(dn_ + 1, 0.0);
    for (int j = 0; j <= dn_; ++j) {
        cplx s = 0.0;
        for (int i = dl_; i >= 0; --i) s = s * lam + at(i, j);
        a[j] = s;
    }
    return a;
}

std::vector<cplx> BivariatePolynomial::lambda_coefficients(cplx nu) const {
    std::vector<cplx> a(dl_ + 1, 0.0);
    for (int i = 0; i <= dl_; ++i) {
        cplx s = 0.0;
        for (int j = dn_; j >= 0; --j) s = s * nu + at(i, j);
        a[i] = s;
    }
    return a;
}

double BivariatePolynomial::magnitude(cplx lam, cplx nu) const {
    double total = 0.0, al = std::abs(lam), an = std::abs(nu);
    for (int i = dl_; i >= 0; --i) {
        double row = 0.0;
        for (int j = dn_; j >= 0; --j) row = row * an + std::abs(at(i, j));
        total = total * al + row;
    }
    return total;
}

void BivariatePolynomial::trim(double rel_tol) {
    double m = 0.0;
    for (auto v : c_) m = std::max(m, std::abs(v));
    for (auto& v : c_)
        if (std::abs(v) <= rel_tol * m) v = 0.0;
    int dl = 0, dn = 0;
    for (int i = 0; i <= dl_; ++i)
        for (int j = 0; j <= dn_; ++j)
            if (at(i, j) != 0.0) {
                dl = std::max(dl, i);
                dn = std::max(dn, j);
            }
    BivariatePolynomial t(dl, dn);
    for (int i = 0; i <= dl; ++i)
        for (int j = 0; j <= dn; ++j) t.at(i, j) = at(i, j);
    *this = std::move(t);
}

}  // namespace frontlab
