#pragma once

#include <complex>
#include <span>
#include <vector>

namespace frontlab {

using cplx = std::complex<double>;

/// Univariate polynomial helpers; coefficients are stored lowest degree first.
namespace poly {

cplx eval(std::span<const cplx> a, cplx x);

/// Value and first derivative by Horner.
void eval_d(std::span<const cplx> a, cplx x, cplx& p, cplx& dp);

/// Highest index with |a_j| > rel_tol * max|a|; -1 for the zero polynomial.
int effective_degree(std::span<const cplx> a, double rel_tol);

/// All roots of a nonzero polynomial of the given degree: companion eigenvalues + Newton polish.
std::vector<cplx> roots(std::span<const cplx> a, int degree, int polish_steps = 3);

/// Coefficients of the degree-n polynomial whose values at radius*exp(i(2πj+phase)/(n+1)) are given.
std::vector<cplx> interpolate_circle(std::span<const cplx> values, double radius, double phase);

/// Interpolation nodes matching interpolate_circle.
std::vector<cplx> circle_nodes(int count, double radius, double phase);

}  // namespace poly

/// Dense bivariate polynomial sum c_ij λ^i ν^j.
class BivariatePolynomial {
public:
    BivariatePolynomial() = default;
    BivariatePolynomial(int deg_lambda, int deg_nu);

    int deg_lambda() const { return dl_; }
    int deg_nu() const { return dn_; }
    cplx& at(int i, int j) { return c_[static_cast<size_t>(i) * (dn_ + 1) + j]; }
    cplx at(int i, int j) const { return c_[static_cast<size_t>(i) * (dn_ + 1) + j]; }

    /// ∂λ^p ∂ν^q evaluated at (lam, nu).
    cplx deriv(int p, int q, cplx lam, cplx nu) const;
    cplx operator()(cplx lam, cplx nu) const { return deriv(0, 0, lam, nu); }

    /// Coefficients in ν of d(lam, ·).
    std::vector<cplx> nu_coefficients(cplx lam) const;
    /// Coefficients in λ of d(·, nu).
    std::vector<cplx> lambda_coefficients(cplx nu) const;

    /// Sum of |c_ij| |λ|^i |ν|^j, used to scale residuals.
    double magnitude(cplx lam, cplx nu) const;

    /// Trims trailing zero rows/columns relative to rel_tol * max|c|.
    void trim(double rel_tol);

private:
    int dl_ = 0, dn_ = 0;
    std::vector<cplx> c_;
};

}  // namespace frontlab
