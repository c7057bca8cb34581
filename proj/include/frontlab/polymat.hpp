#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "frontlab/poly.hpp"

namespace frontlab {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Symbol P(ν) = Σ P_j ν^j of order 2m together with the linearization J = f'(0).
class MatrixPolynomial {
public:
    MatrixPolynomial() = default;
    MatrixPolynomial(std::vector<Mat> coeffs, Mat J);

    int order() const { return static_cast<int>(coeffs_.size()) - 1; }
    int dim() const { return static_cast<int>(J_.rows()); }
    const std::vector<Mat>& coeffs() const { return coeffs_; }
    const Mat& coeff(int j) const { return coeffs_.at(j); }
    const Mat& linearization() const { return J_; }

    /// P(ν), without J.
    CMat symbol(cplx nu) const;
    /// P(ν) + cν + J.
    CMat comoving_matrix(cplx nu, double c) const;

    /// Symbol of the reflected system x ↦ −x.
    MatrixPolynomial reflected() const;
    bool is_even() const;

private:
    std::vector<Mat> coeffs_;
    Mat J_;
};

struct WellPosedness {
    double K = 0.0;
    double delta = 0.0;
    double max_re = 0.0;
    bool leading_singular = false;
    bool ok = false;
};

/// Sampled check that Re spec(P(ik)+J) is bounded and decays like −δk^{2m} for |k| ≥ K.
WellPosedness check_well_posedness(const MatrixPolynomial& p);

/// d_c(λ,ν) = det(P(ν)+cν+J−λ) with its interpolated bivariate coefficients.
class ComovingDispersion {
public:
    ComovingDispersion(const MatrixPolynomial& base, double c);

    const MatrixPolynomial& base() const { return base_; }
    double speed() const { return c_; }
    const BivariatePolynomial& polynomial() const { return poly_; }
    /// True when repeated factors have been divided out (see squarefree()).
    bool reduced() const { return reduced_; }
    /// ν-degree for generic λ; below 2mN when the leading coefficient is singular.
    int generic_nu_degree() const { return poly_.deg_nu(); }

    /// Copy whose polynomial is the square-free part in ν (repeated factors divided out).
    ComovingDispersion squarefree() const;

private:
    MatrixPolynomial base_;
    double c_ = 0.0;
    BivariatePolynomial poly_;
    bool reduced_ = false;
};

cplx eval_dispersion(const ComovingDispersion& dr, cplx lam, cplx nu);

/// Roots ν of d_c(λ, ·) with multiplicity.
std::vector<cplx> nu_roots(const ComovingDispersion& dr, cplx lam);

struct SpectrumSample {
    double k = 0.0;
    std::vector<cplx> lambdas;
};

struct SpectrumCurve {
    double weight_eta = 0.0;
    std::vector<SpectrumSample> samples;
    double max_re = 0.0;
};

SpectrumCurve essential_spectrum(const ComovingDispersion& dr, double eta,
                                 std::span<const double> k_grid);

/// Uniform grid of n points on [a, b].
std::vector<double> linspace(double a, double b, int n);

}  // namespace frontlab
