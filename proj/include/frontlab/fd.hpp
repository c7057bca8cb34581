#pragma once

#include <Eigen/Sparse>
#include <span>

#include "frontlab/models.hpp"

namespace frontlab::fd {

using SpMat = Eigen::SparseMatrix<double>;

/// Fornberg weights: row j holds the j-th derivative weights at x0 for nodes xs.
Mat fornberg(double x0, std::span<const double> xs, int max_deriv);

/// Treatment of one end of a uniform grid.
enum class Side {
    Even,      ///< reflection u(−x) = u(x): odd derivatives vanish
    Odd,       ///< reflection u(−x) = −u(x): even derivatives vanish, u = 0 at the end
    Periodic,
    OneSided,  ///< stencils shifted inside the domain
};

struct Grid {
    int n = 0;
    double h = 0.0;
    Side left = Side::Even;
    Side right = Side::Odd;
    int accuracy = 4;

    double x(int i) const { return i * h; }
    double length() const { return right == Side::Periodic ? n * h : (n - 1) * h; }
};

Grid make_grid(double L, int n, Side left, Side right, int accuracy = 4);

/// Scalar n×n matrix for d^j/dx^j.
SpMat derivative(const Grid& g, int j);

/// Block operator Σ_j P_j ⊗ D_j on node-major ordering (index i·N + component).
SpMat assemble(const Grid& g, const std::vector<Mat>& coeffs);

/// A ⊗ I_N acting on node-major ordering, for a scalar n×n operator A.
SpMat kron_nodes(const SpMat& A, int N);

}  // namespace frontlab::fd
