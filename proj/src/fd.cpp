#include "frontlab/fd.hpp"

#include <cmath>
#include <vector>

#include "frontlab/error.hpp"

namespace frontlab::fd {

Mat fornberg(double x0, std::span<const double> xs, int m) {
    const int n = static_cast<int>(xs.size());
    Mat c = Mat::Zero(m + 1, n);
    double c1 = 1.0, c4 = xs[0] - x0;
    c(0, 0) = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, m);
        double c2 = 1.0, c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
                c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
            }
            for (int k = mn; k >= 1; --k) c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
            c(0, j) = c4 * c(0, j) / c3;
        }
        c1 = c2;
    }
    return c;
}

Grid make_grid(double L, int n, Side left, Side right, int accuracy) {
    if (n < 8 || !(L > 0)) throw Error(ErrorKind::InvalidArgument, "grid needs n >= 8 and L > 0");
    if ((left == Side::Periodic) != (right == Side::Periodic))
        throw Error(ErrorKind::InvalidArgument, "periodic boundaries must be paired");
    Grid g;
    g.n = n;
    g.left = left;
    g.right = right;
    g.accuracy = accuracy;
    g.h = right == Side::Periodic ? L / n : L / (n - 1);
    return g;
}

namespace {

/// Maps a stencil index outside [0, n) to an interior node and sign via the boundary rule.
std::pair<int, double> fold(const Grid& g, int k) {
    const int n = g.n;
    if (k >= 0 && k < n) return {k, 1.0};
    if (g.left == Side::Periodic) return {((k % n) + n) % n, 1.0};
    if (k < 0) return {-k, g.left == Side::Even ? 1.0 : -1.0};
    int r = 2 * (n - 1) - k;
    return {r, g.right == Side::Even ? 1.0 : -1.0};
}

}  // namespace

SpMat derivative(const Grid& g, int j) {
    const int n = g.n;
    const int p = g.accuracy;
    const int r = (j + p - 1) / 2;
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> offs;
    double scale = std::pow(g.h, -j);
    for (int i = 0; i < n; ++i) {
        int lo = i - r, hi = i + r;
        if (g.left == Side::OneSided && lo < 0) {
            lo = 0;
            hi = std::max(hi, j + p - 1);
        }
        if (g.right == Side::OneSided && hi > n - 1) {
            hi = n - 1;
            lo = std::min(lo, n - j - p);
        }
        offs.clear();
        for (int k = lo; k <= hi; ++k) offs.push_back(static_cast<double>(k - i));
        Mat w = fornberg(0.0, offs, j);
        for (int k = lo; k <= hi; ++k) {
            auto [col, sgn] = fold(g, k);
            double v = sgn * w(j, k - lo) * scale;
            if (v != 0.0) trip.emplace_back(i, col, v);
        }
    }
    SpMat D(n, n);
    D.setFromTriplets(trip.begin(), trip.end());
    return D;
}

SpMat kron_nodes(const SpMat& A, int N) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
            for (int c = 0; c < N; ++c) trip.emplace_back(it.row() * N + c, it.col() * N + c, it.value());
    SpMat out(A.rows() * N, A.cols() * N);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

SpMat assemble(const Grid& g, const std::vector<Mat>& coeffs) {
    const int N = static_cast<int>(coeffs.at(0).rows());
    std::vector<Eigen::Triplet<double>> trip;
    for (int j = 0; j < static_cast<int>(coeffs.size()); ++j) {
        const Mat& P = coeffs[j];
        if (P.norm() == 0.0) continue;
        SpMat D = j == 0 ? SpMat() : derivative(g, j);
        if (j == 0) {
            for (int i = 0; i < g.n; ++i)
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b)
                        if (P(a, b) != 0.0) trip.emplace_back(i * N + a, i * N + b, P(a, b));
            continue;
        }
        for (int k = 0; k < D.outerSize(); ++k)
            for (SpMat::InnerIterator it(D, k); it; ++it)
                for (int a = 0; a < N; ++a)
                    for (int b = 0; b < N; ++b)
                        if (P(a, b) != 0.0)
                            trip.emplace_back(it.row() * N + a, it.col() * N + b, P(a, b) * it.value());
    }
    SpMat out(g.n * N, g.n * N);
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

}  // namespace frontlab::fd
