#include "frontlab/kernels.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace frontlab::kernels {

namespace {
std::vector<cplx> spectrum_row(const MatrixPolynomial& p, double c, double eta, double k) {
    CMat M = p.comoving_matrix(cplx(-eta, k), c);
    Eigen::ComplexEigenSolver<CMat> es(M, false);
    std::vector<cplx> row(M.rows());
    for (int i = 0; i < M.rows(); ++i) row[i] = es.eigenvalues()[i];
    return row;
}
}  // namespace

SpectrumRows spectrum_serial(const MatrixPolynomial& p, double c, double eta, std::span<const double> ks) {
    SpectrumRows rows(ks.size());
    for (size_t i = 0; i < ks.size(); ++i) rows[i] = spectrum_row(p, c, eta, ks[i]);
    return rows;
}

SpectrumRows spectrum_omp(const MatrixPolynomial& p, double c, double eta, std::span<const double> ks) {
    SpectrumRows rows(ks.size());
    const long n = static_cast<long>(ks.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) rows[i] = spectrum_row(p, c, eta, ks[i]);
    return rows;
}

std::vector<double> map_serial(const std::function<double(double)>& g, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) out[i] = g(xs[i]);
    return out;
}

std::vector<double> map_omp(const std::function<double(double)>& g, std::span<const double> xs) {
    std::vector<double> out(xs.size());
    std::vector<std::exception_ptr> errs(xs.size());
    const long n = static_cast<long>(xs.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            out[i] = g(xs[i]);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    }
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
    return out;
}

void reaction_serial(const PointFn& f, const Mat& u, Mat& out) {
    out.resize(u.rows(), u.cols());
    for (long j = 0; j < u.cols(); ++j) f(u.col(j).data(), out.col(j).data());
}

void reaction_omp(const PointFn& f, const Mat& u, Mat& out) {
    out.resize(u.rows(), u.cols());
    const long n = u.cols();
#pragma omp parallel for schedule(static)
    for (long j = 0; j < n; ++j) f(u.col(j).data(), out.col(j).data());
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace frontlab::kernels
