#pragma once

#include <functional>
#include <span>
#include <vector>

#include "frontlab/polymat.hpp"

namespace frontlab::kernels {

/// Eigenvalues of P(ik−η)+ck+J for each k; one entry per sample.
using SpectrumRows = std::vector<std::vector<cplx>>;
SpectrumRows spectrum_serial(const MatrixPolynomial& p, double c, double eta, std::span<const double> ks);
SpectrumRows spectrum_omp(const MatrixPolynomial& p, double c, double eta, std::span<const double> ks);

/// Evaluates g at every sample; used for c-scans and parameter sweeps.
std::vector<double> map_serial(const std::function<double(double)>& g, std::span<const double> xs);
std::vector<double> map_omp(const std::function<double(double)>& g, std::span<const double> xs);

/// Pointwise reaction term: out.col(j) = f(u.col(j)) for an N×n state.
using PointFn = std::function<void(const double* u, double* out)>;
void reaction_serial(const PointFn& f, const Mat& u, Mat& out);
void reaction_omp(const PointFn& f, const Mat& u, Mat& out);

/// Number of OpenMP threads in use (1 when built without OpenMP).
int max_threads();
void set_threads(int n);

}  // namespace frontlab::kernels
