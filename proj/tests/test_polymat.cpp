#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "frontlab/polymat.hpp"

using namespace frontlab;

namespace {

MatrixPolynomial scalar(std::vector<double> c, double J) {
    std::vector<Mat> cs;
    for (double x : c) cs.push_back(Mat::Constant(1, 1, x));
    return MatrixPolynomial(cs, Mat::Constant(1, 1, J));
}

MatrixPolynomial random_system(std::mt19937& rng, int N, int order) {
    std::normal_distribution<double> g;
    std::vector<Mat> cs;
    for (int j = 0; j <= order; ++j) {
        Mat m(N, N);
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) m(r, c) = g(rng);
        cs.push_back(m);
    }
    // keep the leading coefficient well conditioned and dissipative
    cs.back() = (order % 4 == 2 ? 1.0 : -1.0) * (Mat::Identity(N, N) + 0.2 * cs.back());
    Mat J(N, N);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < N; ++c) J(r, c) = g(rng);
    return MatrixPolynomial(cs, J);
}

}  // namespace

TEST_CASE("poly roots reproduce the coefficients") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int trial = 0; trial < 50; ++trial) {
        int deg = 1 + trial % 8;
        std::vector<cplx> z(deg);
        for (auto& x : z) x = {u(rng), u(rng)};
        std::vector<cplx> a{1.0};
        for (cplx r : z) {
            std::vector<cplx> b(a.size() + 1, 0.0);
            for (size_t i = 0; i < a.size(); ++i) {
                b[i + 1] += a[i];
                b[i] -= r * a[i];
            }
            a = b;
        }
        auto found = poly::roots(a, deg);
        REQUIRE(found.size() == static_cast<size_t>(deg));
        for (cplx r : z) {
            double best = 1e300;
            for (cplx f : found) best = std::min(best, std::abs(f - r));
            CHECK(best < 1e-7);
        }
    }
}

TEST_CASE("circle interpolation inverts sampling") {
    std::mt19937 rng(11);
    std::normal_distribution<double> g;
    std::vector<cplx> a(7);
    for (auto& x : a) x = {g(rng), g(rng)};
    auto nodes = poly::circle_nodes(7, 1.7, 0.3);
    std::vector<cplx> vals;
    for (cplx z : nodes) vals.push_back(poly::eval(a, z));
    auto back = poly::interpolate_circle(vals, 1.7, 0.3);
    for (size_t i = 0; i < a.size(); ++i) CHECK(std::abs(back[i] - a[i]) < 1e-12);
}

TEST_CASE("dispersion polynomial equals the determinant at random points") {
    std::mt19937 rng(2024);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 20; ++trial) {
        int N = 1 + trial % 3;
        int order = trial % 2 ? 4 : 2;
        MatrixPolynomial p = random_system(rng, N, order);
        double c = g(rng);
        ComovingDispersion dr(p, c);
        for (int k = 0; k < 5; ++k) {
            cplx lam{g(rng), g(rng)}, nu{g(rng), g(rng)};
            CMat M = p.comoving_matrix(nu, c) - lam * CMat::Identity(N, N);
            cplx det = M.determinant();
            CHECK(std::abs(eval_dispersion(dr, lam, nu) - det) < 1e-9 * (1 + std::abs(det)));
        }
    }
}

TEST_CASE("comoving matrix of FKPP") {
    MatrixPolynomial p = scalar({0, 0, 1}, 1);
    cplx nu{-0.3, 0.7};
    CHECK(std::abs(p.comoving_matrix(nu, 2.0)(0, 0) - (nu * nu + 2.0 * nu + 1.0)) < 1e-14);
    CHECK(p.is_even());
    CHECK(p.order() == 2);
}

TEST_CASE("reflection maps P(nu) to P(-nu)") {
    std::mt19937 rng(5);
    MatrixPolynomial p = random_system(rng, 2, 4);
    MatrixPolynomial r = p.reflected();
    cplx nu{0.4, -1.1};
    CHECK((r.symbol(nu) - p.symbol(-nu)).norm() < 1e-12);
}

TEST_CASE("essential spectrum of FKPP in a weight") {
    MatrixPolynomial p = scalar({0, 0, 1}, 1);
    double c = 3, eta = 1.5;
    ComovingDispersion dr(p, c);
    auto ks = linspace(-4, 4, 81);
    SpectrumCurve curve = essential_spectrum(dr, eta, ks);
    REQUIRE(curve.samples.size() == ks.size());
    double mx = -1e300;
    for (const auto& s : curve.samples) {
        cplx nu{-eta, s.k};
        cplx expect = nu * nu + c * nu + 1.0;
        REQUIRE(s.lambdas.size() == 1);
        CHECK(std::abs(s.lambdas[0] - expect) < 1e-10);
        mx = std::max(mx, expect.real());
    }
    CHECK(curve.max_re == doctest::Approx(mx).epsilon(1e-12));
    CHECK(curve.max_re == doctest::Approx(1 + eta * eta - c * eta));
}

TEST_CASE("well-posedness of dissipative and anti-dissipative symbols") {
    CHECK(check_well_posedness(scalar({0, 0, 1}, 1)).ok);
    CHECK(check_well_posedness(scalar({-0.84, 0, -2, 0, -1}, 0)).ok);
    CHECK_FALSE(check_well_posedness(scalar({0, 0, -1}, 1)).ok);
}

TEST_CASE("square-free reduction of a doubled factor") {
    Mat Z = Mat::Zero(2, 2);
    MatrixPolynomial p({Z, Z, Mat::Identity(2, 2)}, Mat::Identity(2, 2));
    ComovingDispersion dr(p, 2.0);
    ComovingDispersion sq = dr.squarefree();
    CHECK(sq.reduced());
    CHECK(sq.generic_nu_degree() == 2);
}

TEST_CASE("linspace") {
    auto v = linspace(-1, 3, 5);
    REQUIRE(v.size() == 5);
    CHECK(v.front() == -1);
    CHECK(v.back() == 3);
    CHECK(v[2] == doctest::Approx(1));
}
