#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "frontlab/doubleroot.hpp"
#include "frontlab/error.hpp"

using namespace frontlab;

namespace {

MatrixPolynomial scalar(std::vector<double> c, double J) {
    std::vector<Mat> cs;
    for (double x : c) cs.push_back(Mat::Constant(1, 1, x));
    return MatrixPolynomial(cs, Mat::Constant(1, 1, J));
}

MatrixPolynomial coupled_linear(double g, double d) {
    Mat Z = Mat::Zero(2, 2), P(2, 2), J(2, 2);
    P << 1 + d, 0, 0, 1 - d;
    J << 1 + g, 0, 0, 1 - g;
    return MatrixPolynomial({Z, Z, P}, J);
}

bool has_conjugate(const std::vector<DoubleRoot>& roots, const DoubleRoot& r, double tol) {
    for (const auto& s : roots)
        if (std::abs(s.lambda - std::conj(r.lambda)) < tol && std::abs(s.nu - std::conj(r.nu)) < tol) return true;
    return false;
}

}  // namespace

TEST_CASE("FKPP double root at c = 3") {
    ComovingDispersion dr(scalar({0, 0, 1}, 1), 3.0);
    auto roots = find_double_roots(dr);
    REQUIRE(roots.size() == 1);
    CHECK(std::abs(roots[0].lambda - cplx(1 - 9.0 / 4)) < 1e-10);
    CHECK(std::abs(roots[0].nu - cplx(-1.5)) < 1e-10);
    CHECK(roots[0].classification == RootClass::Simple);
    CHECK(check_pinching(dr, roots[0]).state == PinchState::Pinched);
    auto de = effective_diffusivity(dr, roots[0]);
    CHECK(std::abs(de.d_eff - 1.0) < 1e-10);
    CHECK(de.well_posed);
}

TEST_CASE("double-root sets of real systems are closed under conjugation") {
    std::mt19937 rng(31337);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 12; ++trial) {
        std::vector<Mat> cs;
        int N = 1 + trial % 2;
        for (int j = 0; j < 3; ++j) {
            Mat m(N, N);
            for (int r = 0; r < N; ++r)
                for (int c = 0; c < N; ++c) m(r, c) = u(rng);
            cs.push_back(m);
        }
        cs[2] = Mat::Identity(N, N) + 0.3 * cs[2];
        Mat J(N, N);
        for (int r = 0; r < N; ++r)
            for (int c = 0; c < N; ++c) J(r, c) = u(rng);
        ComovingDispersion dr(MatrixPolynomial(cs, J), 2 * u(rng));
        auto roots = find_double_roots(dr);
        for (const auto& r : roots) CHECK(has_conjugate(roots, r, 1e-6));
    }
}

TEST_CASE("fourth-order symbol has conjugate-closed roots at a random speed") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> ua(-2, 2), ub(-0.5, 0.5), uc(0.1, 3);
    for (int trial = 0; trial < 8; ++trial) {
        ComovingDispersion dr(scalar({ub(rng), 0, ua(rng), 0, -1}, 0), uc(rng));
        auto roots = find_double_roots(dr);
        CHECK(roots.size() >= 1);
        for (const auto& r : roots) CHECK(has_conjugate(roots, r, 1e-6));
    }
}

TEST_CASE("pinching verdict is stable under doubled tau_max and steps") {
    std::vector<ComovingDispersion> cases{
        ComovingDispersion(scalar({0, 0, 1}, 1), 2.0),
        ComovingDispersion(scalar({0.05, 0, 1, 0, -1}, 0), 0.3),
        ComovingDispersion(scalar({-0.84, 0, -2, 0, -1}, 0), 1.6),
        ComovingDispersion(coupled_linear(0.8, -0.9), 1.5),
    };
    for (const auto& dr : cases) {
        for (const auto& r : find_double_roots(dr)) {
            PinchOptions base;
            PinchOptions fine;
            fine.tau_max = 2e3 * (1 + std::abs(r.lambda));
            fine.n_steps = 2 * base.n_steps;
            auto a = check_pinching(dr, r, base);
            auto b = check_pinching(dr, r, fine);
            if (a.state != PinchState::Undetermined && b.state != PinchState::Undetermined)
                CHECK(a.state == b.state);
        }
    }
}

TEST_CASE("region-II real double root is not pinched") {
    double a = 1, b = 0.05;
    ComovingDispersion dr(scalar({b, 0, a, 0, -1}, 0), 2 / (3 * std::sqrt(6.0)) * (2 * a - std::sqrt(a * a - 12 * b)) *
                                                           std::sqrt(a + std::sqrt(a * a - 12 * b)));
    double nu2 = -std::sqrt(a + std::sqrt(a * a - 12 * b)) / std::sqrt(6.0);
    bool seen = false;
    for (const auto& r : find_double_roots(dr)) {
        if (std::abs(r.nu - nu2) < 1e-6 && std::abs(r.lambda) < 1e-6) {
            seen = true;
            CHECK(check_pinching(dr, r).state == PinchState::NotPinched);
        }
    }
    CHECK(seen);
}

TEST_CASE("coupled-mode cross root is a pinched double double root") {
    double g = 0.8, d = -0.9;
    double cddr = (g - d) / std::sqrt(-g * d);
    ComovingDispersion dr(coupled_linear(g, d), cddr);
    bool seen = false;
    for (const auto& r : find_double_roots(dr)) {
        if (r.classification != RootClass::DoubleDouble || std::abs(r.lambda) > 1e-6) continue;
        seen = true;
        CHECK(check_pinching(dr, r).state == PinchState::Pinched);
    }
    CHECK(seen);
}

TEST_CASE("newton refines a perturbed double root") {
    ComovingDispersion dr(scalar({0, 0, 1}, 1), 2.5);
    DoubleRoot r = newton_double_root(dr, {-0.5, 0.1}, {-1.1, 0.05});
    CHECK(std::abs(r.lambda - cplx(1 - 2.5 * 2.5 / 4)) < 1e-10);
    CHECK(std::abs(r.nu - cplx(-1.25)) < 1e-10);
    auto [rd, rdn] = double_root_residuals(dr, r.lambda, r.nu);
    CHECK(rd < 1e-12);
    CHECK(rdn < 1e-12);
}

TEST_CASE("continuation follows the FKPP root along c") {
    DispersionFamily fam = [](double c) { return ComovingDispersion(scalar({0, 0, 1}, 1), c); };
    ComovingDispersion d0 = fam(2.0);
    auto start = find_double_roots(d0).at(0);
    std::vector<double> path{2.0, 2.2, 2.4, 2.6};
    auto branch = continue_double_root(fam, start, path);
    REQUIRE(branch.size() == path.size());
    for (size_t i = 0; i < path.size(); ++i) {
        CHECK(std::abs(branch[i].nu - cplx(-path[i] / 2)) < 1e-8);
        CHECK(std::abs(branch[i].lambda - cplx(1 - path[i] * path[i] / 4)) < 1e-8);
    }
}
