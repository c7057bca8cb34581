#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "frontlab/error.hpp"
#include "frontlab/frontbvp.hpp"

using namespace frontlab;

namespace {

// Max-norm mismatch between the sparse Jacobian and central differences, relative to max |J|.
double jacobian_mismatch(const NewtonSystem& sys, const Vec& x) {
    Mat J = Mat(sys.jacobian(x));
    double worst = 0;
    for (int j = 0; j < x.size(); ++j) {
        Vec xp = x, xm = x;
        double h = 1e-6 * (1 + std::abs(x[j]));
        xp[j] += h;
        xm[j] -= h;
        Vec col = (sys.residual(xp) - sys.residual(xm)) / (2 * h);
        worst = std::max(worst, (J.col(j) - col).cwiseAbs().maxCoeff());
    }
    return worst / (1 + J.cwiseAbs().maxCoeff());
}

Vec random_state(std::mt19937& rng, int size) {
    std::uniform_real_distribution<double> u(-0.5, 1.0);
    Vec x(size);
    for (int i = 0; i < size; ++i) x[i] = u(rng);
    return x;
}

double nagumo_speed(double a) { return (1 + 2 * a) / std::sqrt(2.0); }

}  // namespace

TEST_CASE("smooth ramp") {
    CHECK(smooth_ramp(-1)[0] == 0.0);
    CHECK(smooth_ramp(2)[0] == 1.0);
    CHECK(smooth_ramp(0.5)[0] == doctest::Approx(0.5));
    for (double t : {0.1, 0.3, 0.7}) {
        auto a = smooth_ramp(t - 1e-6), b = smooth_ramp(t + 1e-6), m = smooth_ramp(t);
        for (int d = 0; d < 4; ++d) CHECK(m[d + 1] == doctest::Approx((b[d] - a[d]) / 2e-6).epsilon(1e-5));
    }
}

TEST_CASE("front-system Jacobians agree with finite differences") {
    std::mt19937 rng(2718);
    for (const std::string name : {"nagumo", "fhn", "lotka_volterra", "ch"}) {
        CAPTURE(name);
        ModelSpec m = get_model(name);
        for (bool unknown : {true, false})
            for (RightBoundary rb : {RightBoundary::Dirichlet, RightBoundary::Free}) {
                if (rb == RightBoundary::Free && (unknown || m.order() > 2)) continue;
                FrontOptions o;
                o.n = 41;
                o.right = rb;
                o.phase_value = 0.3;
                NewtonSystem sys = front_system(m, 8.0, unknown, 0.9, o);
                int size = o.n * m.dim() + (unknown ? 1 : 0);
                CHECK(jacobian_mismatch(sys, random_state(rng, size)) < 1e-5);
            }
    }
}

TEST_CASE("pulled-system Jacobian agrees with finite differences") {
    std::mt19937 rng(161);
    for (const std::string name : {"fkpp", "cqgl", "nagumo"}) {
        CAPTURE(name);
        ModelSpec m = get_model(name);
        PulledOptions po;
        po.front.n = 121;
        po.cut_halfwidth = 2.0;
        double c = 2 * std::sqrt(m.symbol.linearization()(0, 0));
        NewtonSystem sys = pulled_system(m, c, c / 2, 30.0, po);
        Vec x = 0.1 * random_state(rng, po.front.n * m.dim() + 2);
        CHECK(jacobian_mismatch(sys, x) < 1e-5);
    }
}

TEST_CASE("Nagumo free front matches the explicit solution") {
    double a = 0.2;
    ModelSpec m = get_model("nagumo", {{"a", a}});
    FrontOptions o;
    o.n = 1201;
    FrontProfile p = solve_front_newton(m, 60, true, {0.8, {}, 0.7071}, o);
    CHECK(p.c == doctest::Approx(nagumo_speed(a)).epsilon(1e-6));
    // shift the explicit profile so it passes through the solver's phase
    double x_half = 0;
    for (size_t i = 1; i < p.xi.size(); ++i)
        if (p.u(0, i - 1) >= 0.5 && p.u(0, i) < 0.5) {
            double t = (p.u(0, i - 1) - 0.5) / (p.u(0, i - 1) - p.u(0, i));
            x_half = p.xi[i - 1] + t * (p.xi[i] - p.xi[i - 1]);
        }
    double err = 0;
    for (size_t i = 0; i < p.xi.size(); ++i)
        err = std::max(err, std::abs(p.u(0, i) - 1 / (1 + std::exp((p.xi[i] - x_half) / std::sqrt(2.0)))));
    CHECK(err < 1e-5);
    auto tail = front_decay_rate(m, p);
    CHECK(tail.cls == TailClass::Steep);
    CHECK(tail.nu.real() == doctest::Approx(-1 / std::sqrt(2.0)).epsilon(1e-2));
}

TEST_CASE("fixed-speed FKPP front") {
    ModelSpec m = get_model("fkpp");
    FrontOptions o;
    o.n = 801;
    FrontProfile p = solve_front_newton(m, 40, false, {3.0, {}, 1.0}, o);
    CHECK(p.c == 3.0);
    CHECK(p.residual < 1e-9);
    for (int i = 1; i < p.u.cols(); ++i) CHECK(p.u(0, i) <= p.u(0, i - 1) + 1e-12);
}

TEST_CASE("pulled FKPP front has a nonzero leading-edge coefficient") {
    ModelSpec m = get_model("fkpp");
    PulledFront pf = solve_pulled_front(m, 2.0, 1.0, 60.0);
    CHECK(pf.decomp.a > 0.1);
    CHECK(pf.decomp.core_rate > 1.05);
    Mat q = reconstruct(pf.decomp, pf.profile.xi);
    CHECK((q - pf.profile.u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Nagumo transition from the farfield-core coefficient") {
    TransitionResult tr = detect_transition(model_family("nagumo", "a"), {0.3, 0.8}, 80.0);
    CHECK(tr.mu == doctest::Approx(0.5).epsilon(1e-4));
    CHECK(tr.c_lin == doctest::Approx(std::sqrt(2.0)).epsilon(1e-4));
    CHECK(tr.history.size() >= 3);
}

TEST_CASE("transition bracket without a sign change") {
    try {
        detect_transition(model_family("nagumo", "a"), {0.6, 0.8}, 60.0);
        FAIL("expected NoSignChange");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NoSignChange);
    }
}

TEST_CASE("natural and arclength continuation follow the pushed branch") {
    ModelFamily fam = model_family("nagumo", "a");
    FrontOptions o;
    o.n = 601;
    FrontProfile seed = solve_front_newton(fam(0.2), 60, true, {0.8, {}, 0.7071}, o);
    std::vector<double> path{0.2, 0.25, 0.3, 0.35};
    for (bool arclength : {false, true}) {
        CAPTURE(arclength);
        ContinuationReport cr = continue_front(fam, seed, 60, path, arclength, o);
        CHECK_FALSE(cr.terminated);
        REQUIRE(cr.branch.size() >= 2);
        for (const auto& bp : cr.branch) CHECK(bp.profile.c == doctest::Approx(nagumo_speed(bp.mu)).epsilon(1e-4));
        CHECK(cr.branch.back().mu == doctest::Approx(0.35));
    }
}

TEST_CASE("weighted FKPP front spectrum sits at the shifted edge") {
    ModelSpec m = get_model("fkpp");
    FrontOptions o;
    o.n = 401;
    FrontProfile p = solve_front_newton(m, 40, false, {3.0, {}, 1.0}, o);
    FrontSpectrum sp = front_spectrum(m, p, 1.5, 4);
    CHECK(sp.leading.real() == doctest::Approx(-1.25).epsilon(1e-2));
}

TEST_CASE("Nagumo front spectrum contains the translation eigenvalue") {
    ModelSpec m = get_model("nagumo", {{"a", 0.2}});
    FrontOptions o;
    o.n = 441;
    o.phase_window = std::make_pair(9.0, 11.0);
    FrontProfile p = solve_front_newton(m, 44, true, {0.8, {}, 0.7071}, o);
    FrontSpectrum sp = front_spectrum(m, p, p.c / 2, 3);
    CHECK(std::abs(sp.nearest_zero) < 1e-6);
    CHECK(sp.translation_correlation > 0.999);
}

TEST_CASE("fourth-order symbols are rejected by the spectrum") {
    ModelSpec m = get_model("sh");
    FrontProfile p;
    p.xi = {0, 1, 2};
    p.u = Mat::Zero(1, 3);
    try {
        front_spectrum(m, p, 0.5, 2);
        FAIL("expected NotApplicable");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotApplicable);
    }
}
