#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "frontlab/error.hpp"
#include "frontlab/simulate.hpp"

using namespace frontlab;

TEST_CASE("front position interpolates a monotone profile") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> pos(10, 40), slope(0.3, 2.0);
    double h = 0.1;
    for (int trial = 0; trial < 20; ++trial) {
        double x0 = pos(rng), s = slope(rng);
        Vec a(501);
        for (int i = 0; i < a.size(); ++i) a[i] = 1 / (1 + std::exp(s * (i * h - x0)));
        // a(x) = 0.1 at x = x0 + log(9)/s
        CHECK(front_position(a, h, 0.1) == doctest::Approx(x0 + std::log(9.0) / s).epsilon(1e-4));
    }
    CHECK(front_position(Vec::Zero(10), 0.1, 0.1) == 0.0);
}

TEST_CASE("linear run grows at the linear rate") {
    ModelSpec m = get_model("fkpp");
    SimConfig c;
    c.L = 100;
    c.n_grid = 1000;
    c.dt = 0.01;
    c.t_end = 2.0;
    c.bc = BoundaryKind::Periodic;
    c.ic.kind = InitialKind::Gaussian;
    c.ic.width = 5;
    c.ic.amplitude = 1e-3;
    c.snapshot_times = {0.0};
    SimResult r = run_linear(m, c);
    REQUIRE(r.snapshots.size() == 1);
    double m0 = r.snapshots[0].u.sum(), m1 = r.state.sum();
    CHECK(m1 / m0 == doctest::Approx(std::exp(2.0)).epsilon(1e-3));
}

TEST_CASE("Nagumo pushed front speed") {
    ModelSpec m = get_model("nagumo", {{"a", 0.2}});
    SimConfig c;
    c.L = 200;
    c.n_grid = 2001;
    c.t_end = 100;
    SimResult r = run_invasion(m, c);
    CHECK(r.status == RunStatus::Completed);
    auto cr = raw_speeds(r.track);
    REQUIRE(!cr.empty());
    CHECK(cr.back().x == doctest::Approx(1.4 / std::sqrt(2.0)).epsilon(5e-3));
}

TEST_CASE("parallel stepping reproduces the serial run") {
    ModelSpec m = get_model("cgl");
    SimConfig c;
    c.L = 80;
    c.n_grid = 801;
    c.t_end = 10;
    c.ic.width = 5;
    SimResult a = run_invasion(m, c);
    c.parallel = true;
    SimResult b = run_invasion(m, c);
    CHECK((a.state - b.state).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("comoving frame at the selected speed has small drift") {
    ModelSpec m = get_model("nagumo", {{"a", 0.2}});
    SimConfig c;
    c.L = 100;
    c.n_grid = 1001;
    c.t_end = 80;
    ComovingResult r = run_comoving(m, 1.4 / std::sqrt(2.0), c);
    CHECK(std::abs(r.drift) < 1e-2);
}

TEST_CASE("front reaching the boundary is reported") {
    ModelSpec m = get_model("fkpp");
    SimConfig c;
    c.L = 40;
    c.n_grid = 401;
    c.t_end = 100;
    SimResult r = run_invasion(m, c);
    CHECK(r.status == RunStatus::FrontReachedBoundary);
    CHECK(r.t_final < 100);
}

TEST_CASE("speed estimation needs samples") {
    FrontTrack t;
    t.samples = {{0, 0}, {1, 1}};
    try {
        estimate_speed(t);
        FAIL("expected InsufficientSamples");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InsufficientSamples);
    }
}

TEST_CASE("log-shift fit recovers a synthetic Bramson track") {
    FrontTrack t;
    for (int i = 1; i <= 2000; ++i) {
        double s = 0.5 * i;
        t.samples.push_back({s, 2 * s - 1.5 * std::log(s) + 3 - 2.0 / std::sqrt(s)});
    }
    SpeedEstimate e = estimate_speed(t);
    CHECK(e.c_ext == doctest::Approx(2).epsilon(1e-3));
    CHECK(e.kappa_log == doctest::Approx(1.5).epsilon(0.05));
}
