#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "frontlab/error.hpp"
#include "frontlab/models.hpp"

using namespace frontlab;

namespace {

// Central-difference Jacobian of a point map, row-major.
std::vector<double> fd_jacobian(const PointMap& f, std::vector<double> u, int N) {
    std::vector<double> jac(N * N), fp(N), fm(N);
    for (int j = 0; j < N; ++j) {
        double h = 1e-6 * (1 + std::abs(u[j]));
        double keep = u[j];
        u[j] = keep + h;
        f(u.data(), fp.data());
        u[j] = keep - h;
        f(u.data(), fm.data());
        u[j] = keep;
        for (int i = 0; i < N; ++i) jac[i * N + j] = (fp[i] - fm[i]) / (2 * h);
    }
    return jac;
}

}  // namespace

TEST_CASE("every registered model builds with defaults") {
    for (const auto& name : model_names()) {
        CAPTURE(name);
        ModelSpec m = get_model(name);
        CHECK(m.name == name);
        CHECK(m.dim() >= 1);
        CHECK(m.order() >= 2);
        CHECK(m.registered);
        CHECK_FALSE(model_description(name).empty());
        CHECK(static_cast<int>(m.nondiffusive.size()) == m.dim());
    }
}

TEST_CASE("pointwise Jacobians agree with finite differences") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (const auto& name : model_names()) {
        CAPTURE(name);
        ModelSpec m = get_model(name);
        int N = m.dim();
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<double> x(N);
            for (auto& v : x) v = u(rng);
            std::vector<double> jac(N * N);
            m.df(x.data(), jac.data());
            auto ref = fd_jacobian(m.f, x, N);
            for (int k = 0; k < N * N; ++k) CHECK(std::abs(jac[k] - ref[k]) < 1e-5 * (1 + std::abs(ref[k])));
            if (m.has_g()) {
                m.dg(x.data(), jac.data());
                auto rg = fd_jacobian(m.g, x, N);
                for (int k = 0; k < N * N; ++k) CHECK(std::abs(jac[k] - rg[k]) < 1e-5 * (1 + std::abs(rg[k])));
            }
        }
    }
}

TEST_CASE("f vanishes at the invaded state and its derivative is J") {
    for (const auto& name : model_names()) {
        CAPTURE(name);
        ModelSpec m = get_model(name);
        int N = m.dim();
        std::vector<double> zero(N, 0.0), out(N), jac(N * N);
        m.f(zero.data(), out.data());
        for (double v : out) CHECK(std::abs(v) < 1e-14);
        m.df(zero.data(), jac.data());
        const Mat& J = m.symbol.linearization();
        for (int i = 0; i < N; ++i)
            for (int j = 0; j < N; ++j) CHECK(jac[i * N + j] == doctest::Approx(J(i, j)));
    }
}

TEST_CASE("wake states are equilibria") {
    for (const auto& name : model_names()) {
        ModelSpec m = get_model(name);
        if (m.wake_state.empty()) continue;
        CAPTURE(name);
        std::vector<double> out(m.dim());
        m.f(m.wake_state.data(), out.data());
        for (double v : out) CHECK(std::abs(v) < 1e-12);
    }
}

TEST_CASE("errors for unknown models and bad parameters") {
    auto kind_of = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    CHECK(kind_of([] { get_model("nope"); }) == ErrorKind::UnknownModel);
    CHECK(kind_of([] { get_model("nagumo", {{"a", -0.1}}); }) == ErrorKind::ParameterOutOfRange);
    CHECK(kind_of([] { get_model("lotka_volterra", {{"b", 1.5}}); }) == ErrorKind::ParameterOutOfRange);
    CHECK(kind_of([] { get_model("nagumo", {{"a", std::nan("")}}); }) == ErrorKind::ParameterOutOfRange);
    CHECK_THROWS_AS(get_model("nagumo", {{"zz", 1.0}}), Error);
}

TEST_CASE("families reproduce get_model") {
    ModelFamily fam = model_family("nagumo", "a");
    ModelSpec m = fam(0.35);
    CHECK(m.param("a") == 0.35);
    CHECK(m.symbol.linearization()(0, 0) == doctest::Approx(0.35));
}

TEST_CASE("linearized and user models") {
    ModelSpec lin = linearized(get_model("fkpp"));
    double u = 0.7, out = 0;
    lin.f(&u, &out);
    CHECK(out == doctest::Approx(0.7));
    ModelSpec usr = user_model("user", get_model("fkpp").symbol);
    CHECK_FALSE(usr.registered);
    usr.f(&u, &out);
    CHECK(out == doctest::Approx(0.7));
}

TEST_CASE("fourth-order closed forms agree with independent evaluation") {
    double a = 1, b = 0.05;
    auto I = fourth_order_region_I(a, b);
    double s = std::sqrt(a * a - 12 * b);
    CHECK(I.valid);
    CHECK(I.c == doctest::Approx(2 / (3 * std::sqrt(6.0)) * (2 * a + s) * std::sqrt(a - s)));
    auto IV = fourth_order_region_IV(-2, -0.84);
    double t = std::sqrt(7 * 4 - 24 * 0.84);
    CHECK(IV.valid);
    CHECK(IV.c == doctest::Approx(2 / (3 * std::sqrt(6.0)) * (4 + t) * std::sqrt(-2 + t)));
}

TEST_CASE("reference values") {
    auto refs = reference_values(get_model("fkpp"));
    bool seen = false;
    for (const auto& r : refs)
        if (r.quantity == "c_lin") {
            seen = true;
            CHECK(r.value == 2.0);
        }
    CHECK(seen);
}
