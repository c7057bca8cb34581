#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "frontlab/kernels.hpp"
#include "frontlab/models.hpp"

using namespace frontlab;

TEST_CASE("parallel spectrum matches the serial reference") {
    ModelSpec m = get_model("cgl");
    auto ks = linspace(-5, 5, 1001);
    auto a = kernels::spectrum_serial(m.symbol, 2.5, 0.7, ks);
    auto b = kernels::spectrum_omp(m.symbol, 2.5, 0.7, ks);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].size() == b[i].size());
        for (size_t j = 0; j < a[i].size(); ++j) CHECK(a[i][j] == b[i][j]);
    }
}

TEST_CASE("parallel map matches the serial reference") {
    auto xs = linspace(0, 10, 5000);
    auto g = [](double x) { return std::sin(x) * std::exp(-0.1 * x); };
    auto a = kernels::map_serial(g, xs);
    auto b = kernels::map_omp(g, xs);
    CHECK(a == b);
}

TEST_CASE("parallel reaction matches the serial reference") {
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(-1, 1);
    for (const std::string name : {"fkpp", "cgl", "fhn", "lotka_volterra"}) {
        ModelSpec m = get_model(name);
        Mat x(m.dim(), 3000);
        for (int i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
        Mat a(x.rows(), x.cols()), b(x.rows(), x.cols());
        kernels::reaction_serial(m.f, x, a);
        kernels::reaction_omp(m.f, x, b);
        CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
        std::vector<double> out(m.dim());
        m.f(x.col(17).data(), out.data());
        for (int c = 0; c < m.dim(); ++c) CHECK(a(c, 17) == out[c]);
    }
}

TEST_CASE("thread count can be set") {
    int before = kernels::max_threads();
    CHECK(before >= 1);
    kernels::set_threads(1);
    CHECK(kernels::max_threads() == 1);
    kernels::set_threads(before);
}
