#include <benchmark/benchmark.h>

#include <random>

#include "frontlab/kernels.hpp"
#include "frontlab/models.hpp"

using namespace frontlab;

namespace {

Mat random_state(int N, int n) {
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    Mat x(N, n);
    for (int i = 0; i < x.size(); ++i) x.data()[i] = u(rng);
    return x;
}

void BM_ReactionSerial(benchmark::State& st) {
    ModelSpec m = get_model("cgl");
    Mat x = random_state(m.dim(), static_cast<int>(st.range(0))), out(x.rows(), x.cols());
    for (auto _ : st) {
        kernels::reaction_serial(m.f, x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_ReactionOmp(benchmark::State& st) {
    ModelSpec m = get_model("cgl");
    Mat x = random_state(m.dim(), static_cast<int>(st.range(0))), out(x.rows(), x.cols());
    for (auto _ : st) {
        kernels::reaction_omp(m.f, x, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_SpectrumSerial(benchmark::State& st) {
    ModelSpec m = get_model("forced_cgl");
    auto ks = linspace(-8, 8, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::spectrum_serial(m.symbol, 2.0, 1.0, ks));
}

void BM_SpectrumOmp(benchmark::State& st) {
    ModelSpec m = get_model("forced_cgl");
    auto ks = linspace(-8, 8, static_cast<int>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(kernels::spectrum_omp(m.symbol, 2.0, 1.0, ks));
}

}  // namespace

BENCHMARK(BM_ReactionSerial)->Arg(4096)->Arg(65536);
BENCHMARK(BM_ReactionOmp)->Arg(4096)->Arg(65536);
BENCHMARK(BM_SpectrumSerial)->Arg(1024)->Arg(16384);
BENCHMARK(BM_SpectrumOmp)->Arg(1024)->Arg(16384);

BENCHMARK_MAIN();
