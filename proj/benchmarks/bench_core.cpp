#include "lrac/dynamics.hpp"
#include "lrac/noise.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

using namespace lrac;

namespace {
std::vector<double> wave(int N) {
    return sample_nodes([](double x) { return std::sin(2 * std::numbers::pi * x) + 0.1 * std::cos(6 * std::numbers::pi * x); }, N);
}
} // namespace

static void BM_ApplyDirect(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    auto op = make_operator(N, 0.4, 1.0, "indicator");
    auto u = wave(N);
    std::vector<double> out(u.size());
    for (auto _ : st) {
        op.apply(u, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.counters["R"] = op.R();
}
BENCHMARK(BM_ApplyDirect)->RangeMultiplier(4)->Range(64, 16384);

static void BM_ApplySpectral(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    auto op = make_operator(N, 0.4, 1.0, "indicator");
    auto u = wave(N);
    for (auto _ : st)
        benchmark::DoNotOptimize(op.apply_spectral(u));
}
BENCHMARK(BM_ApplySpectral)->RangeMultiplier(4)->Range(64, 16384);

static void BM_NoiseSlab(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    NoisePlan plan(1, N, 1e-4);
    std::vector<double> out(static_cast<std::size_t>(N));
    std::int64_t slab = 0;
    for (auto _ : st) {
        plan.fine_slab(slab++, out);
        benchmark::DoNotOptimize(out.data());
    }
    st.SetItemsProcessed(st.iterations() * N);
}
BENCHMARK(BM_NoiseSlab)->Arg(128)->Arg(512)->Arg(4096);

static void BM_CoupledNoise(benchmark::State& st) {
    NoisePlan plan(1, 512, 1.0 / 262144);
    CoupledNoise cn(plan, {16, 32, 64, 128, 512}, 1.0 / 262144);
    std::vector<std::vector<double>> dB;
    for (auto _ : st) {
        cn.next(dB);
        benchmark::DoNotOptimize(dB.data());
    }
}
BENCHMARK(BM_CoupledNoise);

static void BM_SemiImplicitStep(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    auto op = make_operator(N, 0.25, 1.0, "indicator");
    SemiImplicitStepper s(op, DriftSpec::full(), 1e-5, 0.1);
    auto u = wave(N);
    std::vector<double> dB(u.size(), 0.0);
    for (auto _ : st) {
        s.step(u, dB);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_SemiImplicitStep)->RangeMultiplier(2)->Range(16, 1024);

static void BM_ExplicitStep(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    auto op = make_operator(N, 0.25, 1.0, "indicator");
    ExplicitStepper s(op, DriftSpec::full(), 1.0 / op.max_circulant_eigenvalue(), 0.1);
    auto u = wave(N);
    std::vector<double> dB(u.size(), 0.0);
    for (auto _ : st) {
        s.step(u, dB);
        benchmark::ClobberMemory();
    }
}
BENCHMARK(BM_ExplicitStep)->RangeMultiplier(2)->Range(16, 1024);

static void BM_StochasticConvolution(benchmark::State& st) {
    const int N = static_cast<int>(st.range(0));
    auto op = make_operator(N, 0.25, 1.0, "indicator");
    StochasticConvolution B(op, NoisePlan(1, N, 1e-3));
    std::vector<double> f(static_cast<std::size_t>(N));
    for (auto _ : st) {
        B.advance();
        B.field(f);
        benchmark::DoNotOptimize(f.data());
    }
}
BENCHMARK(BM_StochasticConvolution)->Arg(32)->Arg(256);

BENCHMARK_MAIN();
