#include <benchmark/benchmark.h>

#include "mbo/estimates.hpp"
#include "mbo/normal_form.hpp"
#include "mbo/random.hpp"
#include "mbo/solver.hpp"

namespace {

mbo::SpectralField datum(int N) {
    mbo::SpectralField u(N, true);
    u.at(1) = u.at(-1) = mbo::cplx{0.25, 0.0};
    u.at(2) = u.at(-2) = mbo::cplx{0.125, 0.0};
    return u;
}

void BM_ProductPadded(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    mbo::Rng rng(7);
    const auto f = mbo::random_real_field(N, rng);
    const auto g = mbo::random_real_field(N, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mbo::product(f, g, mbo::ProductMode::padded_transform));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProductPadded)->RangeMultiplier(2)->Range(16, 256)->Complexity();

void BM_ProductExact(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    mbo::Rng rng(7);
    const auto f = mbo::random_real_field(N, rng);
    const auto g = mbo::random_real_field(N, rng);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mbo::product(f, g, mbo::ProductMode::exact_convolution));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProductExact)->RangeMultiplier(2)->Range(16, 128)->Complexity();

void BM_Step(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    auto u = datum(N);
    for (auto _ : state) {
        u = mbo::step(u, 1e-4, -1);
        benchmark::DoNotOptimize(u);
    }
}
BENCHMARK(BM_Step)->Arg(32)->Arg(64)->Arg(128);

void BM_FamiliesJ1(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto smp = mbo::make_nf_sample(0.01, datum(N), -1, 0x1p-10);
    for (auto _ : state)
        benchmark::DoNotOptimize(mbo::eval_families_j1(smp, 64.0));
}
BENCHMARK(BM_FamiliesJ1)->Arg(8)->Arg(12)->Arg(16);

void BM_FamiliesJ2(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto smp = mbo::make_nf_sample(0.01, datum(N), -1, 0x1p-10);
    const auto kernels = mbo::make_j2_kernels(smp);
    for (auto _ : state)
        benchmark::DoNotOptimize(mbo::eval_families_j2(smp, 64.0, kernels));
}
BENCHMARK(BM_FamiliesJ2)->Arg(8)->Arg(12);

void BM_EstimateTrial(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const auto in =
        mbo::make_trial_inputs(N, mbo::EstimateKind::matome1, 42, 0, 0.6);
    const mbo::EstimateParams p{0.6, 0.025, 0x1p-10};
    for (auto _ : state)
        benchmark::DoNotOptimize(
            mbo::run_estimate_trial(mbo::EstimateKind::matome1, in, p));
}
BENCHMARK(BM_EstimateTrial)->Arg(16)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
