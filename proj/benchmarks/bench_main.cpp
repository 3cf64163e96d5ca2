#include <benchmark/benchmark.h>

#include <vector>

#include "ecfield/covariance.hpp"
#include "ecfield/critical_variance.hpp"
#include "ecfield/ec_heuristic.hpp"
#include "ecfield/field_sim.hpp"
#include "ecfield/special_functions.hpp"

namespace {

using namespace ecfield;

void BM_EcApproximation(benchmark::State& state) {
    const auto space = ParameterSpace::box({2.0, 3.0}, 1.0);
    double u = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(ec_approximation(space, u).total);
        u += 1e-9;
    }
}
BENCHMARK(BM_EcApproximation);

void BM_ChisqUpperTail(benchmark::State& state) {
    double x = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(chisq_upper_tail(7, x));
        x += 1e-9;
    }
}
BENCHMARK(BM_ChisqUpperTail);

void BM_SigmaCriticalInterval(benchmark::State& state) {
    const auto model =
        CovarianceModel::cosine_mixture({0.3, 0.7}, {1.0, 3.0}).normalize_second_moment();
    for (auto _ : state) {
        benchmark::DoNotOptimize(sigma_critical_interval(model, 4.0).sigma_c_sq);
    }
}
BENCHMARK(BM_SigmaCriticalInterval);

void BM_Sampler1DPaths(benchmark::State& state) {
    const GridSampler1D sampler(CovarianceModel::squared_exponential(1.0), 5.0,
                                static_cast<std::size_t>(state.range(0)), 4);
    std::uint64_t chunk = 0;
    double sink = 0.0;
    for (auto _ : state) {
        sampler.sample_chunk(1, chunk++, 1u << 30,
                             [&](std::span<const double> path, const SeedLineage&) {
            sink += path[0];
        });
    }
    benchmark::DoNotOptimize(sink);
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(kChunkSize1D));
}
BENCHMARK(BM_Sampler1DPaths)->Arg(1024)->Arg(8192)->Unit(benchmark::kMillisecond);

void BM_ExcursionEc1DMulti(benchmark::State& state) {
    const GridSampler1D sampler(CovarianceModel::squared_exponential(1.0), 5.0, 8192, 4);
    std::vector<double> path;
    sampler.sample(1, 7, [&](std::span<const double> p, const SeedLineage&) {
        path.assign(p.begin(), p.end());
    });
    const std::vector<double> levels = {1.5, 1.75, 2.0, 2.25, 2.5, 2.75};
    std::vector<std::int32_t> out(levels.size());
    for (auto _ : state) {
        excursion_ec_1d_multi(path, levels, out);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ExcursionEc1DMulti);

void BM_ExcursionEc2D(benchmark::State& state) {
    const IsotropicModel iso(CovarianceModel::squared_exponential(1.0), 2);
    const GridSampler2D sampler(iso, 2.0, 3.0, 256, 256, 4);
    std::vector<double> field;
    sampler.sample(1, 7, [&](std::span<const double> f, const SeedLineage&) {
        field.assign(f.begin(), f.end());
    });
    for (auto _ : state) {
        benchmark::DoNotOptimize(excursion_ec_2d(field, 256, 256, 1.0));
    }
}
BENCHMARK(BM_ExcursionEc2D);

}  // namespace

BENCHMARK_MAIN();
