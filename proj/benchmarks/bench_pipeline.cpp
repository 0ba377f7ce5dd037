#include <benchmark/benchmark.h>

#include "cbci/evaluation.hpp"
#include "cbci/imputation.hpp"

namespace {

cbci::Dataset masked_synthetic(std::size_t rows, std::size_t columns) {
    cbci::SyntheticSpec spec;
    spec.rows = rows;
    spec.numeric_columns = columns - columns / 4;
    spec.categorical_columns = columns / 4;
    spec.seed = 9;
    cbci::MaskSpec mask;
    mask.fraction = 0.1;
    mask.seed = 9;
    return cbci::mask_dataset(cbci::make_synthetic(spec), mask).masked;
}

void BM_Kmeans(benchmark::State& state) {
    const auto data = masked_synthetic(static_cast<std::size_t>(state.range(0)), 20);
    const auto g1 = cbci::split_groups(data).complete;
    for (auto _ : state) {
        auto model = cbci::kmeans(g1, 3, cbci::init::FarthestFirst{});
        benchmark::DoNotOptimize(model.means);
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g1.size()));
}
BENCHMARK(BM_Kmeans)->Arg(1000)->Arg(10000);

void BM_MapMissing(benchmark::State& state) {
    const auto data = masked_synthetic(static_cast<std::size_t>(state.range(0)), 20);
    const auto split = cbci::split_groups(data);
    const auto model = cbci::kmeans(split.complete, 3, cbci::init::FarthestFirst{});
    const cbci::MappingConfig config{3};
    for (auto _ : state) {
        for (const auto& r : split.incomplete) {
            auto e = cbci::map_missing(r, model, split.complete, config);
            benchmark::DoNotOptimize(e.total);
        }
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(split.incomplete.size()));
}
BENCHMARK(BM_MapMissing)->Arg(1000)->Arg(10000);

void BM_ImputeDataset(benchmark::State& state) {
    const auto data = masked_synthetic(static_cast<std::size_t>(state.range(0)), 20);
    for (auto _ : state) {
        auto result = cbci::impute_dataset(data, cbci::ImputeConfig{});
        benchmark::DoNotOptimize(result.report.targets.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ImputeDataset)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
