#include <benchmark/benchmark.h>

#include "pkiflow/rng.hpp"
#include "pkiflow/supervised.hpp"

using namespace pkiflow;

namespace {

Dataset labelled_blobs(size_t n, size_t d, size_t m) {
    Rng rng(11);
    Dataset ds;
    ds.x = Matrix(n, d);
    for (size_t i = 0; i < n; ++i) {
        size_t c = i % m;
        ds.y.push_back(static_cast<int>(c));
        for (size_t j = 0; j < d; ++j)
            ds.x(i, j) = static_cast<double>(c) * 3.0 + rng.next_normal();
    }
    for (size_t c = 0; c < m; ++c) ds.class_index.names.push_back("c" + std::to_string(c));
    return ds;
}

} // namespace

static void BM_CartFit(benchmark::State& state) {
    Dataset ds = labelled_blobs(static_cast<size_t>(state.range(0)), 12, 4);
    for (auto _ : state) {
        DecisionTree tree = cart_fit(ds, {});
        benchmark::DoNotOptimize(tree.nodes.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CartFit)->Arg(1000)->Arg(4000);

static void BM_ForestFit(benchmark::State& state) {
    Dataset ds = labelled_blobs(2000, 12, 4);
    RandomForestParams params;
    params.n_trees = 20;
    params.seed = 5;
    unsigned jobs = static_cast<unsigned>(state.range(0));
    for (auto _ : state) {
        RandomForest forest = rf_fit(ds, params, jobs);
        benchmark::DoNotOptimize(forest.trees.size());
    }
}
BENCHMARK(BM_ForestFit)->Arg(1)->Arg(4);

static void BM_GbtFit(benchmark::State& state) {
    Dataset ds = labelled_blobs(1500, 12, 4);
    GbtParams params;
    params.n_estimators = static_cast<size_t>(state.range(0));
    params.max_depth = 4;
    for (auto _ : state) {
        GradientBoostedModel model = gbt_fit(ds, params);
        benchmark::DoNotOptimize(model.rounds.size());
    }
}
BENCHMARK(BM_GbtFit)->Arg(10)->Arg(40);

static void BM_GbtPredict(benchmark::State& state) {
    Dataset ds = labelled_blobs(2000, 12, 4);
    GradientBoostedModel model = gbt_fit(ds, {.n_estimators = 30, .max_depth = 4});
    for (auto _ : state) {
        std::vector<int> pred = gbt_predict(model, ds.x);
        benchmark::DoNotOptimize(pred.data());
    }
    state.SetItemsProcessed(state.iterations() * ds.n());
}
BENCHMARK(BM_GbtPredict);
