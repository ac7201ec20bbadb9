#include <benchmark/benchmark.h>

#include "pkiflow/gmm.hpp"
#include "pkiflow/kmeans.hpp"
#include "pkiflow/rng.hpp"

using namespace pkiflow;

namespace {

Matrix blob_data(size_t n, size_t d) {
    Rng rng(7);
    Matrix x(n, d);
    for (size_t i = 0; i < n; ++i) {
        double offset = static_cast<double>(i % 4) * 5.0;
        for (size_t j = 0; j < d; ++j) x(i, j) = offset + rng.next_normal();
    }
    return x;
}

} // namespace

static void BM_KMeansFit(benchmark::State& state) {
    Matrix x = blob_data(static_cast<size_t>(state.range(0)), 16);
    for (auto _ : state) {
        KMeansModel model = kmeans_fit(x, {.k = 8, .seed = 1});
        benchmark::DoNotOptimize(model.inertia);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeansFit)->Arg(1000)->Arg(5000);

static void BM_KMeansAssign(benchmark::State& state) {
    Matrix x = blob_data(static_cast<size_t>(state.range(0)), 16);
    KMeansModel model = kmeans_fit(x, {.k = 8, .seed = 1});
    for (auto _ : state) {
        ClusterAssignment a = kmeans_assign(model, x);
        benchmark::DoNotOptimize(a.labels.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_KMeansAssign)->Arg(5000);

static void BM_GmmFit(benchmark::State& state) {
    Matrix x = blob_data(2000, 8);
    CovarianceType type = static_cast<CovarianceType>(state.range(0));
    for (auto _ : state) {
        GmmModel model = gmm_fit(x, {.k = 4, .covariance_type = type, .seed = 3, .max_iter = 50});
        benchmark::DoNotOptimize(model.final_loglik);
    }
}
BENCHMARK(BM_GmmFit)
    ->Arg(static_cast<int>(CovarianceType::spherical))
    ->Arg(static_cast<int>(CovarianceType::diag))
    ->Arg(static_cast<int>(CovarianceType::full))
    ->Arg(static_cast<int>(CovarianceType::tied));
