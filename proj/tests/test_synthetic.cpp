#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "pkiflow/metrics.hpp"
#include "pkiflow/random_forest.hpp"
#include "pkiflow/synthetic.hpp"

using namespace pkiflow;

TEST_CASE("defaults: desk-scaled class counts") {
    SyntheticSpec spec = SyntheticSpec::defaults();
    CHECK(spec.train_counts == std::vector<size_t>{11, 10, 15, 5097, 43, 17});
    CHECK(spec.test_counts == std::vector<size_t>{10, 10, 10, 1112, 10, 10});
    CHECK(spec.class_names == std::vector<std::string>{"DE", "IC", "LM", "NT", "P", "R"});
}

TEST_CASE("generate: exact counts in class-index order") {
    SyntheticSpec spec = SyntheticSpec::defaults();
    spec.seed = 12;
    SyntheticData data = generate_synthetic(spec);
    std::map<int, size_t> counts;
    for (int y : data.train.y) ++counts[y];
    for (size_t c = 0; c < spec.train_counts.size(); ++c)
        CHECK(counts[static_cast<int>(c)] == spec.train_counts[c]);
    CHECK(data.train.n() == 11 + 10 + 15 + 5097 + 43 + 17);
    CHECK(data.test.n() == 10 + 10 + 10 + 1112 + 10 + 10);
}

TEST_CASE("generate: deterministic per seed") {
    SyntheticSpec spec = SyntheticSpec::latent_pair(5);
    SyntheticData a = generate_synthetic(spec);
    SyntheticData b = generate_synthetic(spec);
    CHECK(a.train.x.data == b.train.x.data);
    CHECK(a.test.x.data == b.test.x.data);
    spec.seed = 6;
    SyntheticData c = generate_synthetic(spec);
    CHECK(a.train.x.data != c.train.x.data);
}

TEST_CASE("generate: invalid specs rejected") {
    SyntheticSpec spec;
    spec.class_names = {"only"};
    spec.train_counts = {5};
    spec.test_counts = {5};
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);

    spec = SyntheticSpec::defaults();
    spec.train_counts = {5, 0, 0, 0, 0, 0};
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);

    spec = SyntheticSpec::defaults();
    spec.n_features = 0;
    CHECK_THROWS_AS(generate_synthetic(spec), InvalidSpec);
}

TEST_CASE("generate: high separation is trivially separable by a forest") {
    SyntheticSpec spec = SyntheticSpec::defaults();
    spec.separation = 10.0;
    spec.seed = 3;
    // shrink the majority class so the fit stays fast
    spec.train_counts = {40, 40, 40, 200, 40, 40};
    spec.test_counts = {20, 20, 20, 50, 20, 20};
    SyntheticData data = generate_synthetic(spec);
    RandomForestParams params;
    params.n_trees = 30;
    params.seed = 1;
    RandomForest model = rf_fit(data.train, params);
    ConfusionMatrix cm =
        confusion_matrix(data.test.y, rf_predict(model, data.test.x), data.test.class_index);
    CHECK(macro_f1(cm) >= 0.99);
}

TEST_CASE("latent mode: the offset feature is marginally washed out") {
    SyntheticSpec spec = SyntheticSpec::latent_pair(8, 2000);
    SyntheticData data = generate_synthetic(spec);
    // per-class mean of every feature is near zero: the +/- offsets cancel
    size_t d = data.train.d();
    std::vector<double> mean_a(d, 0.0), mean_b(d, 0.0);
    size_t n_a = 0, n_b = 0;
    for (size_t i = 0; i < data.train.n(); ++i) {
        for (size_t j = 0; j < d; ++j) {
            (data.train.y[i] == 0 ? mean_a[j] : mean_b[j]) += data.train.x(i, j);
        }
        (data.train.y[i] == 0 ? n_a : n_b) += 1;
    }
    for (size_t j = 0; j < d; ++j) {
        mean_a[j] /= static_cast<double>(n_a);
        mean_b[j] /= static_cast<double>(n_b);
        CHECK(std::abs(mean_a[j] - mean_b[j]) < 0.6);
    }
}
