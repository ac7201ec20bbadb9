#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pkiflow/dataset.hpp"
#include "pkiflow/rng.hpp"

using namespace pkiflow;

namespace {

Dataset two_class(size_t n_a, size_t n_b, uint64_t seed = 1) {
    Dataset ds;
    ds.x = Matrix(n_a + n_b, 2);
    Rng rng(seed);
    for (size_t i = 0; i < n_a + n_b; ++i) {
        ds.x(i, 0) = rng.next_normal();
        ds.x(i, 1) = rng.next_normal() + (i < n_a ? 0.0 : 5.0);
        ds.y.push_back(i < n_a ? 0 : 1);
    }
    ds.class_index.names = {"A", "B"};
    return ds;
}

} // namespace

TEST_CASE("encode: first-appearance order") {
    EncodedLabels enc = encode_labels({"NT", "NT", "DE"});
    CHECK(enc.y == std::vector<int>{0, 0, 1});
    CHECK(enc.class_index.names == std::vector<std::string>{"NT", "DE"});
    CHECK(enc.counts == std::vector<size_t>{2, 1});
}

TEST_CASE("encode: explicit order") {
    EncodedLabels enc = encode_labels({"NT"}, {"DE", "IC", "LM", "NT", "P", "R"});
    CHECK(enc.y == std::vector<int>{3});
    CHECK(enc.class_index.size() == 6);
    CHECK(enc.counts == std::vector<size_t>{0, 0, 0, 1, 0, 0});
}

TEST_CASE("encode: errors") {
    CHECK_THROWS_AS(encode_labels({}), EmptyLabelList);
    CHECK_THROWS_AS(encode_labels({"X"}, {"A", "B"}), LabelOutOfRange);
}

TEST_CASE("split: zero fraction keeps everything in train") {
    Dataset ds = two_class(10, 10);
    SplitResult split = stratified_split(ds, {0.0, 3});
    CHECK(split.val.n() == 0);
    CHECK(split.train.n() == 20);
}

TEST_CASE("split: exact proportional arithmetic") {
    Dataset ds = two_class(90, 10);
    SplitResult split = stratified_split(ds, {0.2, 3});
    size_t val_a = 0, val_b = 0;
    for (int y : split.val.y) (y == 0 ? val_a : val_b) += 1;
    CHECK(val_a == 18);
    CHECK(val_b == 2);
}

TEST_CASE("split: deterministic and an exact partition") {
    Dataset ds = two_class(50, 30);
    SplitResult s1 = stratified_split(ds, {0.25, 7});
    SplitResult s2 = stratified_split(ds, {0.25, 7});
    CHECK(s1.train_indices == s2.train_indices);
    CHECK(s1.val_indices == s2.val_indices);

    std::vector<size_t> all = s1.train_indices;
    all.insert(all.end(), s1.val_indices.begin(), s1.val_indices.end());
    std::sort(all.begin(), all.end());
    std::vector<size_t> expected(ds.n());
    for (size_t i = 0; i < ds.n(); ++i) expected[i] = i;
    CHECK(all == expected);
}

TEST_CASE("split: different seeds differ") {
    Dataset ds = two_class(50, 50);
    SplitResult s1 = stratified_split(ds, {0.3, 1});
    SplitResult s2 = stratified_split(ds, {0.3, 2});
    CHECK(s1.val_indices != s2.val_indices);
}

TEST_CASE("split: degenerate class") {
    Dataset ds = two_class(99, 1);
    CHECK_THROWS_AS(stratified_split(ds, {0.5, 1}), DegenerateSplit);
}

TEST_CASE("standardizer: constant column") {
    Matrix x(3, 1);
    x(0, 0) = x(1, 0) = x(2, 0) = 2.0;
    Standardizer s = fit_standardizer(x);
    CHECK(s.means[0] == 2.0);
    CHECK(s.stds[0] == 0.0);
    Matrix z = apply_standardizer(s, x);
    for (size_t i = 0; i < 3; ++i) CHECK(z(i, 0) == 0.0);
}

TEST_CASE("standardizer: population std") {
    Matrix x(2, 1);
    x(0, 0) = 0.0;
    x(1, 0) = 2.0;
    Standardizer s = fit_standardizer(x);
    CHECK(s.means[0] == 1.0);
    CHECK(s.stds[0] == 1.0);
    Matrix z = apply_standardizer(s, x);
    CHECK(z(0, 0) == -1.0);
    CHECK(z(1, 0) == 1.0);
}

TEST_CASE("standardizer: training columns map to mean zero") {
    Rng rng(11);
    Matrix x(200, 3);
    for (size_t i = 0; i < x.rows; ++i) {
        for (size_t j = 0; j < x.cols; ++j) x(i, j) = rng.next_normal() * (j + 1.0) + j;
    }
    Standardizer s = fit_standardizer(x);
    Matrix z = apply_standardizer(s, x);
    for (size_t j = 0; j < x.cols; ++j) {
        double mean = 0.0;
        for (size_t i = 0; i < x.rows; ++i) mean += z(i, j);
        mean /= static_cast<double>(x.rows);
        CHECK(std::abs(mean) < 1e-9);
    }
}

TEST_CASE("property: standardizer is affine-consistent") {
    Rng rng(5);
    Matrix x(60, 2);
    for (auto& v : x.data) v = rng.next_normal();
    const double a = 2.5, b = -3.0;
    Matrix scaled = x;
    for (auto& v : scaled.data) v = a * v + b;

    Standardizer sx = fit_standardizer(x);
    Standardizer ss = fit_standardizer(scaled);
    Matrix zx = apply_standardizer(sx, x);
    Matrix zs = apply_standardizer(ss, scaled);
    // standardization is invariant under positive affine maps of a column
    for (size_t i = 0; i < x.rows; ++i) {
        for (size_t j = 0; j < x.cols; ++j) {
            CHECK(zs(i, j) == doctest::Approx(zx(i, j)).epsilon(1e-12));
        }
    }
}

TEST_CASE("bridge: dataset <-> feature table") {
    FeatureTable table;
    table.feature_names = {"u", "v"};
    table.values = Matrix(2, 2);
    table.values(0, 0) = 1.0;
    table.values(0, 1) = 2.0;
    table.values(1, 0) = 3.0;
    table.values(1, 1) = 4.0;
    table.labels = {"B", "A"};

    Dataset ds = dataset_from_feature_table(table);
    CHECK(ds.class_index.names == std::vector<std::string>{"B", "A"});
    CHECK(ds.y == std::vector<int>{0, 1});

    FeatureTable back = feature_table_from_dataset(ds);
    CHECK(back == table);
}
