#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pkiflow/kmeans.hpp"
#include "pkiflow/rng.hpp"

using namespace pkiflow;

namespace {

Matrix one_d(const std::vector<double>& values) {
    Matrix x(values.size(), 1);
    for (size_t i = 0; i < values.size(); ++i) x(i, 0) = values[i];
    return x;
}

Matrix random_blobs(uint64_t seed, size_t n_per_blob, const std::vector<std::pair<double, double>>& centers) {
    Rng rng(seed);
    Matrix x(n_per_blob * centers.size(), 2);
    size_t row = 0;
    for (const auto& [cx, cy] : centers) {
        for (size_t i = 0; i < n_per_blob; ++i) {
            x(row, 0) = cx + rng.next_normal();
            x(row, 1) = cy + rng.next_normal();
            ++row;
        }
    }
    return x;
}

} // namespace

TEST_CASE("fit: two 1-d clusters, exact centroids and inertia") {
    Matrix x = one_d({0, 1, 10, 11});
    KMeansModel model = kmeans_fit(x, {.k = 2, .seed = 0});
    std::vector<double> centroids{model.centroids(0, 0), model.centroids(1, 0)};
    std::sort(centroids.begin(), centroids.end());
    CHECK(centroids[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(centroids[1] == doctest::Approx(10.5).epsilon(1e-12));
    CHECK(model.inertia == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit: k = 1 closed form") {
    Matrix x = one_d({1, 2, 3, 4, 10});
    KMeansModel model = kmeans_fit(x, {.k = 1, .seed = 5});
    double mean = (1 + 2 + 3 + 4 + 10) / 5.0;
    CHECK(model.centroids(0, 0) == doctest::Approx(mean).epsilon(1e-12));
    double expected_inertia = 0.0;
    for (size_t i = 0; i < 5; ++i) expected_inertia += (x(i, 0) - mean) * (x(i, 0) - mean);
    CHECK(model.inertia == doctest::Approx(expected_inertia).epsilon(1e-12));
}

TEST_CASE("fit: identical seeds give bit-identical models") {
    Matrix x = random_blobs(42, 60, {{0, 0}, {8, 8}, {-8, 4}});
    KMeansModel a = kmeans_fit(x, {.k = 3, .seed = 9});
    KMeansModel b = kmeans_fit(x, {.k = 3, .seed = 9});
    CHECK(a.centroids.data == b.centroids.data);
    CHECK(a.inertia == b.inertia);
    CHECK(a.iterations_run == b.iterations_run);
}

TEST_CASE("fit: inertia trace never increases") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
        Matrix x = random_blobs(seed, 40, {{0, 0}, {6, 0}, {0, 6}, {6, 6}});
        KMeansModel model = kmeans_fit(x, {.k = 4, .seed = seed});
        for (size_t t = 1; t < model.inertia_trace.size(); ++t) {
            CHECK(model.inertia_trace[t] <= model.inertia_trace[t - 1] + 1e-9);
        }
    }
}

TEST_CASE("fit: too few points") {
    Matrix x = one_d({1, 2});
    CHECK_THROWS_AS(kmeans_fit(x, {.k = 3, .seed = 0}), TooFewPoints);
}

TEST_CASE("fit: duplicate points still produce k centroids") {
    Matrix x = one_d({5, 5, 5, 5});
    KMeansModel model = kmeans_fit(x, {.k = 2, .seed = 1});
    CHECK(model.k == 2);
    CHECK(model.inertia == doctest::Approx(0.0));
}

TEST_CASE("assign: exact centroid hit and tie rule") {
    KMeansModel model;
    model.k = 2;
    model.centroids = Matrix(2, 1);
    model.centroids(0, 0) = 0.0;
    model.centroids(1, 0) = 10.0;

    CHECK(kmeans_assign(model, one_d({10.0})).labels[0] == 1);
    CHECK(kmeans_assign(model, one_d({0.0})).labels[0] == 0);
    CHECK(kmeans_assign(model, one_d({5.0})).labels[0] == 0); // equidistant -> lowest index
}

TEST_CASE("assign: dimension mismatch") {
    KMeansModel model;
    model.k = 1;
    model.centroids = Matrix(1, 2);
    CHECK_THROWS_AS(kmeans_assign(model, one_d({1.0})), DimensionMismatch);
}

TEST_CASE("assign: training assignment reproduces the fitted inertia") {
    Matrix x = random_blobs(7, 50, {{0, 0}, {10, 2}});
    KMeansModel model = kmeans_fit(x, {.k = 2, .seed = 3});
    ClusterAssignment assignment = kmeans_assign(model, x);
    double inertia = 0.0;
    for (size_t i = 0; i < x.rows; ++i) {
        const double* c = model.centroids.row_ptr(static_cast<size_t>(assignment.labels[i]));
        inertia += squared_distance(x.row_ptr(i), c, x.cols);
    }
    CHECK(inertia == doctest::Approx(model.inertia).epsilon(1e-9));
}
