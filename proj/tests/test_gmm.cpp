#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pkiflow/gmm.hpp"
#include "pkiflow/rng.hpp"

using namespace pkiflow;

namespace {

Matrix two_blobs(uint64_t seed, size_t n_per_blob, double center = 10.0) {
    Rng rng(seed);
    Matrix x(2 * n_per_blob, 2);
    for (size_t i = 0; i < n_per_blob; ++i) {
        x(i, 0) = -center + rng.next_normal();
        x(i, 1) = rng.next_normal();
        x(n_per_blob + i, 0) = center + rng.next_normal();
        x(n_per_blob + i, 1) = rng.next_normal();
    }
    return x;
}

constexpr CovarianceType kAllTypes[] = {CovarianceType::spherical, CovarianceType::diag,
                                        CovarianceType::full, CovarianceType::tied};

// Direct density evaluation from the public parameters; no log tricks.
double component_density(const GmmModel& m, size_t c, const double* x) {
    size_t d = m.means.cols;
    std::vector<double> diff(d);
    for (size_t j = 0; j < d; ++j) diff[j] = x[j] - m.means(c, j);
    double maha = 0.0, det = 1.0;
    switch (m.covariance_type) {
    case CovarianceType::spherical:
        for (size_t j = 0; j < d; ++j) maha += diff[j] * diff[j] / m.spherical_var[c];
        det = std::pow(m.spherical_var[c], static_cast<double>(d));
        break;
    case CovarianceType::diag:
        for (size_t j = 0; j < d; ++j) {
            maha += diff[j] * diff[j] / m.diag_var(c, j);
            det *= m.diag_var(c, j);
        }
        break;
    case CovarianceType::full:
    case CovarianceType::tied: {
        const Matrix& cov = m.covariance_type == CovarianceType::full ? m.full_cov[c] : m.tied_cov;
        // 2x2 inverse is enough for these tests
        REQUIRE(d == 2);
        double a = cov(0, 0), b = cov(0, 1), cc = cov(1, 0), dd = cov(1, 1);
        det = a * dd - b * cc;
        double inv00 = dd / det, inv01 = -b / det, inv10 = -cc / det, inv11 = a / det;
        maha = diff[0] * (inv00 * diff[0] + inv01 * diff[1]) +
               diff[1] * (inv10 * diff[0] + inv11 * diff[1]);
        break;
    }
    }
    double norm = std::pow(2.0 * 3.14159265358979323846, static_cast<double>(d) / 2.0) *
                  std::sqrt(det);
    return std::exp(-0.5 * maha) / norm;
}

} // namespace

TEST_CASE("fit: k = 1 full covariance closed form") {
    Rng rng(3);
    Matrix x(50, 2);
    for (size_t i = 0; i < 50; ++i) {
        x(i, 0) = rng.next_normal() * 2.0 + 1.0;
        x(i, 1) = rng.next_normal() - 2.0;
    }
    double reg = 1e-6;
    GmmModel model = gmm_fit(x, {.k = 1, .covariance_type = CovarianceType::full, .seed = 0,
                                 .max_iter = 300, .tol = 1e-4, .reg = reg});

    double mean0 = 0.0, mean1 = 0.0;
    for (size_t i = 0; i < 50; ++i) {
        mean0 += x(i, 0);
        mean1 += x(i, 1);
    }
    mean0 /= 50.0;
    mean1 /= 50.0;
    CHECK(model.means(0, 0) == doctest::Approx(mean0).epsilon(1e-9));
    CHECK(model.means(0, 1) == doctest::Approx(mean1).epsilon(1e-9));

    double c00 = 0.0, c01 = 0.0, c11 = 0.0;
    for (size_t i = 0; i < 50; ++i) {
        c00 += (x(i, 0) - mean0) * (x(i, 0) - mean0);
        c01 += (x(i, 0) - mean0) * (x(i, 1) - mean1);
        c11 += (x(i, 1) - mean1) * (x(i, 1) - mean1);
    }
    CHECK(model.full_cov[0](0, 0) == doctest::Approx(c00 / 50.0 + reg).epsilon(1e-9));
    CHECK(model.full_cov[0](0, 1) == doctest::Approx(c01 / 50.0).epsilon(1e-9));
    CHECK(model.full_cov[0](1, 1) == doctest::Approx(c11 / 50.0 + reg).epsilon(1e-9));
    CHECK(model.weights[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("fit: well-separated blobs get near one-hot responsibilities") {
    Matrix x = two_blobs(17, 100);
    for (CovarianceType type : kAllTypes) {
        GmmModel model = gmm_fit(x, {.k = 2, .covariance_type = type, .seed = 4,
                                     .max_iter = 300, .tol = 1e-6, .reg = 1e-6});
        Matrix resp = gmm_responsibilities(model, x);
        ClusterAssignment hard = gmm_assign(model, x);
        // blob membership must be pure: rows 0..99 one component, 100..199 the other
        int first = hard.labels[0];
        int second = hard.labels[100];
        CHECK(first != second);
        for (size_t i = 0; i < 100; ++i) {
            CHECK(hard.labels[i] == first);
            CHECK(resp(i, static_cast<size_t>(first)) >= 0.999);
        }
        for (size_t i = 100; i < 200; ++i) {
            CHECK(hard.labels[i] == second);
            CHECK(resp(i, static_cast<size_t>(second)) >= 0.999);
        }
    }
}

TEST_CASE("fit: log-likelihood trace never decreases, all covariance types") {
    for (uint64_t seed = 0; seed < 10; ++seed) {
        Matrix x = two_blobs(seed, 100, 3.0); // moderately overlapping
        for (CovarianceType type : kAllTypes) {
            GmmModel model = gmm_fit(x, {.k = 3, .covariance_type = type, .seed = seed,
                                         .max_iter = 200, .tol = 1e-7, .reg = 1e-6});
            for (size_t t = 1; t < model.loglik_trace.size(); ++t) {
                double prev = model.loglik_trace[t - 1];
                CHECK(model.loglik_trace[t] >= prev - 1e-8 * (1.0 + std::abs(prev)));
            }
        }
    }
}

TEST_CASE("fit: weights sum to one") {
    Matrix x = two_blobs(5, 80, 4.0);
    for (CovarianceType type : kAllTypes) {
        GmmModel model = gmm_fit(x, {.k = 4, .covariance_type = type, .seed = 11,
                                     .max_iter = 100, .tol = 1e-5, .reg = 1e-6});
        double sum = 0.0;
        for (double w : model.weights) sum += w;
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("fit: deterministic per seed") {
    Matrix x = two_blobs(9, 60, 5.0);
    GmmModel a = gmm_fit(x, {.k = 3, .covariance_type = CovarianceType::diag, .seed = 21});
    GmmModel b = gmm_fit(x, {.k = 3, .covariance_type = CovarianceType::diag, .seed = 21});
    CHECK(a.means.data == b.means.data);
    CHECK(a.weights == b.weights);
    CHECK(a.final_loglik == b.final_loglik);
}

TEST_CASE("fit: too few points") {
    Matrix x(2, 2);
    CHECK_THROWS_AS(gmm_fit(x, {.k = 3}), TooFewPoints);
}

TEST_CASE("fit: zero regularization on degenerate data is singular") {
    Matrix x(10, 2);
    for (size_t i = 0; i < 10; ++i) {
        x(i, 0) = static_cast<double>(i);
        x(i, 1) = 2.0 * x(i, 0); // rank 1
    }
    CHECK_THROWS_AS(gmm_fit(x, {.k = 1, .covariance_type = CovarianceType::full, .seed = 0,
                                .max_iter = 50, .tol = 1e-4, .reg = 0.0}),
                    SingularCovariance);
}

TEST_CASE("assign: point at the dominant component mean") {
    GmmModel model;
    model.k = 2;
    model.covariance_type = CovarianceType::spherical;
    model.weights = {0.7, 0.3};
    model.means = Matrix(2, 1);
    model.means(0, 0) = 0.0;
    model.means(1, 0) = 4.0;
    model.spherical_var = {1.0, 1.0};

    Matrix probe(1, 1);
    probe(0, 0) = 0.0;
    CHECK(gmm_assign(model, probe).labels[0] == 0);
    probe(0, 0) = 4.0;
    CHECK(gmm_assign(model, probe).labels[0] == 1);
}

TEST_CASE("assign: symmetric midpoint ties to component 0") {
    GmmModel model;
    model.k = 2;
    model.covariance_type = CovarianceType::spherical;
    model.weights = {0.5, 0.5};
    model.means = Matrix(2, 1);
    model.means(0, 0) = -1.0;
    model.means(1, 0) = 1.0;
    model.spherical_var = {1.0, 1.0};

    Matrix probe(1, 1);
    probe(0, 0) = 0.0;
    CHECK(gmm_assign(model, probe).labels[0] == 0);
}

TEST_CASE("assign: dimension mismatch") {
    GmmModel model;
    model.k = 1;
    model.covariance_type = CovarianceType::spherical;
    model.weights = {1.0};
    model.means = Matrix(1, 2);
    model.spherical_var = {1.0};
    Matrix probe(1, 3);
    CHECK_THROWS_AS(gmm_assign(model, probe), DimensionMismatch);
}

TEST_CASE("property: assign matches brute-force density argmax on random points") {
    Matrix x = two_blobs(31, 100, 2.0);
    Rng rng(99);
    for (CovarianceType type : kAllTypes) {
        GmmModel model = gmm_fit(x, {.k = 3, .covariance_type = type, .seed = 8,
                                     .max_iter = 100, .tol = 1e-5, .reg = 1e-6});
        Matrix probes(100, 2);
        for (auto& v : probes.data) v = rng.next_normal() * 4.0;
        ClusterAssignment assigned = gmm_assign(model, probes);
        for (size_t i = 0; i < probes.rows; ++i) {
            size_t best = 0;
            double best_joint = -1.0;
            for (size_t c = 0; c < model.k; ++c) {
                double joint = model.weights[c] * component_density(model, c, probes.row_ptr(i));
                if (joint > best_joint) {
                    best_joint = joint;
                    best = c;
                }
            }
            CHECK(assigned.labels[i] == static_cast<int>(best));
        }
    }
}

TEST_CASE("property: hard labels on separated blobs match the k-means partition") {
    Matrix x = two_blobs(55, 100);
    GmmModel gmm = gmm_fit(x, {.k = 2, .covariance_type = CovarianceType::full, .seed = 2});
    KMeansModel km = kmeans_fit(x, {.k = 2, .seed = 2});
    ClusterAssignment ga = gmm_assign(gmm, x);
    ClusterAssignment ka = kmeans_assign(km, x);
    // same partition up to label swap
    bool flipped = ga.labels[0] != ka.labels[0];
    for (size_t i = 0; i < x.rows; ++i) {
        int expected = flipped ? 1 - ka.labels[i] : ka.labels[i];
        CHECK(ga.labels[i] == expected);
    }
}
