#ifndef PKIFLOW_KMEANS_HPP
#define PKIFLOW_KMEANS_HPP

#include <cstdint>
#include <vector>

#include "pkiflow/matrix.hpp"

namespace pkiflow {

struct ClusterAssignment {
    std::vector<int> labels; // in [0, k)
};

struct KMeansParams {
    size_t k = 8;
    uint64_t seed = 0;
    size_t max_iter = 300;
    double tol = 1e-4; // max centroid shift (euclidean) to declare convergence
};

struct KMeansModel {
    size_t k = 0;
    Matrix centroids; // k x d
    double inertia = 0.0;
    size_t iterations_run = 0;
    std::vector<double> inertia_trace; // one entry per Lloyd iteration, non-increasing
};

// k-means++ seeding then Lloyd iterations. Empty clusters are repaired by
// moving the point currently farthest from its centroid. Deterministic per
// (x, params). Throws TooFewPoints when n < k.
KMeansModel kmeans_fit(const Matrix& x, const KMeansParams& params);

// Nearest centroid by squared euclidean distance, ties to the lowest index.
// Throws DimensionMismatch.
ClusterAssignment kmeans_assign(const KMeansModel& model, const Matrix& x);

// k-means++ center selection alone; shared with the GMM initializer.
std::vector<size_t> kmeans_plus_plus_centers(const Matrix& x, size_t k, class Rng& rng);

} // namespace pkiflow

#endif
