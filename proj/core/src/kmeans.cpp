#include "pkiflow/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pkiflow/rng.hpp"

namespace pkiflow {

std::vector<size_t> kmeans_plus_plus_centers(const Matrix& x, size_t k, Rng& rng) {
    size_t n = x.rows;
    std::vector<size_t> centers;
    centers.reserve(k);
    centers.push_back(rng.next_index(n));

    std::vector<double> min_dist(n, std::numeric_limits<double>::infinity());
    for (size_t picked = 1; picked < k; ++picked) {
        const double* last = x.row_ptr(centers.back());
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double d = squared_distance(x.row_ptr(i), last, x.cols);
            if (d < min_dist[i]) min_dist[i] = d;
            total += min_dist[i];
        }
        size_t chosen;
        if (total <= 0.0) {
            chosen = rng.next_index(n); // all points coincide with a center
        } else {
            double u = rng.next_double() * total;
            double acc = 0.0;
            chosen = n - 1;
            for (size_t i = 0; i < n; ++i) {
                acc += min_dist[i];
                if (u < acc) {
                    chosen = i;
                    break;
                }
            }
        }
        centers.push_back(chosen);
    }
    return centers;
}

namespace {

int nearest_centroid(const Matrix& centroids, const double* point, size_t d, double* dist_out) {
    int best = 0;
    double best_dist = squared_distance(point, centroids.row_ptr(0), d);
    for (size_t c = 1; c < centroids.rows; ++c) {
        double dist = squared_distance(point, centroids.row_ptr(c), d);
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(c);
        }
    }
    if (dist_out) *dist_out = best_dist;
    return best;
}

} // namespace

KMeansModel kmeans_fit(const Matrix& x, const KMeansParams& params) {
    size_t n = x.rows;
    size_t d = x.cols;
    size_t k = params.k;
    if (k == 0) throw InvalidSpec("k must be >= 1");
    if (n < k) throw TooFewPoints(std::to_string(n) + " points for k=" + std::to_string(k));

    Rng rng(params.seed);
    std::vector<size_t> seeds = kmeans_plus_plus_centers(x, k, rng);

    KMeansModel model;
    model.k = k;
    model.centroids = Matrix(k, d);
    for (size_t c = 0; c < k; ++c) {
        const double* src = x.row_ptr(seeds[c]);
        std::copy(src, src + d, model.centroids.row_ptr(c));
    }

    std::vector<int> assignment(n, -1);
    std::vector<double> dist(n, 0.0);
    std::vector<size_t> cluster_size(k, 0);

    for (size_t iter = 0; iter < params.max_iter; ++iter) {
        bool changed = false;
        std::fill(cluster_size.begin(), cluster_size.end(), 0);
        for (size_t i = 0; i < n; ++i) {
            int c = nearest_centroid(model.centroids, x.row_ptr(i), d, &dist[i]);
            if (c != assignment[i]) changed = true;
            assignment[i] = c;
            ++cluster_size[static_cast<size_t>(c)];
        }

        // Repair: give each empty cluster the point farthest from its centroid.
        for (size_t c = 0; c < k; ++c) {
            if (cluster_size[c] > 0) continue;
            size_t worst = 0;
            double worst_dist = -1.0;
            for (size_t i = 0; i < n; ++i) {
                if (cluster_size[static_cast<size_t>(assignment[i])] <= 1) continue;
                if (dist[i] > worst_dist) {
                    worst_dist = dist[i];
                    worst = i;
                }
            }
            --cluster_size[static_cast<size_t>(assignment[worst])];
            assignment[worst] = static_cast<int>(c);
            cluster_size[c] = 1;
            const double* src = x.row_ptr(worst);
            std::copy(src, src + d, model.centroids.row_ptr(c));
            dist[worst] = 0.0;
            changed = true;
        }

        double inertia = 0.0;
        for (size_t i = 0; i < n; ++i) inertia += dist[i];
        model.inertia_trace.push_back(inertia);
        model.inertia = inertia;
        model.iterations_run = iter + 1;

        // Update step: centroid = mean of its members.
        Matrix updated(k, d, 0.0);
        for (size_t i = 0; i < n; ++i) {
            const double* src = x.row_ptr(i);
            double* dst = updated.row_ptr(static_cast<size_t>(assignment[i]));
            for (size_t j = 0; j < d; ++j) dst[j] += src[j];
        }
        double shift = 0.0;
        for (size_t c = 0; c < k; ++c) {
            double* dst = updated.row_ptr(c);
            double inv = 1.0 / static_cast<double>(cluster_size[c]);
            for (size_t j = 0; j < d; ++j) dst[j] *= inv;
            shift = std::max(shift, std::sqrt(squared_distance(dst, model.centroids.row_ptr(c), d)));
        }
        model.centroids = std::move(updated);
        if (!changed || shift < params.tol) break;
    }

    // Final inertia against the converged centroids.
    double inertia = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double di;
        nearest_centroid(model.centroids, x.row_ptr(i), d, &di);
        inertia += di;
    }
    model.inertia = inertia;
    return model;
}

ClusterAssignment kmeans_assign(const KMeansModel& model, const Matrix& x) {
    if (x.cols != model.centroids.cols)
        throw DimensionMismatch("model has " + std::to_string(model.centroids.cols) +
                                " columns, input has " + std::to_string(x.cols));
    ClusterAssignment out;
    out.labels.resize(x.rows);
    for (size_t i = 0; i < x.rows; ++i)
        out.labels[i] = nearest_centroid(model.centroids, x.row_ptr(i), x.cols, nullptr);
    return out;
}

} // namespace pkiflow
