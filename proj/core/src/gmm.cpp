#include "pkiflow/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pkiflow/rng.hpp"

namespace pkiflow {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Lower-triangular Cholesky factor of a symmetric matrix, in place checks.
// Throws SingularCovariance on a non-positive pivot.
Matrix cholesky(const Matrix& a) {
    size_t d = a.rows;
    Matrix l(d, d, 0.0);
    for (size_t i = 0; i < d; ++i) {
        for (size_t j = 0; j <= i; ++j) {
            double sum = a(i, j);
            for (size_t t = 0; t < j; ++t) sum -= l(i, t) * l(j, t);
            if (i == j) {
                if (!(sum > 0.0))
                    throw SingularCovariance("covariance is not positive-definite");
                l(i, i) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return l;
}

// Per-component terms the log-density needs; rebuilt after every M-step.
struct DensityCache {
    CovarianceType type;
    size_t d = 0;
    std::vector<double> log_norm;   // -0.5 * (d log 2pi + log det)
    std::vector<Matrix> chol;       // full: one per component; tied: single entry
    const GmmModel* model = nullptr;

    void build(const GmmModel& m) {
        model = &m;
        type = m.covariance_type;
        d = m.means.cols;
        log_norm.assign(m.k, 0.0);
        chol.clear();
        switch (type) {
        case CovarianceType::spherical:
            for (size_t c = 0; c < m.k; ++c) {
                if (!(m.spherical_var[c] > 0.0))
                    throw SingularCovariance("non-positive spherical variance");
                log_norm[c] = -0.5 * (d * kLog2Pi + d * std::log(m.spherical_var[c]));
            }
            break;
        case CovarianceType::diag:
            for (size_t c = 0; c < m.k; ++c) {
                double log_det = 0.0;
                for (size_t j = 0; j < d; ++j) {
                    if (!(m.diag_var(c, j) > 0.0))
                        throw SingularCovariance("non-positive diagonal variance");
                    log_det += std::log(m.diag_var(c, j));
                }
                log_norm[c] = -0.5 * (d * kLog2Pi + log_det);
            }
            break;
        case CovarianceType::full:
            for (size_t c = 0; c < m.k; ++c) {
                chol.push_back(cholesky(m.full_cov[c]));
                double log_det = 0.0;
                for (size_t j = 0; j < d; ++j) log_det += std::log(chol[c](j, j));
                log_norm[c] = -0.5 * (d * kLog2Pi) - log_det;
            }
            break;
        case CovarianceType::tied: {
            chol.push_back(cholesky(m.tied_cov));
            double log_det = 0.0;
            for (size_t j = 0; j < d; ++j) log_det += std::log(chol[0](j, j));
            for (size_t c = 0; c < m.k; ++c) log_norm[c] = -0.5 * (d * kLog2Pi) - log_det;
            break;
        }
        }
    }

    // log N(x | mu_c, Sigma_c); diff is scratch of length d.
    double log_density(size_t c, const double* x, std::vector<double>& diff) const {
        const GmmModel& m = *model;
        const double* mu = m.means.row_ptr(c);
        double maha = 0.0;
        switch (type) {
        case CovarianceType::spherical: {
            double s = 0.0;
            for (size_t j = 0; j < d; ++j) {
                double v = x[j] - mu[j];
                s += v * v;
            }
            maha = s / m.spherical_var[c];
            break;
        }
        case CovarianceType::diag: {
            for (size_t j = 0; j < d; ++j) {
                double v = x[j] - mu[j];
                maha += v * v / m.diag_var(c, j);
            }
            break;
        }
        case CovarianceType::full:
        case CovarianceType::tied: {
            const Matrix& l = type == CovarianceType::full ? chol[c] : chol[0];
            for (size_t j = 0; j < d; ++j) diff[j] = x[j] - mu[j];
            // forward-solve L z = diff, accumulate z^2
            for (size_t i = 0; i < d; ++i) {
                double sum = diff[i];
                for (size_t t = 0; t < i; ++t) sum -= l(i, t) * diff[t];
                diff[i] = sum / l(i, i);
                maha += diff[i] * diff[i];
            }
            break;
        }
        }
        return log_norm[c] - 0.5 * maha;
    }
};

// Weighted M-step statistics -> model parameters (adds the ridge).
void m_step(const Matrix& x, const Matrix& resp, double reg, GmmModel& model) {
    size_t n = x.rows;
    size_t d = x.cols;
    size_t k = model.k;

    std::vector<double> nk(k, 0.0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t c = 0; c < k; ++c) nk[c] += resp(i, c);
    }

    Matrix means(k, d, 0.0);
    for (size_t i = 0; i < n; ++i) {
        const double* row = x.row_ptr(i);
        for (size_t c = 0; c < k; ++c) {
            double r = resp(i, c);
            if (r == 0.0) continue;
            double* mu = means.row_ptr(c);
            for (size_t j = 0; j < d; ++j) mu[j] += r * row[j];
        }
    }
    for (size_t c = 0; c < k; ++c) {
        model.weights[c] = nk[c] / static_cast<double>(n);
        if (nk[c] <= 0.0) {
            // dead component: weight 0, parameters kept from the previous step
            continue;
        }
        double* mu = means.row_ptr(c);
        for (size_t j = 0; j < d; ++j) mu[j] /= nk[c];
        std::copy(mu, mu + d, model.means.row_ptr(c));
    }

    switch (model.covariance_type) {
    case CovarianceType::spherical: {
        for (size_t c = 0; c < k; ++c) {
            if (nk[c] <= 0.0) continue;
            const double* mu = model.means.row_ptr(c);
            double scatter = 0.0;
            for (size_t i = 0; i < n; ++i) {
                double r = resp(i, c);
                if (r == 0.0) continue;
                scatter += r * squared_distance(x.row_ptr(i), mu, d);
            }
            model.spherical_var[c] = scatter / (nk[c] * static_cast<double>(d)) + reg;
        }
        break;
    }
    case CovarianceType::diag: {
        for (size_t c = 0; c < k; ++c) {
            if (nk[c] <= 0.0) continue;
            const double* mu = model.means.row_ptr(c);
            std::vector<double> scatter(d, 0.0);
            for (size_t i = 0; i < n; ++i) {
                double r = resp(i, c);
                if (r == 0.0) continue;
                const double* row = x.row_ptr(i);
                for (size_t j = 0; j < d; ++j) {
                    double v = row[j] - mu[j];
                    scatter[j] += r * v * v;
                }
            }
            for (size_t j = 0; j < d; ++j) model.diag_var(c, j) = scatter[j] / nk[c] + reg;
        }
        break;
    }
    case CovarianceType::full: {
        for (size_t c = 0; c < k; ++c) {
            if (nk[c] <= 0.0) continue;
            const double* mu = model.means.row_ptr(c);
            Matrix cov(d, d, 0.0);
            std::vector<double> diff(d);
            for (size_t i = 0; i < n; ++i) {
                double r = resp(i, c);
                if (r == 0.0) continue;
                const double* row = x.row_ptr(i);
                for (size_t j = 0; j < d; ++j) diff[j] = row[j] - mu[j];
                for (size_t a = 0; a < d; ++a) {
                    double ra = r * diff[a];
                    for (size_t b = 0; b <= a; ++b) cov(a, b) += ra * diff[b];
                }
            }
            for (size_t a = 0; a < d; ++a) {
                for (size_t b = 0; b <= a; ++b) {
                    double v = cov(a, b) / nk[c];
                    cov(a, b) = v;
                    cov(b, a) = v;
                }
                cov(a, a) += reg;
            }
            model.full_cov[c] = std::move(cov);
        }
        break;
    }
    case CovarianceType::tied: {
        Matrix cov(d, d, 0.0);
        std::vector<double> diff(d);
        for (size_t c = 0; c < k; ++c) {
            if (nk[c] <= 0.0) continue;
            const double* mu = model.means.row_ptr(c);
            for (size_t i = 0; i < n; ++i) {
                double r = resp(i, c);
                if (r == 0.0) continue;
                const double* row = x.row_ptr(i);
                for (size_t j = 0; j < d; ++j) diff[j] = row[j] - mu[j];
                for (size_t a = 0; a < d; ++a) {
                    double ra = r * diff[a];
                    for (size_t b = 0; b <= a; ++b) cov(a, b) += ra * diff[b];
                }
            }
        }
        for (size_t a = 0; a < d; ++a) {
            for (size_t b = 0; b <= a; ++b) {
                double v = cov(a, b) / static_cast<double>(n);
                cov(a, b) = v;
                cov(b, a) = v;
            }
            cov(a, a) += reg;
        }
        model.tied_cov = std::move(cov);
        break;
    }
    }
}

// E-step; fills resp, returns the mean log-likelihood.
double e_step(const Matrix& x, const DensityCache& cache, const GmmModel& model, Matrix& resp) {
    size_t n = x.rows;
    size_t k = model.k;
    std::vector<double> log_w(k);
    for (size_t c = 0; c < k; ++c)
        log_w[c] = model.weights[c] > 0.0 ? std::log(model.weights[c])
                                          : -std::numeric_limits<double>::infinity();
    std::vector<double> diff(x.cols);
    std::vector<double> joint(k);
    double total = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double* row = x.row_ptr(i);
        double max_joint = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < k; ++c) {
            joint[c] = log_w[c] == -std::numeric_limits<double>::infinity()
                           ? log_w[c]
                           : log_w[c] + cache.log_density(c, row, diff);
            max_joint = std::max(max_joint, joint[c]);
        }
        double sum = 0.0;
        for (size_t c = 0; c < k; ++c) sum += std::exp(joint[c] - max_joint);
        double lse = max_joint + std::log(sum);
        total += lse;
        for (size_t c = 0; c < k; ++c) resp(i, c) = std::exp(joint[c] - lse);
    }
    return total / static_cast<double>(n);
}

} // namespace

std::string covariance_type_name(CovarianceType type) {
    switch (type) {
    case CovarianceType::spherical: return "spherical";
    case CovarianceType::diag: return "diag";
    case CovarianceType::full: return "full";
    case CovarianceType::tied: return "tied";
    }
    return "full";
}

CovarianceType covariance_type_from_name(const std::string& name) {
    if (name == "spherical") return CovarianceType::spherical;
    if (name == "diag") return CovarianceType::diag;
    if (name == "full") return CovarianceType::full;
    if (name == "tied") return CovarianceType::tied;
    throw InvalidSpec("unknown covariance type '" + name + "'");
}

GmmModel gmm_fit(const Matrix& x, const GmmParams& params) {
    size_t n = x.rows;
    size_t d = x.cols;
    size_t k = params.k;
    if (k == 0) throw InvalidSpec("k must be >= 1");
    if (n < k) throw TooFewPoints(std::to_string(n) + " points for k=" + std::to_string(k));

    GmmModel model;
    model.k = k;
    model.covariance_type = params.covariance_type;
    model.weights.assign(k, 0.0);
    model.means = Matrix(k, d);
    Matrix identity(d, d, 0.0);
    for (size_t j = 0; j < d; ++j) identity(j, j) = 1.0;
    switch (params.covariance_type) {
    case CovarianceType::spherical: model.spherical_var.assign(k, 1.0); break;
    case CovarianceType::diag: model.diag_var = Matrix(k, d, 1.0); break;
    case CovarianceType::full: model.full_cov.assign(k, identity); break;
    case CovarianceType::tied: model.tied_cov = identity; break;
    }

    // Hard one-hot responsibilities from a k-means++ seeding.
    Rng rng(params.seed);
    std::vector<size_t> centers = kmeans_plus_plus_centers(x, k, rng);
    Matrix center_mat(k, d);
    for (size_t c = 0; c < k; ++c) {
        const double* src = x.row_ptr(centers[c]);
        std::copy(src, src + d, center_mat.row_ptr(c));
    }
    KMeansModel seed_model;
    seed_model.k = k;
    seed_model.centroids = std::move(center_mat);
    ClusterAssignment hard = kmeans_assign(seed_model, x);

    std::vector<size_t> sizes(k, 0);
    for (int label : hard.labels) ++sizes[static_cast<size_t>(label)];
    for (size_t c = 0; c < k; ++c) {
        if (sizes[c] > 0) continue;
        // duplicate seeds can starve a component; hand it the farthest point
        size_t worst = 0;
        double worst_dist = -1.0;
        for (size_t i = 0; i < n; ++i) {
            size_t owner = static_cast<size_t>(hard.labels[i]);
            if (sizes[owner] <= 1) continue;
            double dist = squared_distance(x.row_ptr(i), seed_model.centroids.row_ptr(owner), d);
            if (dist > worst_dist) {
                worst_dist = dist;
                worst = i;
            }
        }
        --sizes[static_cast<size_t>(hard.labels[worst])];
        hard.labels[worst] = static_cast<int>(c);
        sizes[c] = 1;
    }

    Matrix resp(n, k, 0.0);
    for (size_t i = 0; i < n; ++i) resp(i, static_cast<size_t>(hard.labels[i])) = 1.0;
    m_step(x, resp, params.reg, model);

    DensityCache cache;
    double prev_ll = -std::numeric_limits<double>::infinity();
    for (size_t iter = 0; iter < params.max_iter; ++iter) {
        cache.build(model);
        double ll = e_step(x, cache, model, resp);
        model.loglik_trace.push_back(ll);
        model.final_loglik = ll;
        model.iterations_run = iter + 1;
        if (iter > 0 && std::abs(ll - prev_ll) < params.tol) break;
        prev_ll = ll;
        m_step(x, resp, params.reg, model);
    }
    return model;
}

Matrix gmm_responsibilities(const GmmModel& model, const Matrix& x) {
    if (x.cols != model.means.cols)
        throw DimensionMismatch("model has " + std::to_string(model.means.cols) +
                                " columns, input has " + std::to_string(x.cols));
    DensityCache cache;
    cache.build(model);
    Matrix resp(x.rows, model.k);
    e_step(x, cache, model, resp);
    return resp;
}

ClusterAssignment gmm_assign(const GmmModel& model, const Matrix& x) {
    if (x.cols != model.means.cols)
        throw DimensionMismatch("model has " + std::to_string(model.means.cols) +
                                " columns, input has " + std::to_string(x.cols));
    DensityCache cache;
    cache.build(model);
    ClusterAssignment out;
    out.labels.resize(x.rows);
    std::vector<double> diff(x.cols);
    std::vector<double> log_w(model.k);
    for (size_t c = 0; c < model.k; ++c)
        log_w[c] = model.weights[c] > 0.0 ? std::log(model.weights[c])
                                          : -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row_ptr(i);
        int best = 0;
        double best_joint = -std::numeric_limits<double>::infinity();
        for (size_t c = 0; c < model.k; ++c) {
            double joint = log_w[c] == -std::numeric_limits<double>::infinity()
                               ? log_w[c]
                               : log_w[c] + cache.log_density(c, row, diff);
            if (joint > best_joint) {
                best_joint = joint;
                best = static_cast<int>(c);
            }
        }
        out.labels[i] = best;
    }
    return out;
}

} // namespace pkiflow
