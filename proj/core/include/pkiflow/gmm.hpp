#ifndef PKIFLOW_GMM_HPP
#define PKIFLOW_GMM_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pkiflow/kmeans.hpp"
#include "pkiflow/matrix.hpp"

namespace pkiflow {

enum class CovarianceType { spherical, diag, full, tied };

std::string covariance_type_name(CovarianceType type);
CovarianceType covariance_type_from_name(const std::string& name);

struct GmmParams {
    size_t k = 1;
    CovarianceType covariance_type = CovarianceType::full;
    uint64_t seed = 0;
    size_t max_iter = 300;
    double tol = 1e-4;  // on the change in mean log-likelihood
    double reg = 1e-6;  // ridge added to every covariance diagonal each M-step
};

struct GmmModel {
    size_t k = 0;
    CovarianceType covariance_type = CovarianceType::full;
    std::vector<double> weights; // sums to 1
    Matrix means;                // k x d

    // Exactly one of these is populated, per covariance_type.
    std::vector<double> spherical_var; // k
    Matrix diag_var;                   // k x d
    std::vector<Matrix> full_cov;      // k matrices, d x d
    Matrix tied_cov;                   // d x d

    double final_loglik = 0.0;         // mean log-likelihood per sample
    std::vector<double> loglik_trace;  // one entry per EM iteration, non-decreasing
    size_t iterations_run = 0;
};

// EM initialized from a k-means++ hard assignment. Convergence when the mean
// log-likelihood moves less than tol. Deterministic per (x, params).
// Throws TooFewPoints, and SingularCovariance when reg is too small to keep
// the covariances positive-definite.
GmmModel gmm_fit(const Matrix& x, const GmmParams& params);

// Posterior responsibilities, rows summing to 1. Throws DimensionMismatch.
Matrix gmm_responsibilities(const GmmModel& model, const Matrix& x);

// Argmax responsibility per row, ties to the lowest component index.
ClusterAssignment gmm_assign(const GmmModel& model, const Matrix& x);

} // namespace pkiflow

#endif
