#ifndef PKIFLOW_CLUSTER_MODEL_HPP
#define PKIFLOW_CLUSTER_MODEL_HPP

#include <cstdint>
#include <variant>

#include "pkiflow/gmm.hpp"
#include "pkiflow/kmeans.hpp"

namespace pkiflow {

enum class UnsupervisedKind { kmeans, gmm };

std::string unsupervised_kind_name(UnsupervisedKind kind);
UnsupervisedKind unsupervised_kind_from_name(const std::string& name);

// What to fit when a pipeline asks for "one unsupervised member with k clusters".
struct UnsupervisedSpec {
    UnsupervisedKind kind = UnsupervisedKind::kmeans;
    CovarianceType covariance_type = CovarianceType::full; // gmm only
    size_t max_iter = 300;
    double tol = 1e-4;
    double reg = 1e-6; // gmm only
};

using ClusterModel = std::variant<KMeansModel, GmmModel>;

ClusterModel fit_cluster_model(const Matrix& x, const UnsupervisedSpec& spec, size_t k,
                               uint64_t seed);
ClusterAssignment assign_cluster_model(const ClusterModel& model, const Matrix& x);
size_t cluster_model_k(const ClusterModel& model);

} // namespace pkiflow

#endif
