#include "pkiflow/cluster_model.hpp"

namespace pkiflow {

std::string unsupervised_kind_name(UnsupervisedKind kind) {
    return kind == UnsupervisedKind::kmeans ? "kmeans" : "gmm";
}

UnsupervisedKind unsupervised_kind_from_name(const std::string& name) {
    if (name == "kmeans") return UnsupervisedKind::kmeans;
    if (name == "gmm") return UnsupervisedKind::gmm;
    throw InvalidSpec("unknown unsupervised method '" + name + "'");
}

ClusterModel fit_cluster_model(const Matrix& x, const UnsupervisedSpec& spec, size_t k,
                               uint64_t seed) {
    if (spec.kind == UnsupervisedKind::kmeans) {
        KMeansParams params;
        params.k = k;
        params.seed = seed;
        params.max_iter = spec.max_iter;
        params.tol = spec.tol;
        return kmeans_fit(x, params);
    }
    GmmParams params;
    params.k = k;
    params.covariance_type = spec.covariance_type;
    params.seed = seed;
    params.max_iter = spec.max_iter;
    params.tol = spec.tol;
    params.reg = spec.reg;
    return gmm_fit(x, params);
}

ClusterAssignment assign_cluster_model(const ClusterModel& model, const Matrix& x) {
    if (const auto* km = std::get_if<KMeansModel>(&model)) return kmeans_assign(*km, x);
    return gmm_assign(std::get<GmmModel>(model), x);
}

size_t cluster_model_k(const ClusterModel& model) {
    if (const auto* km = std::get_if<KMeansModel>(&model)) return km->k;
    return std::get<GmmModel>(model).k;
}

} // namespace pkiflow
