#include "pkiflow/model_io.hpp"

#include <json.hpp>

namespace pkiflow {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (size_t i = 0; i < m.rows; ++i) {
        json row = json::array();
        for (size_t j = 0; j < m.cols; ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return json{{"rows", m.rows}, {"cols", m.cols}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<size_t>(), j.at("cols").get<size_t>());
    const json& rows = j.at("data");
    for (size_t i = 0; i < m.rows; ++i) {
        for (size_t c = 0; c < m.cols; ++c) m(i, c) = rows.at(i).at(c).get<double>();
    }
    return m;
}

void check_header(const json& j, const std::string& expected_type) {
    if (j.at("format_version").get<int>() != kFormatVersion)
        throw InvalidSpec("unsupported model format_version");
    if (j.at("type").get<std::string>() != expected_type)
        throw InvalidSpec("expected a '" + expected_type + "' document, found '" +
                          j.at("type").get<std::string>() + "'");
}

json kmeans_to_json(const KMeansModel& m) {
    return json{{"format_version", kFormatVersion},
                {"type", "kmeans"},
                {"k", m.k},
                {"centroids", matrix_to_json(m.centroids)},
                {"inertia", m.inertia},
                {"iterations_run", m.iterations_run},
                {"inertia_trace", m.inertia_trace}};
}

KMeansModel kmeans_from_json(const json& j) {
    check_header(j, "kmeans");
    KMeansModel m;
    m.k = j.at("k").get<size_t>();
    m.centroids = matrix_from_json(j.at("centroids"));
    m.inertia = j.at("inertia").get<double>();
    m.iterations_run = j.at("iterations_run").get<size_t>();
    m.inertia_trace = j.at("inertia_trace").get<std::vector<double>>();
    return m;
}

json gmm_to_json(const GmmModel& m) {
    json out{{"format_version", kFormatVersion},
             {"type", "gmm"},
             {"k", m.k},
             {"covariance_type", covariance_type_name(m.covariance_type)},
             {"weights", m.weights},
             {"means", matrix_to_json(m.means)},
             {"final_loglik", m.final_loglik},
             {"loglik_trace", m.loglik_trace},
             {"iterations_run", m.iterations_run}};
    switch (m.covariance_type) {
    case CovarianceType::spherical: out["spherical_var"] = m.spherical_var; break;
    case CovarianceType::diag: out["diag_var"] = matrix_to_json(m.diag_var); break;
    case CovarianceType::full: {
        json covs = json::array();
        for (const auto& cov : m.full_cov) covs.push_back(matrix_to_json(cov));
        out["full_cov"] = std::move(covs);
        break;
    }
    case CovarianceType::tied: out["tied_cov"] = matrix_to_json(m.tied_cov); break;
    }
    return out;
}

GmmModel gmm_from_json(const json& j) {
    check_header(j, "gmm");
    GmmModel m;
    m.k = j.at("k").get<size_t>();
    m.covariance_type = covariance_type_from_name(j.at("covariance_type").get<std::string>());
    m.weights = j.at("weights").get<std::vector<double>>();
    m.means = matrix_from_json(j.at("means"));
    m.final_loglik = j.at("final_loglik").get<double>();
    m.loglik_trace = j.at("loglik_trace").get<std::vector<double>>();
    m.iterations_run = j.at("iterations_run").get<size_t>();
    switch (m.covariance_type) {
    case CovarianceType::spherical:
        m.spherical_var = j.at("spherical_var").get<std::vector<double>>();
        break;
    case CovarianceType::diag: m.diag_var = matrix_from_json(j.at("diag_var")); break;
    case CovarianceType::full:
        for (const auto& cov : j.at("full_cov")) m.full_cov.push_back(matrix_from_json(cov));
        break;
    case CovarianceType::tied: m.tied_cov = matrix_from_json(j.at("tied_cov")); break;
    }
    return m;
}

json tree_nodes_to_json(const std::vector<TreeNode>& nodes) {
    json out = json::array();
    for (const auto& n : nodes) {
        if (n.is_leaf()) {
            out.push_back(json{{"counts", n.class_counts}});
        } else {
            out.push_back(json{{"feature", n.split_feature},
                               {"threshold", n.threshold},
                               {"left", n.left},
                               {"right", n.right}});
        }
    }
    return out;
}

std::vector<TreeNode> tree_nodes_from_json(const json& j) {
    std::vector<TreeNode> nodes;
    for (const auto& item : j) {
        TreeNode n;
        if (item.contains("counts")) {
            n.class_counts = item.at("counts").get<std::vector<size_t>>();
        } else {
            n.split_feature = item.at("feature").get<int>();
            n.threshold = item.at("threshold").get<double>();
            n.left = item.at("left").get<int>();
            n.right = item.at("right").get<int>();
        }
        nodes.push_back(std::move(n));
    }
    return nodes;
}

json dt_params_to_json(const DecisionTreeParams& p) {
    return json{{"max_depth", p.max_depth},
                {"min_samples_split", p.min_samples_split},
                {"min_impurity_decrease", p.min_impurity_decrease}};
}

DecisionTreeParams dt_params_from_json(const json& j) {
    DecisionTreeParams p;
    p.max_depth = j.at("max_depth").get<size_t>();
    p.min_samples_split = j.at("min_samples_split").get<size_t>();
    p.min_impurity_decrease = j.at("min_impurity_decrease").get<double>();
    return p;
}

json dt_to_json(const DecisionTree& t) {
    return json{{"format_version", kFormatVersion},
                {"type", "decision_tree"},
                {"n_classes", t.n_classes},
                {"params", dt_params_to_json(t.params)},
                {"nodes", tree_nodes_to_json(t.nodes)}};
}

DecisionTree dt_from_json(const json& j) {
    check_header(j, "decision_tree");
    DecisionTree t;
    t.n_classes = j.at("n_classes").get<size_t>();
    t.params = dt_params_from_json(j.at("params"));
    t.nodes = tree_nodes_from_json(j.at("nodes"));
    return t;
}

json rf_to_json(const RandomForest& f) {
    json trees = json::array();
    for (const auto& t : f.trees) {
        trees.push_back(json{{"params", dt_params_to_json(t.params)},
                             {"nodes", tree_nodes_to_json(t.nodes)}});
    }
    return json{{"format_version", kFormatVersion},
                {"type", "random_forest"},
                {"n_classes", f.n_classes},
                {"params",
                 json{{"n_trees", f.params.n_trees},
                      {"features_per_split", f.params.features_per_split},
                      {"bootstrap", f.params.bootstrap},
                      {"tree", dt_params_to_json(f.params.tree)},
                      {"seed", f.params.seed}}},
                {"trees", std::move(trees)}};
}

RandomForest rf_from_json(const json& j) {
    check_header(j, "random_forest");
    RandomForest f;
    f.n_classes = j.at("n_classes").get<size_t>();
    const json& p = j.at("params");
    f.params.n_trees = p.at("n_trees").get<size_t>();
    f.params.features_per_split = p.at("features_per_split").get<size_t>();
    f.params.bootstrap = p.at("bootstrap").get<bool>();
    f.params.tree = dt_params_from_json(p.at("tree"));
    f.params.seed = p.at("seed").get<uint64_t>();
    for (const auto& t : j.at("trees")) {
        DecisionTree tree;
        tree.n_classes = f.n_classes;
        tree.params = dt_params_from_json(t.at("params"));
        tree.nodes = tree_nodes_from_json(t.at("nodes"));
        f.trees.push_back(std::move(tree));
    }
    return f;
}

json regression_tree_to_json(const RegressionTree& t) {
    json out = json::array();
    for (const auto& n : t.nodes) {
        if (n.is_leaf()) {
            out.push_back(json{{"value", n.value}});
        } else {
            out.push_back(json{{"feature", n.split_feature},
                               {"threshold", n.threshold},
                               {"left", n.left},
                               {"right", n.right}});
        }
    }
    return out;
}

RegressionTree regression_tree_from_json(const json& j) {
    RegressionTree t;
    for (const auto& item : j) {
        RegressionNode n;
        if (item.contains("value")) {
            n.value = item.at("value").get<double>();
        } else {
            n.split_feature = item.at("feature").get<int>();
            n.threshold = item.at("threshold").get<double>();
            n.left = item.at("left").get<int>();
            n.right = item.at("right").get<int>();
        }
        t.nodes.push_back(n);
    }
    return t;
}

json gbt_to_json(const GradientBoostedModel& m) {
    json rounds = json::array();
    for (const auto& round : m.rounds) {
        json class_trees = json::array();
        for (const auto& t : round) class_trees.push_back(regression_tree_to_json(t));
        rounds.push_back(std::move(class_trees));
    }
    return json{{"format_version", kFormatVersion},
                {"type", "gradient_boosted"},
                {"n_classes", m.n_classes},
                {"base_scores", m.base_scores},
                {"params",
                 json{{"n_estimators", m.params.n_estimators},
                      {"learning_rate", m.params.learning_rate},
                      {"max_depth", m.params.max_depth},
                      {"l2_lambda", m.params.l2_lambda},
                      {"min_samples_split", m.params.min_samples_split},
                      {"seed", m.params.seed}}},
                {"train_loss_trace", m.train_loss_trace},
                {"rounds", std::move(rounds)}};
}

GradientBoostedModel gbt_from_json(const json& j) {
    check_header(j, "gradient_boosted");
    GradientBoostedModel m;
    m.n_classes = j.at("n_classes").get<size_t>();
    m.base_scores = j.at("base_scores").get<std::vector<double>>();
    const json& p = j.at("params");
    m.params.n_estimators = p.at("n_estimators").get<size_t>();
    m.params.learning_rate = p.at("learning_rate").get<double>();
    m.params.max_depth = p.at("max_depth").get<size_t>();
    m.params.l2_lambda = p.at("l2_lambda").get<double>();
    m.params.min_samples_split = p.at("min_samples_split").get<size_t>();
    m.params.seed = p.at("seed").get<uint64_t>();
    m.train_loss_trace = j.at("train_loss_trace").get<std::vector<double>>();
    for (const auto& round : j.at("rounds")) {
        std::vector<RegressionTree> class_trees;
        for (const auto& t : round) class_trees.push_back(regression_tree_from_json(t));
        m.rounds.push_back(std::move(class_trees));
    }
    return m;
}

json cluster_to_json_value(const ClusterModel& model) {
    if (const auto* km = std::get_if<KMeansModel>(&model)) return kmeans_to_json(*km);
    return gmm_to_json(std::get<GmmModel>(model));
}

ClusterModel cluster_from_json_value(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "kmeans") return kmeans_from_json(j);
    if (type == "gmm") return gmm_from_json(j);
    throw InvalidSpec("not a cluster model: '" + type + "'");
}

json supervised_to_json_value(const SupervisedModel& model) {
    if (const auto* t = std::get_if<DecisionTree>(&model)) return dt_to_json(*t);
    if (const auto* f = std::get_if<RandomForest>(&model)) return rf_to_json(*f);
    return gbt_to_json(std::get<GradientBoostedModel>(model));
}

SupervisedModel supervised_from_json_value(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "decision_tree") return dt_from_json(j);
    if (type == "random_forest") return rf_from_json(j);
    if (type == "gradient_boosted") return gbt_from_json(j);
    throw InvalidSpec("not a supervised model: '" + type + "'");
}

json parse_document(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw InvalidSpec("malformed model JSON");
    return j;
}

} // namespace

std::string cluster_model_to_json(const ClusterModel& model) {
    return cluster_to_json_value(model).dump();
}

ClusterModel cluster_model_from_json(const std::string& text) {
    return cluster_from_json_value(parse_document(text));
}

std::string supervised_model_to_json(const SupervisedModel& model) {
    return supervised_to_json_value(model).dump();
}

SupervisedModel supervised_model_from_json(const std::string& text) {
    return supervised_from_json_value(parse_document(text));
}

std::string pki_model_to_json(const PkiModel& model) {
    json members = json::array();
    for (const auto& member : model.stack.members) members.push_back(cluster_to_json_value(member));
    json j{{"format_version", kFormatVersion},
           {"type", "pki_model"},
           {"selection",
            json{{"method", selection_method_name(model.selection.method)},
                 {"k", model.selection.k},
                 {"indices", model.selection.indices},
                 {"val_macro_f1", model.selection.val_macro_f1}}},
           {"stack",
            json{{"members", std::move(members)},
                 {"standardizer",
                  json{{"means", model.stack.standardizer.means},
                       {"stds", model.stack.standardizer.stds}}}}},
           {"supervised", supervised_to_json_value(model.supervised)},
           {"class_index", model.class_index.names},
           {"feature_names", model.feature_names}};
    return j.dump();
}

PkiModel pki_model_from_json(const std::string& text) {
    json j = parse_document(text);
    check_header(j, "pki_model");
    PkiModel model;
    const json& sel = j.at("selection");
    model.selection.method = selection_method_from_name(sel.at("method").get<std::string>());
    model.selection.k = sel.at("k").get<size_t>();
    model.selection.indices = sel.at("indices").get<std::vector<size_t>>();
    model.selection.val_macro_f1 = sel.at("val_macro_f1").get<double>();
    const json& stack = j.at("stack");
    for (const auto& member : stack.at("members"))
        model.stack.members.push_back(cluster_from_json_value(member));
    model.stack.standardizer.means = stack.at("standardizer").at("means").get<std::vector<double>>();
    model.stack.standardizer.stds = stack.at("standardizer").at("stds").get<std::vector<double>>();
    model.supervised = supervised_from_json_value(j.at("supervised"));
    model.class_index.names = j.at("class_index").get<std::vector<std::string>>();
    model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    return model;
}

} // namespace pkiflow
