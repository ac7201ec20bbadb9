#include "pkiflow/supervised.hpp"

namespace pkiflow {

std::string supervised_kind_name(SupervisedKind kind) {
    switch (kind) {
    case SupervisedKind::dt: return "dt";
    case SupervisedKind::rf: return "rf";
    case SupervisedKind::gbt: return "gbt";
    }
    return "rf";
}

SupervisedKind supervised_kind_from_name(const std::string& name) {
    if (name == "dt") return SupervisedKind::dt;
    if (name == "rf") return SupervisedKind::rf;
    if (name == "gbt" || name == "xgb") return SupervisedKind::gbt;
    throw InvalidSpec("unknown supervised method '" + name + "'");
}

SupervisedModel fit_supervised(const Dataset& ds, const SupervisedSpec& spec) {
    switch (spec.kind) {
    case SupervisedKind::dt: return cart_fit(ds, spec.dt);
    case SupervisedKind::rf: return rf_fit(ds, spec.rf, spec.jobs);
    case SupervisedKind::gbt: return gbt_fit(ds, spec.gbt);
    }
    throw InvalidSpec("unreachable supervised kind");
}

std::vector<int> predict_supervised(const SupervisedModel& model, const Matrix& x) {
    if (const auto* tree = std::get_if<DecisionTree>(&model)) return tree_predict(*tree, x);
    if (const auto* forest = std::get_if<RandomForest>(&model)) return rf_predict(*forest, x);
    return gbt_predict(std::get<GradientBoostedModel>(model), x);
}

SupervisedKind supervised_model_kind(const SupervisedModel& model) {
    if (std::holds_alternative<DecisionTree>(model)) return SupervisedKind::dt;
    if (std::holds_alternative<RandomForest>(model)) return SupervisedKind::rf;
    return SupervisedKind::gbt;
}

} // namespace pkiflow
