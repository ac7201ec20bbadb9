#ifndef PKIFLOW_SUPERVISED_HPP
#define PKIFLOW_SUPERVISED_HPP

#include <string>
#include <variant>

#include "pkiflow/decision_tree.hpp"
#include "pkiflow/gradient_boosting.hpp"
#include "pkiflow/random_forest.hpp"

namespace pkiflow {

enum class SupervisedKind { dt, rf, gbt };

std::string supervised_kind_name(SupervisedKind kind);
SupervisedKind supervised_kind_from_name(const std::string& name);

struct SupervisedSpec {
    SupervisedKind kind = SupervisedKind::rf;
    DecisionTreeParams dt;
    RandomForestParams rf;
    GbtParams gbt;
    unsigned jobs = 1;

    // The sweeps hand each candidate a derived seed through here.
    void set_seed(uint64_t seed) {
        rf.seed = seed;
        gbt.seed = seed;
    }
};

using SupervisedModel = std::variant<DecisionTree, RandomForest, GradientBoostedModel>;

SupervisedModel fit_supervised(const Dataset& ds, const SupervisedSpec& spec);
std::vector<int> predict_supervised(const SupervisedModel& model, const Matrix& x);
SupervisedKind supervised_model_kind(const SupervisedModel& model);

} // namespace pkiflow

#endif
