#ifndef PKIFLOW_GRADIENT_BOOSTING_HPP
#define PKIFLOW_GRADIENT_BOOSTING_HPP

#include <cstdint>
#include <vector>

#include "pkiflow/dataset.hpp"
#include "pkiflow/matrix.hpp"

namespace pkiflow {

struct GbtParams {
    size_t n_estimators = 100;
    double learning_rate = 0.3;
    size_t max_depth = 6;
    double l2_lambda = 1.0;       // leaf L2 regularization
    size_t min_samples_split = 2;
    uint64_t seed = 0;            // carried for interface symmetry; fitting is deterministic

    bool operator==(const GbtParams& other) const = default;
};

struct RegressionNode {
    int split_feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double value = 0.0; // leaves only

    bool is_leaf() const { return split_feature < 0; }
    bool operator==(const RegressionNode& other) const = default;
};

struct RegressionTree {
    std::vector<RegressionNode> nodes;

    double predict(const double* row) const {
        size_t node = 0;
        while (!nodes[node].is_leaf()) {
            const RegressionNode& n = nodes[node];
            node = static_cast<size_t>(row[n.split_feature] <= n.threshold ? n.left : n.right);
        }
        return nodes[node].value;
    }
    bool operator==(const RegressionTree& other) const = default;
};

// Multiclass softmax boosting. Round r fits one second-order regression tree
// per class on (gradient p_c - 1{y=c}, hessian p_c(1-p_c)); leaf values are
// -sum(g) / (sum(h) + l2_lambda) and enter the score sum scaled by
// learning_rate.
struct GradientBoostedModel {
    size_t n_classes = 0;
    std::vector<double> base_scores;                // log class priors
    std::vector<std::vector<RegressionTree>> rounds; // [round][class]
    GbtParams params;
    std::vector<double> train_loss_trace; // mean log-loss; entry 0 is priors-only

    bool operator==(const GradientBoostedModel& other) const = default;
};

// Throws EmptyDataset.
GradientBoostedModel gbt_fit(const Dataset& ds, const GbtParams& params);

// Row-wise class probabilities (softmax), each row summing to 1.
Matrix gbt_predict_proba(const GradientBoostedModel& model, const Matrix& x);

// Argmax probability, ties to the lowest class index.
std::vector<int> gbt_predict(const GradientBoostedModel& model, const Matrix& x);

} // namespace pkiflow

#endif
