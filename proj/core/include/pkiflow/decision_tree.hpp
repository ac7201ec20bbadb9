#ifndef PKIFLOW_DECISION_TREE_HPP
#define PKIFLOW_DECISION_TREE_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "pkiflow/dataset.hpp"
#include "pkiflow/matrix.hpp"

namespace pkiflow {

struct DecisionTreeParams {
    size_t max_depth = 0;           // 0 = unlimited
    size_t min_samples_split = 2;
    double min_impurity_decrease = 0.0;

    bool operator==(const DecisionTreeParams& other) const = default;
};

// Internal nodes carry (split_feature, threshold, children); leaves carry the
// training class counts. value <= threshold goes left.
struct TreeNode {
    int split_feature = -1; // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<size_t> class_counts; // leaves only

    bool is_leaf() const { return split_feature < 0; }
    bool operator==(const TreeNode& other) const = default;
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // nodes[0] is the root
    size_t n_classes = 0;
    DecisionTreeParams params;

    bool operator==(const DecisionTree& other) const = default;
};

// Greedy CART on Gini impurity decrease. Candidate thresholds are midpoints
// of consecutive distinct sorted values; ties break to the lowest feature
// index then the lowest threshold. Throws EmptyDataset.
DecisionTree cart_fit(const Dataset& ds, const DecisionTreeParams& params);

// Index of the leaf a row lands in.
size_t tree_leaf(const DecisionTree& tree, const double* row);

// Leaf majority label, ties to the lowest class index. Throws DimensionMismatch
// only indirectly (callers validate width); rows narrower than the largest
// split feature are undefined, so validate_tree_width is exposed for that.
std::vector<int> tree_predict(const DecisionTree& tree, const Matrix& x);

// Per-row leaf class counts.
std::vector<std::vector<size_t>> tree_predict_counts(const DecisionTree& tree, const Matrix& x);

// Largest feature index any node splits on, plus one. 0 for a single leaf.
size_t tree_required_width(const DecisionTree& tree);

void check_tree_width(const DecisionTree& tree, const Matrix& x);

// CART with a caller-chosen candidate feature set per node (ascending order
// expected); the forest uses this for per-node feature subsampling.
DecisionTree cart_fit_with_feature_picker(
    const Dataset& ds, const DecisionTreeParams& params, const std::vector<size_t>& initial_rows,
    const std::function<void(std::vector<size_t>&)>& pick_features);

} // namespace pkiflow

#endif
