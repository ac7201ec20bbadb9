#include "pkiflow/decision_tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace pkiflow {

namespace {

double gini(const std::vector<size_t>& counts, size_t total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (size_t c : counts) {
        double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct SplitChoice {
    bool found = false;
    size_t feature = 0;
    double threshold = 0.0;
    double gain = 0.0;
};

struct CartBuilder {
    const Dataset& ds;
    const DecisionTreeParams& params;
    DecisionTree& tree;
    // candidate features for the node being split; RF narrows this per node
    std::vector<size_t> scratch_features;

    // Picks the best Gini split over `features` (must be ascending) for the
    // rows in `rows`. Ties keep the first candidate encountered, which is the
    // lowest feature index, then the lowest threshold.
    SplitChoice best_split(const std::vector<size_t>& rows, const std::vector<size_t>& features,
                           const std::vector<size_t>& node_counts) const {
        size_t n = rows.size();
        double parent_gini = gini(node_counts, n);
        SplitChoice best;
        std::vector<std::pair<double, int>> sorted(n);
        std::vector<size_t> left_counts(tree.n_classes);
        for (size_t feature : features) {
            for (size_t i = 0; i < n; ++i)
                sorted[i] = {ds.x(rows[i], feature), ds.y[rows[i]]};
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (sorted.front().first == sorted.back().first) continue; // constant here
            std::fill(left_counts.begin(), left_counts.end(), 0);
            for (size_t i = 0; i + 1 < n; ++i) {
                ++left_counts[static_cast<size_t>(sorted[i].second)];
                if (sorted[i].first == sorted[i + 1].first) continue;
                size_t nl = i + 1;
                size_t nr = n - nl;
                double gini_left = gini(left_counts, nl);
                double sum_sq_right = 0.0;
                for (size_t c = 0; c < tree.n_classes; ++c) {
                    double diff = static_cast<double>(node_counts[c] - left_counts[c]) /
                                  static_cast<double>(nr);
                    sum_sq_right += diff * diff;
                }
                double gini_right = 1.0 - sum_sq_right;
                double gain = parent_gini -
                              (static_cast<double>(nl) / n) * gini_left -
                              (static_cast<double>(nr) / n) * gini_right;
                if (gain > params.min_impurity_decrease && (!best.found || gain > best.gain)) {
                    best.found = true;
                    best.feature = feature;
                    best.threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
                    best.gain = gain;
                }
            }
        }
        return best;
    }

    // Returns the index of the node built for `rows`.
    int build(std::vector<size_t>& rows, size_t depth,
              const std::function<void(std::vector<size_t>&)>& pick_features) {
        std::vector<size_t> counts(tree.n_classes, 0);
        for (size_t r : rows) ++counts[static_cast<size_t>(ds.y[r])];

        bool pure = false;
        for (size_t c : counts) {
            if (c == rows.size()) pure = true;
        }
        bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        if (pure || depth_capped || rows.size() < params.min_samples_split) {
            return make_leaf(std::move(counts));
        }

        pick_features(scratch_features);
        SplitChoice split = best_split(rows, scratch_features, counts);
        if (!split.found) return make_leaf(std::move(counts));

        std::vector<size_t> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (size_t r : rows) {
            (ds.x(r, split.feature) <= split.threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        int node_idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node_idx].split_feature = static_cast<int>(split.feature);
        tree.nodes[node_idx].threshold = split.threshold;
        int left = build(left_rows, depth + 1, pick_features);
        int right = build(right_rows, depth + 1, pick_features);
        tree.nodes[node_idx].left = left;
        tree.nodes[node_idx].right = right;
        return node_idx;
    }

    int make_leaf(std::vector<size_t>&& counts) {
        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].class_counts = std::move(counts);
        return idx;
    }
};

} // namespace

DecisionTree cart_fit_with_feature_picker(
    const Dataset& ds, const DecisionTreeParams& params,
    const std::vector<size_t>& initial_rows,
    const std::function<void(std::vector<size_t>&)>& pick_features) {
    if (ds.n() == 0) throw EmptyDataset("cannot fit a tree on no rows");
    DecisionTree tree;
    tree.n_classes = ds.class_index.size();
    tree.params = params;
    CartBuilder builder{ds, params, tree, {}};
    std::vector<size_t> rows = initial_rows;
    builder.build(rows, 0, pick_features);
    return tree;
}

DecisionTree cart_fit(const Dataset& ds, const DecisionTreeParams& params) {
    std::vector<size_t> rows(ds.n());
    for (size_t i = 0; i < ds.n(); ++i) rows[i] = i;
    std::vector<size_t> all(ds.d());
    for (size_t j = 0; j < ds.d(); ++j) all[j] = j;
    return cart_fit_with_feature_picker(ds, params, rows,
                                        [&](std::vector<size_t>& f) { f = all; });
}

size_t tree_leaf(const DecisionTree& tree, const double* row) {
    size_t node = 0;
    while (!tree.nodes[node].is_leaf()) {
        const TreeNode& n = tree.nodes[node];
        node = static_cast<size_t>(row[n.split_feature] <= n.threshold ? n.left : n.right);
    }
    return node;
}

size_t tree_required_width(const DecisionTree& tree) {
    size_t width = 0;
    for (const auto& n : tree.nodes) {
        if (!n.is_leaf()) width = std::max(width, static_cast<size_t>(n.split_feature) + 1);
    }
    return width;
}

void check_tree_width(const DecisionTree& tree, const Matrix& x) {
    if (x.cols < tree_required_width(tree))
        throw DimensionMismatch("tree needs " + std::to_string(tree_required_width(tree)) +
                                " columns, input has " + std::to_string(x.cols));
}

std::vector<int> tree_predict(const DecisionTree& tree, const Matrix& x) {
    check_tree_width(tree, x);
    std::vector<int> out(x.rows);
    for (size_t i = 0; i < x.rows; ++i) {
        const auto& counts = tree.nodes[tree_leaf(tree, x.row_ptr(i))].class_counts;
        size_t best = 0;
        for (size_t c = 1; c < counts.size(); ++c) {
            if (counts[c] > counts[best]) best = c;
        }
        out[i] = static_cast<int>(best);
    }
    return out;
}

std::vector<std::vector<size_t>> tree_predict_counts(const DecisionTree& tree, const Matrix& x) {
    check_tree_width(tree, x);
    std::vector<std::vector<size_t>> out;
    out.reserve(x.rows);
    for (size_t i = 0; i < x.rows; ++i)
        out.push_back(tree.nodes[tree_leaf(tree, x.row_ptr(i))].class_counts);
    return out;
}

} // namespace pkiflow
