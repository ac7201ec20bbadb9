#include "pkiflow/gradient_boosting.hpp"

#include <algorithm>
#include <cmath>

namespace pkiflow {

namespace {

struct GradHess {
    double g = 0.0;
    double h = 0.0;
};

struct RegressionBuilder {
    const Matrix& x;
    const std::vector<GradHess>& gh;
    const GbtParams& params;
    RegressionTree& tree;

    static double leaf_gain(double g, double h, double lambda) { return g * g / (h + lambda); }

    int build(std::vector<size_t>& rows, size_t depth) {
        double sum_g = 0.0, sum_h = 0.0;
        for (size_t r : rows) {
            sum_g += gh[r].g;
            sum_h += gh[r].h;
        }
        bool depth_capped = params.max_depth > 0 && depth >= params.max_depth;
        if (depth_capped || rows.size() < params.min_samples_split) {
            return make_leaf(sum_g, sum_h);
        }

        // best split by the second-order gain, ties to the lowest feature
        // index then the lowest threshold
        bool found = false;
        size_t best_feature = 0;
        double best_threshold = 0.0, best_gain = 0.0;
        double parent = leaf_gain(sum_g, sum_h, params.l2_lambda);
        std::vector<std::pair<double, size_t>> sorted(rows.size());
        for (size_t feature = 0; feature < x.cols; ++feature) {
            for (size_t i = 0; i < rows.size(); ++i)
                sorted[i] = {x(rows[i], feature), rows[i]};
            std::sort(sorted.begin(), sorted.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            if (sorted.front().first == sorted.back().first) continue;
            double gl = 0.0, hl = 0.0;
            for (size_t i = 0; i + 1 < rows.size(); ++i) {
                gl += gh[sorted[i].second].g;
                hl += gh[sorted[i].second].h;
                if (sorted[i].first == sorted[i + 1].first) continue;
                double gr = sum_g - gl;
                double hr = sum_h - hl;
                double gain = 0.5 * (leaf_gain(gl, hl, params.l2_lambda) +
                                     leaf_gain(gr, hr, params.l2_lambda) - parent);
                if (gain > 0.0 && (!found || gain > best_gain)) {
                    found = true;
                    best_feature = feature;
                    best_threshold = (sorted[i].first + sorted[i + 1].first) / 2.0;
                    best_gain = gain;
                }
            }
        }
        if (!found) return make_leaf(sum_g, sum_h);

        std::vector<size_t> left_rows, right_rows;
        for (size_t r : rows) {
            (x(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].split_feature = static_cast<int>(best_feature);
        tree.nodes[idx].threshold = best_threshold;
        int left = build(left_rows, depth + 1);
        int right = build(right_rows, depth + 1);
        tree.nodes[idx].left = left;
        tree.nodes[idx].right = right;
        return idx;
    }

    int make_leaf(double sum_g, double sum_h) {
        int idx = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[idx].value = -sum_g / (sum_h + params.l2_lambda);
        return idx;
    }
};

RegressionTree fit_regression_tree(const Matrix& x, const std::vector<GradHess>& gh,
                                   const GbtParams& params) {
    RegressionTree tree;
    std::vector<size_t> rows(x.rows);
    for (size_t i = 0; i < x.rows; ++i) rows[i] = i;
    RegressionBuilder builder{x, gh, params, tree};
    builder.build(rows, 0);
    return tree;
}

void softmax_rows(Matrix& scores) {
    for (size_t i = 0; i < scores.rows; ++i) {
        double* row = scores.row_ptr(i);
        double max_score = row[0];
        for (size_t c = 1; c < scores.cols; ++c) max_score = std::max(max_score, row[c]);
        double sum = 0.0;
        for (size_t c = 0; c < scores.cols; ++c) {
            row[c] = std::exp(row[c] - max_score);
            sum += row[c];
        }
        for (size_t c = 0; c < scores.cols; ++c) row[c] /= sum;
    }
}

double mean_log_loss(const Matrix& probs, const std::vector<int>& y) {
    double total = 0.0;
    for (size_t i = 0; i < probs.rows; ++i) {
        double p = probs(i, static_cast<size_t>(y[i]));
        total -= std::log(std::max(p, 1e-300));
    }
    return total / static_cast<double>(probs.rows);
}

} // namespace

GradientBoostedModel gbt_fit(const Dataset& ds, const GbtParams& params) {
    if (ds.n() == 0) throw EmptyDataset("cannot fit on no rows");
    size_t n = ds.n();
    size_t m = ds.class_index.size();

    GradientBoostedModel model;
    model.n_classes = m;
    model.params = params;
    model.base_scores.assign(m, 0.0);
    std::vector<size_t> counts(m, 0);
    for (int label : ds.y) ++counts[static_cast<size_t>(label)];
    for (size_t c = 0; c < m; ++c) {
        double prior = std::max(static_cast<double>(counts[c]), 1e-9) / static_cast<double>(n);
        model.base_scores[c] = std::log(prior);
    }

    Matrix scores(n, m);
    for (size_t i = 0; i < n; ++i) {
        std::copy(model.base_scores.begin(), model.base_scores.end(), scores.row_ptr(i));
    }

    Matrix probs = scores;
    softmax_rows(probs);
    model.train_loss_trace.push_back(mean_log_loss(probs, ds.y));

    std::vector<GradHess> gh(n);
    for (size_t round = 0; round < params.n_estimators; ++round) {
        std::vector<RegressionTree> class_trees;
        class_trees.reserve(m);
        for (size_t c = 0; c < m; ++c) {
            for (size_t i = 0; i < n; ++i) {
                double p = probs(i, c);
                gh[i].g = p - (static_cast<size_t>(ds.y[i]) == c ? 1.0 : 0.0);
                gh[i].h = p * (1.0 - p);
            }
            class_trees.push_back(fit_regression_tree(ds.x, gh, params));
        }
        for (size_t c = 0; c < m; ++c) {
            const RegressionTree& tree = class_trees[c];
            for (size_t i = 0; i < n; ++i)
                scores(i, c) += params.learning_rate * tree.predict(ds.x.row_ptr(i));
        }
        model.rounds.push_back(std::move(class_trees));
        probs = scores;
        softmax_rows(probs);
        model.train_loss_trace.push_back(mean_log_loss(probs, ds.y));
    }
    return model;
}

Matrix gbt_predict_proba(const GradientBoostedModel& model, const Matrix& x) {
    Matrix scores(x.rows, model.n_classes);
    for (size_t i = 0; i < x.rows; ++i)
        std::copy(model.base_scores.begin(), model.base_scores.end(), scores.row_ptr(i));
    for (const auto& round : model.rounds) {
        for (size_t c = 0; c < model.n_classes; ++c) {
            for (size_t i = 0; i < x.rows; ++i)
                scores(i, c) += model.params.learning_rate * round[c].predict(x.row_ptr(i));
        }
    }
    softmax_rows(scores);
    return scores;
}

std::vector<int> gbt_predict(const GradientBoostedModel& model, const Matrix& x) {
    Matrix probs = gbt_predict_proba(model, x);
    std::vector<int> out(x.rows);
    for (size_t i = 0; i < x.rows; ++i) {
        const double* row = probs.row_ptr(i);
        int best = 0;
        for (size_t c = 1; c < model.n_classes; ++c) {
            if (row[c] > row[best]) best = static_cast<int>(c);
        }
        out[i] = best;
    }
    return out;
}

} // namespace pkiflow
