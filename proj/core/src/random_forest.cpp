#include "pkiflow/random_forest.hpp"

#include <algorithm>
#include <cmath>

#include "pkiflow/parallel.hpp"
#include "pkiflow/rng.hpp"

namespace pkiflow {

RandomForest rf_fit(const Dataset& ds, const RandomForestParams& params, unsigned jobs) {
    if (ds.n() == 0) throw EmptyDataset("cannot fit a forest on no rows");
    if (params.n_trees == 0) throw InvalidSpec("n_trees must be >= 1");

    size_t d = ds.d();
    size_t per_split = params.features_per_split > 0
                           ? std::min(params.features_per_split, d)
                           : static_cast<size_t>(std::ceil(std::sqrt(static_cast<double>(d))));

    RandomForest model;
    model.params = params;
    model.n_classes = ds.class_index.size();
    model.trees.resize(params.n_trees);

    parallel_for(params.n_trees, jobs, [&](size_t t) {
        Rng rng(params.seed + t);
        std::vector<size_t> rows(ds.n());
        if (params.bootstrap) {
            for (size_t i = 0; i < ds.n(); ++i) rows[i] = rng.next_index(ds.n());
        } else {
            for (size_t i = 0; i < ds.n(); ++i) rows[i] = i;
        }

        std::vector<size_t> pool(d);
        for (size_t j = 0; j < d; ++j) pool[j] = j;

        auto pick_features = [&](std::vector<size_t>& out) {
            if (per_split >= d) {
                out = pool;
                return;
            }
            // partial Fisher-Yates, then ascending for the tie-break order
            for (size_t i = 0; i < per_split; ++i) {
                size_t j = i + rng.next_index(d - i);
                std::swap(pool[i], pool[j]);
            }
            out.assign(pool.begin(), pool.begin() + per_split);
            std::sort(out.begin(), out.end());
        };

        model.trees[t] = cart_fit_with_feature_picker(ds, params.tree, rows, pick_features);
    });
    return model;
}

std::vector<int> rf_predict(const RandomForest& model, const Matrix& x) {
    for (const auto& tree : model.trees) check_tree_width(tree, x);
    std::vector<int> out(x.rows);
    std::vector<size_t> votes(model.n_classes);
    for (size_t i = 0; i < x.rows; ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        const double* row = x.row_ptr(i);
        for (const auto& tree : model.trees) {
            const auto& counts = tree.nodes[tree_leaf(tree, row)].class_counts;
            size_t best = 0;
            for (size_t c = 1; c < counts.size(); ++c) {
                if (counts[c] > counts[best]) best = c;
            }
            ++votes[best];
        }
        size_t best = 0;
        for (size_t c = 1; c < votes.size(); ++c) {
            if (votes[c] > votes[best]) best = c;
        }
        out[i] = static_cast<int>(best);
    }
    return out;
}

} // namespace pkiflow
