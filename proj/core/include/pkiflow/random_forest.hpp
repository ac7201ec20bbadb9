#ifndef PKIFLOW_RANDOM_FOREST_HPP
#define PKIFLOW_RANDOM_FOREST_HPP

#include <cstdint>
#include <vector>

#include "pkiflow/decision_tree.hpp"

namespace pkiflow {

struct RandomForestParams {
    size_t n_trees = 100;
    size_t features_per_split = 0; // 0 = ceil(sqrt(d))
    bool bootstrap = true;
    DecisionTreeParams tree;
    uint64_t seed = 0;

    bool operator==(const RandomForestParams& other) const = default;
};

struct RandomForest {
    std::vector<DecisionTree> trees;
    RandomForestParams params;
    size_t n_classes = 0;

    bool operator==(const RandomForest& other) const = default;
};

// Tree t draws its bootstrap and per-node feature subsets from seed + t, so a
// parallel build (jobs > 1) matches the sequential one tree for tree.
// Throws EmptyDataset.
RandomForest rf_fit(const Dataset& ds, const RandomForestParams& params, unsigned jobs = 1);

// Majority vote over trees, ties to the lowest class index.
std::vector<int> rf_predict(const RandomForest& model, const Matrix& x);

} // namespace pkiflow

#endif
