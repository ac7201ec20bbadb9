#ifndef PKIFLOW_DATASET_HPP
#define PKIFLOW_DATASET_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pkiflow/flow_csv.hpp"
#include "pkiflow/matrix.hpp"

namespace pkiflow {

// Ordered class names; the position of a name is its integer label.
struct ClassIndex {
    std::vector<std::string> names;

    size_t size() const { return names.size(); }
    const std::string& name(size_t label) const { return names[label]; }
    std::optional<size_t> find(const std::string& name) const;

    bool operator==(const ClassIndex& other) const = default;
};

struct Dataset {
    Matrix x;                 // n x d, finite
    std::vector<int> y;       // n labels in [0, class_index.size())
    ClassIndex class_index;
    std::vector<std::string> feature_names; // optional, size d when present

    size_t n() const { return x.rows; }
    size_t d() const { return x.cols; }
};

struct EncodedLabels {
    std::vector<int> y;
    ClassIndex class_index;
    std::vector<size_t> counts; // per class
};

// Classes indexed in first-appearance order, or in the supplied order.
// Throws EmptyLabelList; with an explicit order, LabelOutOfRange on unknown names.
EncodedLabels encode_labels(const std::vector<std::string>& labels,
                            const std::vector<std::string>& explicit_order = {});

struct SplitSpec {
    double validation_fraction = 0.2;
    uint64_t seed = 0;
};

struct SplitResult {
    Dataset train;
    Dataset val;
    std::vector<size_t> train_indices; // ascending row indices into the source
    std::vector<size_t> val_indices;
};

// Stratified split: per class, round(fraction * count) rows go to validation,
// chosen by a seeded shuffle of that class's rows. Deterministic per seed.
// Throws DegenerateSplit when a class would keep no training rows.
SplitResult stratified_split(const Dataset& ds, const SplitSpec& spec);

struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds; // population (1/n); 0 recorded for constant columns

    bool operator==(const Standardizer& other) const = default;
};

// Fit on training rows only. Throws EmptyDataset.
Standardizer fit_standardizer(const Matrix& x);

// (x - mean) / std per column; columns whose recorded std is 0 divide by 1.
Matrix apply_standardizer(const Standardizer& s, const Matrix& x);

// FeatureTable <-> Dataset bridges. Row order preserved.
Dataset dataset_from_feature_table(const FeatureTable& table,
                                   const std::vector<std::string>& explicit_order = {});
FeatureTable feature_table_from_dataset(const Dataset& ds,
                                        const std::string& label_name = "Label");

} // namespace pkiflow

#endif
