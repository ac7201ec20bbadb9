#include "pkiflow/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "pkiflow/rng.hpp"

namespace pkiflow {

std::optional<size_t> ClassIndex::find(const std::string& name) const {
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    return std::nullopt;
}

EncodedLabels encode_labels(const std::vector<std::string>& labels,
                            const std::vector<std::string>& explicit_order) {
    if (labels.empty()) throw EmptyLabelList("no labels to encode");
    EncodedLabels out;
    std::unordered_map<std::string, size_t> lookup;
    if (!explicit_order.empty()) {
        out.class_index.names = explicit_order;
        for (size_t i = 0; i < explicit_order.size(); ++i) {
            if (!lookup.emplace(explicit_order[i], i).second)
                throw InvalidSpec("class order repeats '" + explicit_order[i] + "'");
        }
    }
    out.y.reserve(labels.size());
    for (const auto& label : labels) {
        auto it = lookup.find(label);
        if (it == lookup.end()) {
            if (!explicit_order.empty())
                throw LabelOutOfRange("label '" + label + "' not in the supplied class order");
            size_t idx = out.class_index.names.size();
            out.class_index.names.push_back(label);
            it = lookup.emplace(label, idx).first;
        }
        out.y.push_back(static_cast<int>(it->second));
    }
    out.counts.assign(out.class_index.size(), 0);
    for (int label : out.y) ++out.counts[static_cast<size_t>(label)];
    return out;
}

SplitResult stratified_split(const Dataset& ds, const SplitSpec& spec) {
    if (ds.n() == 0) throw EmptyDataset("cannot split an empty dataset");
    if (spec.validation_fraction < 0.0 || spec.validation_fraction >= 1.0)
        throw InvalidSpec("validation_fraction must be in [0, 1)");

    size_t m = ds.class_index.size();
    std::vector<std::vector<size_t>> per_class(m);
    for (size_t i = 0; i < ds.n(); ++i) per_class[static_cast<size_t>(ds.y[i])].push_back(i);

    std::vector<bool> in_val(ds.n(), false);
    for (size_t c = 0; c < m; ++c) {
        auto& rows = per_class[c];
        if (rows.empty()) continue;
        size_t n_val = static_cast<size_t>(
            std::llround(spec.validation_fraction * static_cast<double>(rows.size())));
        if (n_val >= rows.size())
            throw DegenerateSplit("class '" + ds.class_index.name(c) +
                                  "' would keep no training rows");
        Rng rng(derive_seed(spec.seed, c));
        rng.shuffle(rows);
        for (size_t i = 0; i < n_val; ++i) in_val[rows[i]] = true;
    }

    SplitResult out;
    for (size_t i = 0; i < ds.n(); ++i) {
        (in_val[i] ? out.val_indices : out.train_indices).push_back(i);
    }
    if (out.train_indices.empty()) throw DegenerateSplit("no training rows remain");

    auto subset = [&](const std::vector<size_t>& idx) {
        Dataset sub;
        sub.x = ds.x.select_rows(idx);
        sub.y.reserve(idx.size());
        for (size_t i : idx) sub.y.push_back(ds.y[i]);
        sub.class_index = ds.class_index;
        sub.feature_names = ds.feature_names;
        return sub;
    };
    out.train = subset(out.train_indices);
    out.val = subset(out.val_indices);
    return out;
}

Standardizer fit_standardizer(const Matrix& x) {
    if (x.rows == 0) throw EmptyDataset("cannot fit a standardizer on no rows");
    Standardizer s;
    s.means.assign(x.cols, 0.0);
    s.stds.assign(x.cols, 0.0);
    double inv_n = 1.0 / static_cast<double>(x.rows);
    for (size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row_ptr(i);
        for (size_t j = 0; j < x.cols; ++j) s.means[j] += row[j];
    }
    for (size_t j = 0; j < x.cols; ++j) s.means[j] *= inv_n;
    for (size_t i = 0; i < x.rows; ++i) {
        const double* row = x.row_ptr(i);
        for (size_t j = 0; j < x.cols; ++j) {
            double diff = row[j] - s.means[j];
            s.stds[j] += diff * diff;
        }
    }
    for (size_t j = 0; j < x.cols; ++j) s.stds[j] = std::sqrt(s.stds[j] * inv_n);
    return s;
}

Matrix apply_standardizer(const Standardizer& s, const Matrix& x) {
    if (x.cols != s.means.size())
        throw DimensionMismatch("standardizer fitted on " + std::to_string(s.means.size()) +
                                " columns, input has " + std::to_string(x.cols));
    Matrix out(x.rows, x.cols);
    for (size_t i = 0; i < x.rows; ++i) {
        const double* src = x.row_ptr(i);
        double* dst = out.row_ptr(i);
        for (size_t j = 0; j < x.cols; ++j) {
            double denom = s.stds[j] == 0.0 ? 1.0 : s.stds[j];
            dst[j] = (src[j] - s.means[j]) / denom;
        }
    }
    return out;
}

Dataset dataset_from_feature_table(const FeatureTable& table,
                                   const std::vector<std::string>& explicit_order) {
    Dataset ds;
    ds.x = table.values;
    ds.feature_names = table.feature_names;
    EncodedLabels enc = encode_labels(table.labels, explicit_order);
    ds.y = std::move(enc.y);
    ds.class_index = std::move(enc.class_index);
    return ds;
}

FeatureTable feature_table_from_dataset(const Dataset& ds, const std::string& label_name) {
    FeatureTable table;
    table.feature_names = ds.feature_names;
    if (table.feature_names.empty()) {
        for (size_t j = 0; j < ds.d(); ++j) table.feature_names.push_back("f" + std::to_string(j));
    }
    table.values = ds.x;
    table.label_name = label_name;
    table.labels.reserve(ds.n());
    for (int label : ds.y) table.labels.push_back(ds.class_index.name(static_cast<size_t>(label)));
    return table;
}

} // namespace pkiflow
