#include "pkiflow/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "pkiflow/metrics.hpp"
#include "pkiflow/parallel.hpp"

namespace pkiflow {

std::string selection_method_name(SelectionMethod method) {
    switch (method) {
    case SelectionMethod::chi2: return "chi2";
    case SelectionMethod::anova_f: return "anova";
    case SelectionMethod::mutual_info: return "mi";
    }
    return "chi2";
}

SelectionMethod selection_method_from_name(const std::string& name) {
    if (name == "chi2") return SelectionMethod::chi2;
    if (name == "anova" || name == "anova_f") return SelectionMethod::anova_f;
    if (name == "mi" || name == "mutual_info") return SelectionMethod::mutual_info;
    throw InvalidSpec("unknown selection method '" + name + "'");
}

FeatureScores chi2_scores(const Dataset& ds) {
    if (ds.n() == 0) throw EmptyDataset("no rows to score");
    size_t n = ds.n(), d = ds.d(), m = ds.class_index.size();

    FeatureScores out;
    out.method = SelectionMethod::chi2;
    out.scores.assign(d, 0.0);

    std::vector<size_t> class_counts(m, 0);
    for (int y : ds.y) ++class_counts[static_cast<size_t>(y)];

    // O[c] = per-class sum of the feature, E[c] = total * class frequency
    std::vector<double> observed(m);
    for (size_t j = 0; j < d; ++j) {
        std::fill(observed.begin(), observed.end(), 0.0);
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double v = ds.x(i, j);
            if (v < 0.0)
                throw NegativeFeature("feature " + std::to_string(j) + " has negative values", j);
            observed[static_cast<size_t>(ds.y[i])] += v;
            total += v;
        }
        if (total == 0.0) {
            out.warnings.push_back("feature " + std::to_string(j) + " sums to 0, chi2 score 0");
            continue;
        }
        double score = 0.0;
        for (size_t c = 0; c < m; ++c) {
            double expected = total * static_cast<double>(class_counts[c]) / static_cast<double>(n);
            if (expected == 0.0) continue;
            double diff = observed[c] - expected;
            score += diff * diff / expected;
        }
        out.scores[j] = score;
    }
    return out;
}

FeatureScores anova_f_scores(const Dataset& ds) {
    if (ds.n() == 0) throw EmptyDataset("no rows to score");
    size_t n = ds.n(), d = ds.d(), m = ds.class_index.size();
    std::vector<size_t> class_counts(m, 0);
    for (int y : ds.y) ++class_counts[static_cast<size_t>(y)];
    size_t populated = 0;
    for (size_t c : class_counts) populated += c > 0 ? 1 : 0;
    if (populated < 2) throw SingleClass("ANOVA needs at least two populated classes");

    FeatureScores out;
    out.method = SelectionMethod::anova_f;
    out.scores.assign(d, 0.0);
    std::vector<size_t> infinite;

    std::vector<double> class_sums(m);
    for (size_t j = 0; j < d; ++j) {
        std::fill(class_sums.begin(), class_sums.end(), 0.0);
        double total = 0.0;
        for (size_t i = 0; i < n; ++i) {
            class_sums[static_cast<size_t>(ds.y[i])] += ds.x(i, j);
            total += ds.x(i, j);
        }
        double grand_mean = total / static_cast<double>(n);
        double ssb = 0.0;
        for (size_t c = 0; c < m; ++c) {
            if (class_counts[c] == 0) continue;
            double mean_c = class_sums[c] / static_cast<double>(class_counts[c]);
            double diff = mean_c - grand_mean;
            ssb += static_cast<double>(class_counts[c]) * diff * diff;
        }
        double ssw = 0.0;
        for (size_t i = 0; i < n; ++i) {
            size_t c = static_cast<size_t>(ds.y[i]);
            double diff = ds.x(i, j) - class_sums[c] / static_cast<double>(class_counts[c]);
            ssw += diff * diff;
        }
        double df_between = static_cast<double>(populated - 1);
        double df_within = static_cast<double>(n - populated);
        if (ssw <= 0.0 || df_within <= 0.0) {
            if (ssb > 0.0) {
                infinite.push_back(j); // patched after the finite max is known
            }
            continue;
        }
        out.scores[j] = (ssb / df_between) / (ssw / df_within);
    }

    if (!infinite.empty()) {
        double max_finite = 0.0;
        for (double s : out.scores) max_finite = std::max(max_finite, s);
        double replacement = max_finite > 0.0 ? max_finite * 10.0 : 1e12;
        for (size_t j : infinite) {
            out.scores[j] = replacement;
            out.warnings.push_back("feature " + std::to_string(j) +
                                   " has zero within-class variance, F capped at " +
                                   std::to_string(replacement));
        }
    }
    return out;
}

FeatureScores mutual_info_scores(const Dataset& ds, size_t bins) {
    if (ds.n() == 0) throw EmptyDataset("no rows to score");
    if (bins < 2) throw InvalidSpec("mutual information needs bins >= 2");
    size_t n = ds.n(), d = ds.d(), m = ds.class_index.size();

    FeatureScores out;
    out.method = SelectionMethod::mutual_info;
    out.scores.assign(d, 0.0);

    std::vector<double> class_prob(m, 0.0);
    for (int y : ds.y) class_prob[static_cast<size_t>(y)] += 1.0;
    for (double& p : class_prob) p /= static_cast<double>(n);

    std::vector<double> joint(bins * m);
    for (size_t j = 0; j < d; ++j) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < n; ++i) {
            lo = std::min(lo, ds.x(i, j));
            hi = std::max(hi, ds.x(i, j));
        }
        if (hi <= lo) continue; // constant feature, MI 0
        double width = (hi - lo) / static_cast<double>(bins);

        std::fill(joint.begin(), joint.end(), 0.0);
        for (size_t i = 0; i < n; ++i) {
            size_t b = static_cast<size_t>((ds.x(i, j) - lo) / width);
            if (b >= bins) b = bins - 1;
            joint[b * m + static_cast<size_t>(ds.y[i])] += 1.0;
        }
        double mi = 0.0;
        for (size_t b = 0; b < bins; ++b) {
            double bin_prob = 0.0;
            for (size_t c = 0; c < m; ++c) bin_prob += joint[b * m + c];
            bin_prob /= static_cast<double>(n);
            if (bin_prob == 0.0) continue;
            for (size_t c = 0; c < m; ++c) {
                double p = joint[b * m + c] / static_cast<double>(n);
                if (p == 0.0) continue;
                mi += p * std::log(p / (bin_prob * class_prob[c]));
            }
        }
        out.scores[j] = std::max(mi, 0.0);
    }
    return out;
}

Matrix shift_to_nonnegative(const Matrix& x) {
    Matrix out = x;
    for (size_t j = 0; j < x.cols; ++j) {
        double lo = 0.0;
        for (size_t i = 0; i < x.rows; ++i) lo = std::min(lo, x(i, j));
        if (lo < 0.0) {
            for (size_t i = 0; i < x.rows; ++i) out(i, j) = x(i, j) - lo;
        }
    }
    return out;
}

FeatureScores compute_scores(const Dataset& ds, SelectionMethod method, size_t mi_bins) {
    switch (method) {
    case SelectionMethod::chi2: {
        Dataset shifted = ds;
        shifted.x = shift_to_nonnegative(ds.x);
        return chi2_scores(shifted);
    }
    case SelectionMethod::anova_f: return anova_f_scores(ds);
    case SelectionMethod::mutual_info: return mutual_info_scores(ds, mi_bins);
    }
    throw InvalidSpec("unreachable selection method");
}

std::vector<size_t> select_top_k(const FeatureScores& scores, size_t k) {
    size_t d = scores.scores.size();
    if (k < 1 || k > d)
        throw KOutOfRange("k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
    std::vector<size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    // k = d keeps the identity order, so "select everything" is bit-for-bit
    // the untouched table (feature-subsampling learners draw the same columns)
    if (k == d) return order;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (scores.scores[a] != scores.scores[b]) return scores.scores[a] > scores.scores[b];
        return a < b;
    });
    order.resize(k);
    return order;
}

SweepResult sweep_feature_count(const Dataset& train, const Dataset& val, SelectionMethod method,
                                const SupervisedSpec& supervised, uint64_t base_seed,
                                size_t mi_bins, unsigned jobs) {
    if (train.d() == 0) throw EmptyDataset("no features to sweep");
    FeatureScores scores = compute_scores(train, method, mi_bins);
    size_t d = train.d();

    SweepResult result;
    result.trace.resize(d);
    std::vector<std::string> failures(d);

    parallel_for(d, jobs, [&](size_t idx) {
        size_t k = idx + 1;
        try {
            std::vector<size_t> indices = select_top_k(scores, k);
            Dataset sub_train = train;
            sub_train.x = train.x.select_columns(indices);
            sub_train.feature_names.clear();
            SupervisedSpec spec = supervised;
            spec.set_seed(base_seed + k);
            spec.jobs = jobs > 1 ? 1 : supervised.jobs; // one level of parallelism
            SupervisedModel model = fit_supervised(sub_train, spec);
            Matrix val_x = val.x.select_columns(indices);
            std::vector<int> pred = predict_supervised(model, val_x);
            double f1 = macro_f1(confusion_matrix(val.y, pred, val.class_index));
            result.trace[idx] = {k, f1};
        } catch (const Error& e) {
            failures[idx] = e.what();
        }
    });
    for (size_t idx = 0; idx < d; ++idx) {
        if (!failures[idx].empty())
            throw Error("feature sweep failed at k=" + std::to_string(idx + 1) + ": " +
                        failures[idx]);
    }

    size_t best_idx = 0;
    for (size_t idx = 1; idx < d; ++idx) {
        if (result.trace[idx].val_macro_f1 > result.trace[best_idx].val_macro_f1) best_idx = idx;
    }
    result.best.method = method;
    result.best.k = result.trace[best_idx].k;
    result.best.indices = select_top_k(scores, result.best.k);
    result.best.val_macro_f1 = result.trace[best_idx].val_macro_f1;
    return result;
}

std::string sweep_trace_csv(const SweepResult& sweep) {
    std::ostringstream out;
    out << "k,macro_f1\n";
    char buf[64];
    for (const auto& point : sweep.trace) {
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", point.k, point.val_macro_f1);
        out << buf;
    }
    return out.str();
}

} // namespace pkiflow
