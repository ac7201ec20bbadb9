#ifndef PKIFLOW_FEATURE_SELECTION_HPP
#define PKIFLOW_FEATURE_SELECTION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pkiflow/dataset.hpp"
#include "pkiflow/supervised.hpp"

namespace pkiflow {

enum class SelectionMethod { chi2, anova_f, mutual_info };

std::string selection_method_name(SelectionMethod method);
SelectionMethod selection_method_from_name(const std::string& name);

struct FeatureScores {
    SelectionMethod method = SelectionMethod::chi2;
    std::vector<double> scores;
    std::vector<std::string> warnings;
};

// score_j = sum_c (O_jc - E_jc)^2 / E_jc over the per-class sums of feature j.
// All-zero features score 0 with a warning. Throws NegativeFeature; callers
// with signed data shift first (see shift_to_nonnegative).
FeatureScores chi2_scores(const Dataset& ds);

// One-way F statistic (SSB/(m-1)) / (SSW/(n-m)). A zero within-group variance
// with nonzero between-group variance would be +inf; those entries are
// replaced with 10x the largest finite score and a warning is recorded.
// Throws SingleClass.
FeatureScores anova_f_scores(const Dataset& ds);

// Equal-width histogram mutual information with the labels, in nats.
FeatureScores mutual_info_scores(const Dataset& ds, size_t bins = 10);

FeatureScores compute_scores(const Dataset& ds, SelectionMethod method, size_t mi_bins = 10);

// Columns shifted so their minimum is 0 (only where the minimum is negative).
Matrix shift_to_nonnegative(const Matrix& x);

// Top-k by descending score, ties to the ascending feature index. k = d is
// the identity selection (original column order), so selecting everything is
// exactly the unselected table. Throws KOutOfRange unless 1 <= k <= d.
std::vector<size_t> select_top_k(const FeatureScores& scores, size_t k);

struct SelectionResult {
    SelectionMethod method = SelectionMethod::chi2;
    size_t k = 0;
    std::vector<size_t> indices; // ordered top-k
    double val_macro_f1 = 0.0;
};

struct SweepPoint {
    size_t k = 0;
    double val_macro_f1 = 0.0;
};

struct SweepResult {
    SelectionResult best;
    std::vector<SweepPoint> trace; // one entry per k in [1, d]
};

// Trains one supervised model per k in [1, d] on the top-k features and keeps
// the k with the best validation macro-F1 (smallest k on ties). Candidate k
// uses supervised seed base_seed + k; candidates run as an independent
// parallel map when jobs > 1.
SweepResult sweep_feature_count(const Dataset& train, const Dataset& val, SelectionMethod method,
                                const SupervisedSpec& supervised, uint64_t base_seed,
                                size_t mi_bins = 10, unsigned jobs = 1);

// Trace serialization for plotting: "k,macro_f1" rows.
std::string sweep_trace_csv(const SweepResult& sweep);

} // namespace pkiflow

#endif
