#ifndef PKIFLOW_PKI_HPP
#define PKIFLOW_PKI_HPP

#include <cstdint>
#include <vector>

#include "pkiflow/cluster_model.hpp"
#include "pkiflow/feature_selection.hpp"
#include "pkiflow/supervised.hpp"

namespace pkiflow {

// A stack of independently seeded unsupervised models, each contributing one
// integer cluster-label column of prior knowledge. Members cluster the
// standardized selected features; the appended label columns stay raw.
struct PriorKnowledgeStack {
    std::vector<ClusterModel> members;
    Standardizer standardizer;

    size_t size() const { return members.size(); }
};

struct PkiModel {
    SelectionResult selection;
    PriorKnowledgeStack stack;
    SupervisedModel supervised;
    ClassIndex class_index;
    std::vector<std::string> feature_names; // full preprocessed width, for scoring by name
};

struct PkiSweepPoint {
    size_t candidate = 0; // cluster count k, or stack size S
    double val_macro_f1 = 0.0;
};

struct PkiSweepTrace {
    std::vector<PkiSweepPoint> points;
    size_t chosen = 0;
};

// x must already be reduced to the selected features. Appends one column of
// cluster labels per stack member; original columns come first, unchanged.
Matrix augment_with_prior_knowledge(const Matrix& x, const PriorKnowledgeStack& stack);

// Fits one unsupervised member per candidate cluster count (k = 1 means no
// prior knowledge: empty stack, plain supervised model), trains the
// supervised model on the augmented features and keeps the k with the best
// validation macro-F1 (ties to the smallest k). Candidate members are fitted
// with member seed = seed (member index 0); train/val carry the full
// preprocessed feature width and are reduced via selection.indices.
std::pair<PkiModel, PkiSweepTrace>
pki_train(const Dataset& train, const Dataset& val, const SelectionResult& selection,
          const UnsupervisedSpec& unsup, const SupervisedSpec& sup,
          const std::vector<size_t>& k_candidates, uint64_t seed, unsigned jobs = 1);

// Default candidate list {1} + [2, hi].
std::vector<size_t> default_cluster_candidates(size_t hi = 20);

// select -> standardize -> assign stack labels -> augment -> predict.
// x_raw has the full preprocessed feature width; true labels never enter.
std::vector<int> pki_predict(const PkiModel& model, const Matrix& x_raw);

// Progressive variant: member j is seeded seed + j, all members share the
// cluster count chosen by a preliminary pki_train sweep; stack sizes
// S = 1..max_stack are scored on validation macro-F1 (ties to smallest S).
// Returns the chosen model, the stack-size trace, and the preliminary
// cluster-count trace.
struct ProgressiveResult {
    PkiModel model;
    PkiSweepTrace stack_trace;
    PkiSweepTrace cluster_trace;
};

ProgressiveResult progressive_pki_train(const Dataset& train, const Dataset& val,
                                        const SelectionResult& selection,
                                        const UnsupervisedSpec& unsup, const SupervisedSpec& sup,
                                        size_t max_stack, uint64_t seed, unsigned jobs = 1);

std::vector<int> progressive_pki_predict(const PkiModel& model, const Matrix& x_raw);

} // namespace pkiflow

#endif
