#include "pkiflow/pki.hpp"

#include <algorithm>

#include "pkiflow/metrics.hpp"
#include "pkiflow/parallel.hpp"

namespace pkiflow {

Matrix augment_with_prior_knowledge(const Matrix& x, const PriorKnowledgeStack& stack) {
    if (stack.size() == 0) return x;
    Matrix standardized = apply_standardizer(stack.standardizer, x);
    Matrix out(x.rows, x.cols + stack.size());
    for (size_t i = 0; i < x.rows; ++i) {
        const double* src = x.row_ptr(i);
        std::copy(src, src + x.cols, out.row_ptr(i));
    }
    for (size_t s = 0; s < stack.size(); ++s) {
        ClusterAssignment assignment = assign_cluster_model(stack.members[s], standardized);
        for (size_t i = 0; i < x.rows; ++i)
            out(i, x.cols + s) = static_cast<double>(assignment.labels[i]);
    }
    return out;
}

namespace {

Dataset with_matrix(const Dataset& ds, Matrix x) {
    Dataset out;
    out.x = std::move(x);
    out.y = ds.y;
    out.class_index = ds.class_index;
    return out;
}

// One PKI candidate: fit members (sizes+seeds provided), augment, train,
// score on validation.
struct CandidateFit {
    PriorKnowledgeStack stack;
    SupervisedModel supervised;
    double val_macro_f1 = 0.0;
};

CandidateFit fit_candidate(const Dataset& train_sel, const Dataset& val_sel,
                           const UnsupervisedSpec& unsup, const SupervisedSpec& sup,
                           size_t cluster_k, size_t stack_size, uint64_t seed) {
    CandidateFit out;
    if (stack_size > 0) {
        out.stack.standardizer = fit_standardizer(train_sel.x);
        Matrix standardized = apply_standardizer(out.stack.standardizer, train_sel.x);
        for (size_t j = 0; j < stack_size; ++j)
            out.stack.members.push_back(fit_cluster_model(standardized, unsup, cluster_k, seed + j));
    }
    Dataset train_aug = with_matrix(train_sel, augment_with_prior_knowledge(train_sel.x, out.stack));
    out.supervised = fit_supervised(train_aug, sup);
    Matrix val_aug = augment_with_prior_knowledge(val_sel.x, out.stack);
    std::vector<int> pred = predict_supervised(out.supervised, val_aug);
    out.val_macro_f1 = macro_f1(confusion_matrix(val_sel.y, pred, val_sel.class_index));
    return out;
}

Dataset select_features(const Dataset& ds, const SelectionResult& selection) {
    Dataset out;
    out.x = ds.x.select_columns(selection.indices);
    out.y = ds.y;
    out.class_index = ds.class_index;
    return out;
}

} // namespace

std::vector<size_t> default_cluster_candidates(size_t hi) {
    std::vector<size_t> out{1};
    for (size_t k = 2; k <= hi; ++k) out.push_back(k);
    return out;
}

std::pair<PkiModel, PkiSweepTrace>
pki_train(const Dataset& train, const Dataset& val, const SelectionResult& selection,
          const UnsupervisedSpec& unsup, const SupervisedSpec& sup,
          const std::vector<size_t>& k_candidates, uint64_t seed, unsigned jobs) {
    if (k_candidates.empty()) throw InvalidSpec("no cluster-count candidates");
    Dataset train_sel = select_features(train, selection);
    Dataset val_sel = select_features(val, selection);

    PkiSweepTrace trace;
    trace.points.resize(k_candidates.size());
    std::vector<std::string> failures(k_candidates.size());
    SupervisedSpec sup_inner = sup;
    sup_inner.jobs = jobs > 1 ? 1 : sup.jobs;

    parallel_for(k_candidates.size(), jobs, [&](size_t idx) {
        size_t k = k_candidates[idx];
        try {
            CandidateFit fit = fit_candidate(train_sel, val_sel, unsup, sup_inner, k,
                                             k <= 1 ? 0 : 1, seed);
            trace.points[idx] = {k, fit.val_macro_f1};
        } catch (const Error& e) {
            failures[idx] = e.what();
        }
    });
    for (size_t idx = 0; idx < k_candidates.size(); ++idx) {
        if (!failures[idx].empty())
            throw Error("PKI sweep failed at k=" + std::to_string(k_candidates[idx]) + ": " +
                        failures[idx]);
    }

    size_t best_idx = 0;
    for (size_t idx = 1; idx < trace.points.size(); ++idx) {
        const PkiSweepPoint& point = trace.points[idx];
        const PkiSweepPoint& best = trace.points[best_idx];
        if (point.val_macro_f1 > best.val_macro_f1 ||
            (point.val_macro_f1 == best.val_macro_f1 && point.candidate < best.candidate)) {
            best_idx = idx;
        }
    }
    size_t best_k = trace.points[best_idx].candidate;
    trace.chosen = best_k;

    CandidateFit refit =
        fit_candidate(train_sel, val_sel, unsup, sup, best_k, best_k <= 1 ? 0 : 1, seed);
    PkiModel model;
    model.selection = selection;
    model.stack = std::move(refit.stack);
    model.supervised = std::move(refit.supervised);
    model.class_index = train.class_index;
    model.feature_names = train.feature_names;
    return {std::move(model), std::move(trace)};
}

std::vector<int> pki_predict(const PkiModel& model, const Matrix& x_raw) {
    Matrix selected = x_raw.select_columns(model.selection.indices);
    Matrix augmented = augment_with_prior_knowledge(selected, model.stack);
    return predict_supervised(model.supervised, augmented);
}

ProgressiveResult progressive_pki_train(const Dataset& train, const Dataset& val,
                                        const SelectionResult& selection,
                                        const UnsupervisedSpec& unsup, const SupervisedSpec& sup,
                                        size_t max_stack, uint64_t seed, unsigned jobs) {
    if (max_stack < 1) throw InvalidSpec("max_stack must be >= 1");

    auto [pki_model, cluster_trace] = pki_train(train, val, selection, unsup, sup,
                                                default_cluster_candidates(), seed, jobs);
    size_t cluster_k = cluster_trace.chosen;

    Dataset train_sel = select_features(train, selection);
    Dataset val_sel = select_features(val, selection);

    // Members are shared across stack sizes: stack S uses members 0..S-1.
    Standardizer standardizer = fit_standardizer(train_sel.x);
    Matrix standardized = apply_standardizer(standardizer, train_sel.x);
    size_t member_k = std::max<size_t>(cluster_k, 1);
    std::vector<ClusterModel> members(max_stack);
    parallel_for(max_stack, jobs, [&](size_t j) {
        members[j] = fit_cluster_model(standardized, unsup, member_k, seed + j);
    });

    Matrix standardized_val = apply_standardizer(standardizer, val_sel.x);
    Matrix labels_train(train_sel.n(), max_stack);
    Matrix labels_val(val_sel.n(), max_stack);
    for (size_t j = 0; j < max_stack; ++j) {
        ClusterAssignment at = assign_cluster_model(members[j], standardized);
        for (size_t i = 0; i < train_sel.n(); ++i)
            labels_train(i, j) = static_cast<double>(at.labels[i]);
        ClusterAssignment av = assign_cluster_model(members[j], standardized_val);
        for (size_t i = 0; i < val_sel.n(); ++i) labels_val(i, j) = static_cast<double>(av.labels[i]);
    }

    auto augmented = [](const Matrix& base, const Matrix& labels, size_t stack_size) {
        Matrix out(base.rows, base.cols + stack_size);
        for (size_t i = 0; i < base.rows; ++i) {
            const double* src = base.row_ptr(i);
            double* dst = out.row_ptr(i);
            std::copy(src, src + base.cols, dst);
            for (size_t j = 0; j < stack_size; ++j) dst[base.cols + j] = labels(i, j);
        }
        return out;
    };

    PkiSweepTrace stack_trace;
    stack_trace.points.resize(max_stack);
    std::vector<std::string> failures(max_stack);
    SupervisedSpec sup_inner = sup;
    sup_inner.jobs = jobs > 1 ? 1 : sup.jobs;
    parallel_for(max_stack, jobs, [&](size_t idx) {
        size_t stack_size = idx + 1;
        try {
            Dataset train_aug = with_matrix(train_sel, augmented(train_sel.x, labels_train, stack_size));
            SupervisedModel model = fit_supervised(train_aug, sup_inner);
            Matrix val_aug = augmented(val_sel.x, labels_val, stack_size);
            std::vector<int> pred = predict_supervised(model, val_aug);
            double f1 = macro_f1(confusion_matrix(val_sel.y, pred, val_sel.class_index));
            stack_trace.points[idx] = {stack_size, f1};
        } catch (const Error& e) {
            failures[idx] = e.what();
        }
    });
    for (size_t idx = 0; idx < max_stack; ++idx) {
        if (!failures[idx].empty())
            throw Error("progressive sweep failed at S=" + std::to_string(idx + 1) + ": " +
                        failures[idx]);
    }

    size_t best_idx = 0;
    for (size_t idx = 1; idx < max_stack; ++idx) {
        if (stack_trace.points[idx].val_macro_f1 > stack_trace.points[best_idx].val_macro_f1)
            best_idx = idx;
    }
    size_t best_size = stack_trace.points[best_idx].candidate;
    stack_trace.chosen = best_size;

    ProgressiveResult out;
    out.cluster_trace = std::move(cluster_trace);
    out.stack_trace = std::move(stack_trace);
    out.model.selection = selection;
    out.model.class_index = train.class_index;
    out.model.feature_names = train.feature_names;
    out.model.stack.standardizer = standardizer;
    out.model.stack.members.assign(members.begin(), members.begin() + best_size);
    Dataset train_aug = with_matrix(train_sel, augmented(train_sel.x, labels_train, best_size));
    out.model.supervised = fit_supervised(train_aug, sup);
    return out;
}

std::vector<int> progressive_pki_predict(const PkiModel& model, const Matrix& x_raw) {
    return pki_predict(model, x_raw);
}

} // namespace pkiflow
