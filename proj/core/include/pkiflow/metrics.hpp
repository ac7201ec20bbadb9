#ifndef PKIFLOW_METRICS_HPP
#define PKIFLOW_METRICS_HPP

#include <string>
#include <vector>

#include "pkiflow/dataset.hpp"

namespace pkiflow {

// Rows are true classes, columns are predicted classes.
struct ConfusionMatrix {
    std::vector<std::vector<size_t>> counts; // m x m
    ClassIndex class_index;

    size_t m() const { return counts.size(); }
    size_t total() const;
    size_t row_sum(size_t i) const;
    size_t col_sum(size_t j) const;
};

struct ClassReport {
    std::vector<double> precision;
    std::vector<double> recall;
    std::vector<double> f1;
    std::vector<size_t> support;
};

struct SummaryReport {
    ClassReport per_class;
    double macro_f1 = 0.0;
    double weighted_f1 = 0.0;
    ClassIndex class_index;
};

// Throws LengthMismatch, LabelOutOfRange.
ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const ClassIndex& class_index);

// precision_i = cm[i][i] / column sum, recall_i = cm[i][i] / row sum, both 0
// when their denominator is 0; f1 = 2PR/(P+R), 0 when P+R = 0.
ClassReport per_class_report(const ConfusionMatrix& cm);

// Unweighted mean of the per-class F1s over all m classes. Zero-support
// classes contribute their f1 of 0.
double macro_f1(const ConfusionMatrix& cm);

// Support-weighted mean of the per-class F1s.
double weighted_f1(const ConfusionMatrix& cm);

SummaryReport summarize(const ConfusionMatrix& cm);

// Aligned per-class table with W Avg / M Avg footer rows.
std::string render_report_text(const SummaryReport& report);

// Aligned counts with class names down the side and short names along the
// bottom (short name = initials of a CamelCase/space-separated class name).
std::string render_confusion_text(const ConfusionMatrix& cm);

std::string short_class_name(const std::string& name);

} // namespace pkiflow

#endif
