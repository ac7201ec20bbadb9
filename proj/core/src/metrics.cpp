#include "pkiflow/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace pkiflow {

size_t ConfusionMatrix::total() const {
    size_t t = 0;
    for (const auto& row : counts) {
        for (size_t c : row) t += c;
    }
    return t;
}

size_t ConfusionMatrix::row_sum(size_t i) const {
    size_t t = 0;
    for (size_t c : counts[i]) t += c;
    return t;
}

size_t ConfusionMatrix::col_sum(size_t j) const {
    size_t t = 0;
    for (const auto& row : counts) t += row[j];
    return t;
}

ConfusionMatrix confusion_matrix(const std::vector<int>& y_true, const std::vector<int>& y_pred,
                                 const ClassIndex& class_index) {
    if (y_true.size() != y_pred.size())
        throw LengthMismatch("y_true has " + std::to_string(y_true.size()) + " entries, y_pred " +
                             std::to_string(y_pred.size()));
    size_t m = class_index.size();
    ConfusionMatrix cm;
    cm.class_index = class_index;
    cm.counts.assign(m, std::vector<size_t>(m, 0));
    for (size_t t = 0; t < y_true.size(); ++t) {
        int yt = y_true[t];
        int yp = y_pred[t];
        if (yt < 0 || static_cast<size_t>(yt) >= m || yp < 0 || static_cast<size_t>(yp) >= m)
            throw LabelOutOfRange("label outside [0, " + std::to_string(m) + ") at row " +
                                  std::to_string(t));
        ++cm.counts[static_cast<size_t>(yt)][static_cast<size_t>(yp)];
    }
    return cm;
}

ClassReport per_class_report(const ConfusionMatrix& cm) {
    size_t m = cm.m();
    ClassReport report;
    report.precision.assign(m, 0.0);
    report.recall.assign(m, 0.0);
    report.f1.assign(m, 0.0);
    report.support.assign(m, 0);
    for (size_t i = 0; i < m; ++i) {
        size_t tp = cm.counts[i][i];
        size_t col = cm.col_sum(i);
        size_t row = cm.row_sum(i);
        report.support[i] = row;
        report.precision[i] = col == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col);
        report.recall[i] = row == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row);
        double pr = report.precision[i] + report.recall[i];
        report.f1[i] = pr == 0.0 ? 0.0 : 2.0 * report.precision[i] * report.recall[i] / pr;
    }
    return report;
}

double macro_f1(const ConfusionMatrix& cm) {
    if (cm.m() == 0) return 0.0;
    ClassReport report = per_class_report(cm);
    double sum = 0.0;
    for (double f : report.f1) sum += f;
    return sum / static_cast<double>(cm.m());
}

double weighted_f1(const ConfusionMatrix& cm) {
    ClassReport report = per_class_report(cm);
    size_t total = cm.total();
    if (total == 0) return 0.0;
    double sum = 0.0;
    for (size_t i = 0; i < cm.m(); ++i)
        sum += report.f1[i] * static_cast<double>(report.support[i]);
    return sum / static_cast<double>(total);
}

SummaryReport summarize(const ConfusionMatrix& cm) {
    SummaryReport s;
    s.per_class = per_class_report(cm);
    s.class_index = cm.class_index;
    double sum = 0.0, wsum = 0.0;
    size_t total = 0;
    for (size_t i = 0; i < cm.m(); ++i) {
        sum += s.per_class.f1[i];
        wsum += s.per_class.f1[i] * static_cast<double>(s.per_class.support[i]);
        total += s.per_class.support[i];
    }
    s.macro_f1 = cm.m() == 0 ? 0.0 : sum / static_cast<double>(cm.m());
    s.weighted_f1 = total == 0 ? 0.0 : wsum / static_cast<double>(total);
    return s;
}

std::string short_class_name(const std::string& name) {
    std::string out;
    bool word_start = true;
    for (size_t i = 0; i < name.size(); ++i) {
        char c = name[i];
        if (std::isspace(static_cast<unsigned char>(c)) || c == '_' || c == '-') {
            word_start = true;
            continue;
        }
        if (word_start || std::isupper(static_cast<unsigned char>(c))) {
            out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        word_start = false;
    }
    return out.empty() ? name : out;
}

namespace {

std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

void pad_to(std::string& s, size_t width) {
    while (s.size() < width) s += ' ';
}

} // namespace

std::string render_report_text(const SummaryReport& report) {
    size_t m = report.class_index.size();
    size_t name_width = std::string("Class").size();
    for (const auto& name : report.class_index.names) name_width = std::max(name_width, name.size());
    name_width = std::max(name_width, std::string("W Avg").size()) + 2;

    std::ostringstream out;
    std::string header = "Class";
    pad_to(header, name_width);
    out << header << "Precision  Recall     F1         Support\n";

    size_t total_support = 0;
    for (size_t i = 0; i < m; ++i) total_support += report.per_class.support[i];

    for (size_t i = 0; i < m; ++i) {
        std::string line = report.class_index.names[i];
        pad_to(line, name_width);
        std::string p = fixed4(report.per_class.precision[i]);
        pad_to(p, 11);
        std::string r = fixed4(report.per_class.recall[i]);
        pad_to(r, 11);
        std::string f = fixed4(report.per_class.f1[i]);
        pad_to(f, 11);
        out << line << p << r << f << report.per_class.support[i] << "\n";
    }

    auto avg_row = [&](const std::string& label, double f1_value) {
        std::string line = label;
        pad_to(line, name_width);
        std::string blank = "-";
        pad_to(blank, 11);
        std::string f = fixed4(f1_value);
        pad_to(f, 11);
        out << line << blank << blank << f << total_support << "\n";
    };
    avg_row("W Avg", report.weighted_f1);
    avg_row("M Avg", report.macro_f1);
    return out.str();
}

std::string render_confusion_text(const ConfusionMatrix& cm) {
    size_t m = cm.m();
    size_t name_width = 0;
    for (const auto& name : cm.class_index.names) name_width = std::max(name_width, name.size());
    name_width += 2;

    std::vector<size_t> col_width(m, 0);
    for (size_t j = 0; j < m; ++j) {
        col_width[j] = short_class_name(cm.class_index.names[j]).size();
        for (size_t i = 0; i < m; ++i)
            col_width[j] = std::max(col_width[j], std::to_string(cm.counts[i][j]).size());
        col_width[j] += 2;
    }

    std::ostringstream out;
    for (size_t i = 0; i < m; ++i) {
        std::string line = cm.class_index.names[i];
        pad_to(line, name_width);
        for (size_t j = 0; j < m; ++j) {
            std::string cell = std::to_string(cm.counts[i][j]);
            pad_to(cell, col_width[j]);
            line += cell;
        }
        out << line << "\n";
    }
    std::string footer(name_width, ' ');
    for (size_t j = 0; j < m; ++j) {
        std::string cell = short_class_name(cm.class_index.names[j]);
        pad_to(cell, col_width[j]);
        footer += cell;
    }
    out << footer << "\n";
    return out.str();
}

} // namespace pkiflow
