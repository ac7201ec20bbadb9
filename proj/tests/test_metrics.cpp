#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "pkiflow/metrics.hpp"
#include "pkiflow/rng.hpp"

using namespace pkiflow;

namespace {

ClassIndex apt_classes() {
    return {{"DataExfiltration", "InitialCompromise", "LateralMovement", "NormalTraffic",
             "Pivoting", "Reconnaissance"}};
}

// Test matrix of the tuned boosted run (macro-F1 0.8137).
ConfusionMatrix tuned_matrix() {
    ConfusionMatrix cm;
    cm.class_index = apt_classes();
    cm.counts = {{35, 0, 0, 2, 16, 21},   {0, 62, 0, 8, 4, 3},    {0, 0, 112, 14, 3, 13},
                 {0, 0, 0, 55577, 5, 1},  {4, 0, 2, 12, 340, 2},  {23, 1, 6, 8, 41, 172}};
    return cm;
}

// Test matrix of the forest run (macro-F1 reported as 0.8103).
ConfusionMatrix forest_matrix() {
    ConfusionMatrix cm;
    cm.class_index = apt_classes();
    cm.counts = {{33, 0, 0, 1, 19, 21},   {0, 62, 0, 7, 5, 3},    {0, 0, 115, 12, 5, 10},
                 {0, 0, 4, 55575, 4, 0},  {3, 0, 2, 11, 342, 2},  {22, 2, 6, 8, 38, 175}};
    return cm;
}

} // namespace

TEST_CASE("confusion: identity") {
    ConfusionMatrix cm = confusion_matrix({0, 1}, {0, 1}, {{"a", "b"}});
    CHECK(cm.counts == std::vector<std::vector<size_t>>{{1, 0}, {0, 1}});
}

TEST_CASE("confusion: direct count") {
    ConfusionMatrix cm = confusion_matrix({0, 0, 1, 1}, {0, 1, 0, 1}, {{"a", "b"}});
    CHECK(cm.counts == std::vector<std::vector<size_t>>{{1, 1}, {1, 1}});
}

TEST_CASE("confusion: errors") {
    ClassIndex idx{{"a", "b"}};
    CHECK_THROWS_AS(confusion_matrix({0}, {0, 1}, idx), LengthMismatch);
    CHECK_THROWS_AS(confusion_matrix({0, 2}, {0, 0}, idx), LabelOutOfRange);
    CHECK_THROWS_AS(confusion_matrix({0, -1}, {0, 0}, idx), LabelOutOfRange);
}

TEST_CASE("report: all-half matrix") {
    ConfusionMatrix cm;
    cm.class_index = {{"a", "b"}};
    cm.counts = {{1, 1}, {1, 1}};
    ClassReport report = per_class_report(cm);
    for (size_t c = 0; c < 2; ++c) {
        CHECK(report.precision[c] == 0.5);
        CHECK(report.recall[c] == 0.5);
        CHECK(report.f1[c] == 0.5);
    }
}

TEST_CASE("report: never-predicted class gets zeros") {
    ConfusionMatrix cm;
    cm.class_index = {{"a", "b"}};
    cm.counts = {{2, 0}, {3, 0}}; // column b empty
    ClassReport report = per_class_report(cm);
    CHECK(report.precision[1] == 0.0);
    CHECK(report.recall[1] == 0.0);
    CHECK(report.f1[1] == 0.0);
    // macro still averages over both classes
    CHECK(macro_f1(cm) == doctest::Approx(report.f1[0] / 2.0));
}

TEST_CASE("report: forest matrix, data-exfiltration row") {
    ClassReport report = per_class_report(forest_matrix());
    CHECK(report.precision[0] == doctest::Approx(33.0 / 58.0).epsilon(1e-12));
    CHECK(report.recall[0] == doctest::Approx(33.0 / 74.0).epsilon(1e-12));
    CHECK(report.f1[0] == doctest::Approx(0.500).epsilon(1e-3));
}

TEST_CASE("macro: perfect predictions") {
    ConfusionMatrix cm = confusion_matrix({0, 1, 2}, {0, 1, 2}, {{"a", "b", "c"}});
    CHECK(macro_f1(cm) == 1.0);
}

TEST_CASE("macro: tuned matrix reproduces the headline score") {
    CHECK(macro_f1(tuned_matrix()) == doctest::Approx(0.8137).epsilon(0.0007));
}

TEST_CASE("macro: forest matrix lands near its reported score") {
    double computed = macro_f1(forest_matrix());
    CHECK(computed == doctest::Approx(0.8128).epsilon(0.0007));
    // published summary for this matrix is 0.8103, a ~0.0025 gap
    CHECK(std::abs(computed - 0.8103) < 0.01);
}

TEST_CASE("macro: row sums match the class supports") {
    ConfusionMatrix cm = tuned_matrix();
    std::vector<size_t> sums;
    for (size_t i = 0; i < cm.m(); ++i) sums.push_back(cm.row_sum(i));
    CHECK(sums == std::vector<size_t>{74, 77, 142, 55583, 360, 251});
}

TEST_CASE("property: pair order does not change the matrix") {
    Rng rng(3);
    std::vector<int> y_true, y_pred;
    for (size_t i = 0; i < 500; ++i) {
        y_true.push_back(static_cast<int>(rng.next_index(4)));
        y_pred.push_back(static_cast<int>(rng.next_index(4)));
    }
    ClassIndex idx{{"a", "b", "c", "d"}};
    ConfusionMatrix before = confusion_matrix(y_true, y_pred, idx);

    std::vector<size_t> perm(y_true.size());
    for (size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    std::vector<int> t2, p2;
    for (size_t i : perm) {
        t2.push_back(y_true[i]);
        p2.push_back(y_pred[i]);
    }
    ConfusionMatrix after = confusion_matrix(t2, p2, idx);
    CHECK(before.counts == after.counts);
}

TEST_CASE("property: macro is invariant under consistent class reordering") {
    ConfusionMatrix cm = tuned_matrix();
    size_t m = cm.m();
    std::vector<size_t> perm{3, 0, 5, 1, 4, 2};
    ConfusionMatrix permuted;
    permuted.counts.assign(m, std::vector<size_t>(m, 0));
    for (size_t i = 0; i < m; ++i) {
        permuted.class_index.names.push_back(cm.class_index.names[perm[i]]);
        for (size_t j = 0; j < m; ++j) permuted.counts[i][j] = cm.counts[perm[i]][perm[j]];
    }
    CHECK(macro_f1(permuted) == doctest::Approx(macro_f1(cm)).epsilon(1e-12));
}

TEST_CASE("property: both averages stay inside [0, 1]") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> y_true, y_pred;
        for (size_t i = 0; i < 50; ++i) {
            y_true.push_back(static_cast<int>(rng.next_index(3)));
            y_pred.push_back(static_cast<int>(rng.next_index(3)));
        }
        ConfusionMatrix cm = confusion_matrix(y_true, y_pred, {{"a", "b", "c"}});
        double mf = macro_f1(cm), wf = weighted_f1(cm);
        CHECK(mf >= 0.0);
        CHECK(mf <= 1.0);
        CHECK(wf >= 0.0);
        CHECK(wf <= 1.0);
    }
}

TEST_CASE("imbalance: constant-majority prediction looks great weighted, poor macro") {
    // class distribution shaped like a 98%-normal-traffic capture
    std::vector<size_t> counts{11, 10, 15, 5097, 43, 17};
    std::vector<int> y_true, y_pred;
    for (size_t c = 0; c < counts.size(); ++c) {
        for (size_t i = 0; i < counts[c]; ++i) {
            y_true.push_back(static_cast<int>(c));
            y_pred.push_back(3); // always the majority class
        }
    }
    ConfusionMatrix cm = confusion_matrix(y_true, y_pred, apt_classes());
    CHECK(weighted_f1(cm) >= 0.95);
    CHECK(macro_f1(cm) <= 0.20);
}

TEST_CASE("render: report table carries the W Avg / M Avg rows") {
    SummaryReport summary = summarize(tuned_matrix());
    std::string text = render_report_text(summary);
    CHECK(text.find("W Avg") != std::string::npos);
    CHECK(text.find("M Avg") != std::string::npos);
    CHECK(text.find("0.8137") != std::string::npos);
}

TEST_CASE("render: confusion text reproduces all 36 counts") {
    ConfusionMatrix cm = tuned_matrix();
    std::string text = render_confusion_text(cm);
    std::istringstream in(text);
    std::string line;
    std::vector<size_t> parsed;
    for (size_t i = 0; i < cm.m(); ++i) {
        std::getline(in, line);
        std::istringstream cells(line);
        std::string name;
        cells >> name;
        size_t value;
        while (cells >> value) parsed.push_back(value);
    }
    std::vector<size_t> expected;
    for (const auto& row : cm.counts) expected.insert(expected.end(), row.begin(), row.end());
    CHECK(parsed == expected);
}

TEST_CASE("short names abbreviate camel case") {
    CHECK(short_class_name("DataExfiltration") == "DE");
    CHECK(short_class_name("NormalTraffic") == "NT");
    CHECK(short_class_name("Lateral Movement") == "LM");
    CHECK(short_class_name("P") == "P");
}
