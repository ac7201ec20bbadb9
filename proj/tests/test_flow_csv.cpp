#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pkiflow/flow_csv.hpp"

using namespace pkiflow;

TEST_CASE("parse: header only") {
    RawFlowTable t = parse_flow_csv(std::string("a,b,c\n"));
    CHECK(t.row_count() == 0);
    CHECK(t.column_names == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("parse: two data rows") {
    RawFlowTable t = parse_flow_csv(std::string("a,b\n1,2\n3,4"));
    CHECK(t.row_count() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2"});
    CHECK(t.rows[1] == std::vector<std::string>{"3", "4"});
}

TEST_CASE("parse: quoted cells, escaped quotes, embedded separators") {
    RawFlowTable t = parse_flow_csv(std::string("name,note\n\"x,y\",\"he said \"\"hi\"\"\"\n"));
    CHECK(t.rows[0][0] == "x,y");
    CHECK(t.rows[0][1] == "he said \"hi\"");
}

TEST_CASE("parse: newline inside a quoted cell") {
    RawFlowTable t = parse_flow_csv(std::string("a,b\n\"line1\nline2\",2\n"));
    CHECK(t.row_count() == 1);
    CHECK(t.rows[0][0] == "line1\nline2");
}

TEST_CASE("parse: CRLF endings and trailing blank lines") {
    RawFlowTable t = parse_flow_csv(std::string("a,b\r\n1,2\r\n\r\n"));
    CHECK(t.row_count() == 1);
}

TEST_CASE("parse: no header mode names columns c0..") {
    RawFlowTable t = parse_flow_csv(std::string("1,2\n3,4\n"), false);
    CHECK(t.column_names == std::vector<std::string>{"c0", "c1"});
    CHECK(t.row_count() == 2);
}

TEST_CASE("parse: empty input") {
    CHECK_THROWS_AS(parse_flow_csv(std::string("")), EmptyInput);
    CHECK_THROWS_AS(parse_flow_csv(std::string("\n\n")), EmptyInput);
}

TEST_CASE("parse: width mismatch reports the offending line") {
    try {
        parse_flow_csv(std::string("a,b\n1,2\n1,2,3\n"));
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("parse: invalid utf8") {
    std::string bad = "a,b\n1,\xFF\xFE\n";
    CHECK_THROWS_AS(parse_flow_csv(bad), EncodingError);
}

TEST_CASE("drop: default identifier list") {
    RawFlowTable raw;
    raw.column_names = {"Flow ID", "Src IP", "Dur", "Label"};
    raw.rows = {{"f1", "10.0.0.1", "1.5", "NT"}, {"f2", "10.0.0.2", "2.5", "DE"}};
    auto [kept, labels] = drop_identifier_columns(raw, IdentifierDropList::defaults(), "Label");
    CHECK(kept.column_names == std::vector<std::string>{"Dur"});
    CHECK(labels == std::vector<std::string>{"NT", "DE"});
}

TEST_CASE("drop: empty drop list removes only the label column") {
    RawFlowTable raw;
    raw.column_names = {"x", "y", "Label"};
    raw.rows = {{"1", "2", "A"}};
    auto [kept, labels] = drop_identifier_columns(raw, IdentifierDropList{}, "Label");
    CHECK(kept.column_names == std::vector<std::string>{"x", "y"});
    CHECK(labels == std::vector<std::string>{"A"});
}

TEST_CASE("drop: matcher is case and whitespace insensitive") {
    RawFlowTable raw;
    raw.column_names = {" src ip ", "Dur", "Label"};
    raw.rows = {};
    auto [kept, labels] = drop_identifier_columns(raw, IdentifierDropList::defaults(), "Label");
    CHECK(kept.column_names == std::vector<std::string>{"Dur"});
}

TEST_CASE("drop: errors") {
    RawFlowTable raw;
    raw.column_names = {"x", "Label"};
    raw.rows = {};
    CHECK_THROWS_AS(drop_identifier_columns(raw, IdentifierDropList::defaults(), "Missing"),
                    MissingLabelColumn);
    IdentifierDropList drop_all{{"x"}};
    CHECK_THROWS_AS(drop_identifier_columns(raw, drop_all, "Label"), AllColumnsDropped);
}

TEST_CASE("drop: a CICFlowMeter-shaped header keeps 76 features") {
    RawFlowTable raw;
    raw.column_names = {"Flow ID", "Src IP", "Src Port", "Dst IP", "Dst Port", "Protocol",
                        "Timestamp"};
    for (int j = 0; j < 76; ++j) raw.column_names.push_back("feat_" + std::to_string(j));
    raw.column_names.push_back("Label");
    CHECK(raw.column_names.size() == 84);
    auto [kept, labels] = drop_identifier_columns(raw, IdentifierDropList::defaults(), "Label");
    CHECK(kept.column_names.size() == 76);
}

TEST_CASE("drop: idempotent") {
    RawFlowTable raw;
    raw.column_names = {"Flow ID", "Dur", "Rate", "Label"};
    raw.rows = {{"f", "1", "2", "NT"}};
    auto [once, labels1] = drop_identifier_columns(raw, IdentifierDropList::defaults(), "Label");
    // re-attach the label column so the op can run again
    RawFlowTable again = once;
    again.column_names.push_back("Label");
    for (size_t i = 0; i < again.rows.size(); ++i) again.rows[i].push_back(labels1[i]);
    auto [twice, labels2] = drop_identifier_columns(again, IdentifierDropList::defaults(), "Label");
    CHECK(twice.column_names == once.column_names);
    CHECK(twice.rows == once.rows);
    CHECK(labels2 == labels1);
}

namespace {

RawFlowTable numeric_table(const std::vector<std::string>& names,
                           const std::vector<std::vector<std::string>>& rows) {
    RawFlowTable t;
    t.column_names = names;
    t.rows = rows;
    return t;
}

} // namespace

TEST_CASE("sanitize: infinity replaced by the column's finite max") {
    auto t = numeric_table({"x"}, {{"1.0"}, {"Infinity"}, {"3.0"}});
    auto [table, log] = sanitize_values(t, {"a", "a", "b"}, {});
    CHECK(table.values(0, 0) == 1.0);
    CHECK(table.values(1, 0) == 3.0);
    CHECK(table.values(2, 0) == 3.0);
    CHECK(log.replaced[0] == 1);
    CHECK(log.dropped[0] == 0);
}

TEST_CASE("sanitize: explicit max example") {
    auto t = numeric_table({"x"}, {{"9.5"}, {"inf"}});
    auto [table, log] = sanitize_values(t, {"a", "a"}, {});
    CHECK(table.values(1, 0) == 9.5);
}

TEST_CASE("sanitize: NaN to zero by default, drop_row shrinks labels") {
    auto t = numeric_table({"x"}, {{"NaN"}, {"2"}});
    auto [table, log] = sanitize_values(t, {"a", "b"}, {});
    CHECK(table.values(0, 0) == 0.0);

    SanitizePolicy drop;
    drop.nan_action = NanAction::drop_row;
    auto [table2, log2] = sanitize_values(t, {"a", "b"}, drop);
    CHECK(table2.values.rows == 1);
    CHECK(table2.labels == std::vector<std::string>{"b"});
    CHECK(log2.dropped[0] == 1);
}

TEST_CASE("sanitize: token spellings and scientific notation") {
    auto t = numeric_table({"x"}, {{"-InFiNiTy"}, {"-inf"}, {"nan"}, {"1e3"}, {"+2.5E-2"}});
    auto [table, log] = sanitize_values(t, {"a", "a", "a", "a", "a"}, {});
    CHECK(table.values(3, 0) == 1000.0);
    CHECK(table.values(4, 0) == 0.025);
    for (size_t i = 0; i < table.values.rows; ++i) CHECK(std::isfinite(table.values(i, 0)));
}

TEST_CASE("sanitize: errors") {
    auto t = numeric_table({"x"}, {{"abc"}});
    try {
        sanitize_values(t, {"a"}, {});
        FAIL("expected UnparseableCell");
    } catch (const UnparseableCell& e) {
        CHECK(e.row == 0);
        CHECK(e.column == 0);
    }
    auto t2 = numeric_table({"x"}, {{"1"}});
    CHECK_THROWS_AS(sanitize_values(t2, {"a", "b"}, {}), RowCountMismatch);
}

TEST_CASE("sanitize: log serializes per column") {
    auto t = numeric_table({"x", "y"}, {{"inf", "1"}, {"2", "NaN"}});
    auto [table, log] = sanitize_values(t, {"a", "b"}, {});
    CHECK(log.to_json() ==
          R"({"x":{"replaced":1,"dropped":0},"y":{"replaced":1,"dropped":0}})");
}

TEST_CASE("property: csv round-trip is exact") {
    FeatureTable table;
    table.feature_names = {"alpha", "beta,with comma"};
    table.values = Matrix(3, 2);
    table.values(0, 0) = 0.1;
    table.values(0, 1) = -1.5e-300;
    table.values(1, 0) = 12345.6789;
    table.values(1, 1) = 3.0;
    table.values(2, 0) = 1.0 / 3.0;
    table.values(2, 1) = 2.0 / 7.0;
    table.labels = {"NT", "DE", "odd \"label\""};

    std::string csv = write_feature_csv(table);
    RawFlowTable raw = parse_flow_csv(csv);
    auto [kept, labels] = drop_identifier_columns(raw, IdentifierDropList{}, "Label");
    auto [reparsed, log] = sanitize_values(kept, labels, {});
    CHECK(reparsed == table);
}

TEST_CASE("property: sanitized output is always finite") {
    auto t = numeric_table({"x", "y"}, {{"inf", "-inf"}, {"nan", "2"}, {"-1e308", "Infinity"}});
    auto [table, log] = sanitize_values(t, {"a", "b", "c"}, {});
    for (size_t i = 0; i < table.values.rows; ++i) {
        for (size_t j = 0; j < table.values.cols; ++j) {
            CHECK(std::isfinite(table.values(i, j)));
        }
    }
}
