#ifndef PKIFLOW_FLOW_CSV_HPP
#define PKIFLOW_FLOW_CSV_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pkiflow/errors.hpp"
#include "pkiflow/matrix.hpp"

namespace pkiflow {

// Flow-record CSV ingestion: RFC-4180 parsing, identifier-column stripping and
// sanitization of the non-finite values flow meters emit for rate features.

struct RawFlowTable {
    std::vector<std::string> column_names;
    std::vector<std::vector<std::string>> rows; // each row has column_names.size() cells

    size_t row_count() const { return rows.size(); }
};

// Column-name matchers, exact match after whitespace trim, case-insensitive.
struct IdentifierDropList {
    std::vector<std::string> patterns;

    // Node-specific columns a CICFlowMeter-style CSV carries.
    static IdentifierDropList defaults();
    bool matches(const std::string& column_name) const;
};

enum class InfinityAction { replace_with_column_max_finite, drop_row };
enum class NanAction { replace_with_zero, drop_row };

struct SanitizePolicy {
    InfinityAction infinity_action = InfinityAction::replace_with_column_max_finite;
    NanAction nan_action = NanAction::replace_with_zero;
};

// Per-column provenance of what sanitize_values did.
struct SanitizeLog {
    std::vector<std::string> columns;
    std::vector<size_t> replaced; // cells rewritten in surviving rows
    std::vector<size_t> dropped;  // cells that caused their row to be dropped
    SanitizePolicy policy;

    std::string to_json() const; // {"column": {"replaced": n, "dropped": n}, ...}
};

struct FeatureTable {
    std::vector<std::string> feature_names;
    Matrix values; // n x d, all finite
    std::vector<std::string> labels;
    std::string label_name = "Label";

    bool operator==(const FeatureTable& other) const = default;
};

// RFC-4180 parse of UTF-8 text. Quoted cells are unwrapped, "" inside quotes
// becomes ", CR/LF and LF row endings both accepted, blank lines skipped.
// With has_header=false the columns are named c0..c{w-1} from the first row.
// Throws EncodingError, EmptyInput, MalformedRow (with 1-based start line).
RawFlowTable parse_flow_csv(std::istream& source, bool has_header = true);
RawFlowTable parse_flow_csv(const std::string& text, bool has_header = true);

// Removes every column matched by `drop` plus the label column, returning the
// surviving table (column order preserved) and the labels in row order.
// Throws MissingLabelColumn, AllColumnsDropped.
std::pair<RawFlowTable, std::vector<std::string>>
drop_identifier_columns(const RawFlowTable& raw, const IdentifierDropList& drop,
                        const std::string& label_column = "Label");

// Parses every cell as a real number (scientific notation ok, locale-free;
// NaN/Infinity/-Infinity/inf/-inf tokens accepted case-insensitively) and
// applies the policy. Replacement values for infinities are the column max
// over the finite cells of all rows (0 if a column has none); rows marked for
// drop are removed after that max is computed, and only cells of surviving
// rows count as "replaced". Throws UnparseableCell, RowCountMismatch.
std::pair<FeatureTable, SanitizeLog>
sanitize_values(const RawFlowTable& table, const std::vector<std::string>& labels,
                const SanitizePolicy& policy = {});

// CSV emission; parse_flow_csv of the output reproduces the table exactly
// (doubles are printed with shortest round-trip formatting).
void write_feature_csv(const FeatureTable& table, std::ostream& out);
std::string write_feature_csv(const FeatureTable& table);

} // namespace pkiflow

#endif
