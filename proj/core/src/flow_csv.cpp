#include "pkiflow/flow_csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <ostream>
#include <sstream>

namespace pkiflow {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool valid_utf8(const std::string& text) {
    const unsigned char* p = reinterpret_cast<const unsigned char*>(text.data());
    size_t n = text.size();
    size_t i = 0;
    while (i < n) {
        unsigned char c = p[i];
        size_t extra;
        if (c < 0x80) {
            extra = 0;
        } else if ((c & 0xE0) == 0xC0) {
            extra = 1;
            if (c < 0xC2) return false; // overlong
        } else if ((c & 0xF0) == 0xE0) {
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            extra = 3;
            if (c > 0xF4) return false;
        } else {
            return false;
        }
        if (i + extra >= n) return false;
        for (size_t k = 1; k <= extra; ++k) {
            if ((p[i + k] & 0xC0) != 0x80) return false;
        }
        i += extra + 1;
    }
    return true;
}

// One pass RFC-4180 state machine. Records the 1-based physical line each row
// starts on so width errors can point at the offender.
struct CsvReader {
    const std::string& text;
    size_t pos = 0;
    size_t line = 1;

    explicit CsvReader(const std::string& t) : text(t) {
        if (text.size() >= 3 && std::memcmp(text.data(), "\xEF\xBB\xBF", 3) == 0) pos = 3;
    }

    bool eof() const { return pos >= text.size(); }

    // Returns false at end of input. Skips blank lines.
    bool next_record(std::vector<std::string>& cells, size_t& start_line) {
        cells.clear();
        while (!eof() && (text[pos] == '\n' || text[pos] == '\r')) {
            if (text[pos] == '\n') ++line;
            if (text[pos] == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
            ++pos;
        }
        if (eof()) return false;
        start_line = line;
        std::string cell;
        bool in_quotes = false;
        for (;;) {
            if (eof()) {
                cells.push_back(std::move(cell));
                if (in_quotes) throw MalformedRow("unterminated quoted cell", start_line);
                return true;
            }
            char c = text[pos];
            if (in_quotes) {
                if (c == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        cell.push_back('"');
                        pos += 2;
                    } else {
                        in_quotes = false;
                        ++pos;
                    }
                } else {
                    if (c == '\n') ++line;
                    cell.push_back(c);
                    ++pos;
                }
            } else if (c == '"' && cell.empty()) {
                in_quotes = true;
                ++pos;
            } else if (c == ',') {
                cells.push_back(std::move(cell));
                cell.clear();
                ++pos;
            } else if (c == '\n' || c == '\r') {
                cells.push_back(std::move(cell));
                if (c == '\r' && pos + 1 < text.size() && text[pos + 1] == '\n') ++pos;
                ++pos;
                ++line;
                return true;
            } else {
                cell.push_back(c);
                ++pos;
            }
        }
    }
};

// Full-cell numeric parse; leading '+' and surrounding whitespace tolerated.
// std::from_chars already understands inf/infinity/nan spellings.
bool parse_cell_double(const std::string& raw, double& out) {
    std::string s = trim(raw);
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = s.data() + s.size();
    if (*begin == '+') ++begin;
    if (begin == end) return false;
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

void append_csv_cell(std::string& out, const std::string& cell) {
    bool needs_quotes = cell.find_first_of(",\"\r\n") != std::string::npos;
    if (!needs_quotes) {
        out += cell;
        return;
    }
    out += '"';
    for (char c : cell) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

IdentifierDropList IdentifierDropList::defaults() {
    return {{"Flow ID", "Src IP", "Dst IP", "Src Port", "Dst Port", "Protocol", "Timestamp"}};
}

bool IdentifierDropList::matches(const std::string& column_name) const {
    std::string probe = lower(trim(column_name));
    for (const auto& p : patterns) {
        if (lower(trim(p)) == probe) return true;
    }
    return false;
}

RawFlowTable parse_flow_csv(const std::string& text, bool has_header) {
    if (!valid_utf8(text)) throw EncodingError("input is not valid UTF-8");
    CsvReader reader(text);
    RawFlowTable table;
    std::vector<std::string> cells;
    size_t start_line = 0;
    if (!reader.next_record(cells, start_line)) throw EmptyInput("no header line");
    size_t width = cells.size();
    if (has_header) {
        table.column_names = cells;
        std::vector<std::string> seen;
        for (const auto& name : table.column_names) {
            std::string key = trim(name);
            if (std::find(seen.begin(), seen.end(), key) != seen.end())
                throw MalformedRow("duplicate column name '" + key + "'", start_line);
            seen.push_back(key);
        }
    } else {
        for (size_t j = 0; j < width; ++j) table.column_names.push_back("c" + std::to_string(j));
        table.rows.push_back(cells);
    }
    while (reader.next_record(cells, start_line)) {
        if (cells.size() != width) {
            throw MalformedRow("row has " + std::to_string(cells.size()) + " cells, expected " +
                                   std::to_string(width),
                               start_line);
        }
        table.rows.push_back(cells);
    }
    return table;
}

RawFlowTable parse_flow_csv(std::istream& source, bool has_header) {
    std::ostringstream buf;
    buf << source.rdbuf();
    return parse_flow_csv(buf.str(), has_header);
}

std::pair<RawFlowTable, std::vector<std::string>>
drop_identifier_columns(const RawFlowTable& raw, const IdentifierDropList& drop,
                        const std::string& label_column) {
    size_t label_idx = raw.column_names.size();
    for (size_t j = 0; j < raw.column_names.size(); ++j) {
        if (trim(raw.column_names[j]) == trim(label_column)) {
            label_idx = j;
            break;
        }
    }
    if (label_idx == raw.column_names.size())
        throw MissingLabelColumn("label column '" + label_column + "' not found");

    std::vector<size_t> keep;
    for (size_t j = 0; j < raw.column_names.size(); ++j) {
        if (j == label_idx) continue;
        if (drop.matches(raw.column_names[j])) continue;
        keep.push_back(j);
    }
    if (keep.empty()) throw AllColumnsDropped("no feature columns survive the drop list");

    RawFlowTable out;
    for (size_t j : keep) out.column_names.push_back(raw.column_names[j]);
    out.rows.reserve(raw.rows.size());
    std::vector<std::string> labels;
    labels.reserve(raw.rows.size());
    for (const auto& row : raw.rows) {
        std::vector<std::string> cells;
        cells.reserve(keep.size());
        for (size_t j : keep) cells.push_back(row[j]);
        out.rows.push_back(std::move(cells));
        labels.push_back(row[label_idx]);
    }
    return {std::move(out), std::move(labels)};
}

std::pair<FeatureTable, SanitizeLog>
sanitize_values(const RawFlowTable& table, const std::vector<std::string>& labels,
                const SanitizePolicy& policy) {
    if (labels.size() != table.rows.size())
        throw RowCountMismatch("labels: " + std::to_string(labels.size()) +
                               ", rows: " + std::to_string(table.rows.size()));
    size_t n = table.rows.size();
    size_t d = table.column_names.size();

    Matrix parsed(n, d);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j) {
            double v;
            if (!parse_cell_double(table.rows[i][j], v))
                throw UnparseableCell("cell '" + table.rows[i][j] + "'", i, j);
            parsed(i, j) = v;
        }
    }

    std::vector<double> col_max_finite(d, 0.0);
    std::vector<bool> col_has_finite(d, false);
    for (size_t j = 0; j < d; ++j) {
        for (size_t i = 0; i < n; ++i) {
            double v = parsed(i, j);
            if (std::isfinite(v) && (!col_has_finite[j] || v > col_max_finite[j])) {
                col_max_finite[j] = v;
                col_has_finite[j] = true;
            }
        }
    }

    SanitizeLog log;
    log.columns = table.column_names;
    log.replaced.assign(d, 0);
    log.dropped.assign(d, 0);
    log.policy = policy;

    std::vector<bool> keep_row(n, true);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < d; ++j) {
            double v = parsed(i, j);
            if (std::isnan(v) && policy.nan_action == NanAction::drop_row) {
                keep_row[i] = false;
                ++log.dropped[j];
            } else if (std::isinf(v) && policy.infinity_action == InfinityAction::drop_row) {
                keep_row[i] = false;
                ++log.dropped[j];
            }
        }
    }

    FeatureTable out;
    out.feature_names = table.column_names;
    size_t surviving = 0;
    for (size_t i = 0; i < n; ++i) surviving += keep_row[i] ? 1 : 0;
    out.values = Matrix(surviving, d);
    out.labels.reserve(surviving);

    size_t r = 0;
    for (size_t i = 0; i < n; ++i) {
        if (!keep_row[i]) continue;
        for (size_t j = 0; j < d; ++j) {
            double v = parsed(i, j);
            if (std::isnan(v)) {
                v = 0.0;
                ++log.replaced[j];
            } else if (std::isinf(v)) {
                v = col_max_finite[j];
                ++log.replaced[j];
            }
            out.values(r, j) = v;
        }
        out.labels.push_back(labels[i]);
        ++r;
    }
    return {std::move(out), std::move(log)};
}

std::string SanitizeLog::to_json() const {
    std::string out = "{";
    for (size_t j = 0; j < columns.size(); ++j) {
        if (j) out += ",";
        out += "\"";
        for (char c : columns[j]) {
            if (c == '"' || c == '\\') out += '\\';
            out += c;
        }
        out += "\":{\"replaced\":" + std::to_string(replaced[j]) +
               ",\"dropped\":" + std::to_string(dropped[j]) + "}";
    }
    out += "}";
    return out;
}

void write_feature_csv(const FeatureTable& table, std::ostream& out) {
    std::string buf;
    for (size_t j = 0; j < table.feature_names.size(); ++j) {
        if (j) buf += ',';
        append_csv_cell(buf, table.feature_names[j]);
    }
    buf += ',';
    append_csv_cell(buf, table.label_name);
    buf += '\n';
    for (size_t i = 0; i < table.values.rows; ++i) {
        for (size_t j = 0; j < table.values.cols; ++j) {
            if (j) buf += ',';
            buf += format_double(table.values(i, j));
        }
        buf += ',';
        append_csv_cell(buf, table.labels[i]);
        buf += '\n';
    }
    out << buf;
}

std::string write_feature_csv(const FeatureTable& table) {
    std::ostringstream out;
    write_feature_csv(table, out);
    return out.str();
}

} // namespace pkiflow
