#include "synthwright/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "synthwright/errors.hpp"

namespace synthwright {

namespace {

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

// RFC 4180 state machine over the whole text. Accepts both \n and \r\n.
RawTable parse_records(const std::string& text) {
    RawTable out;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_started = false;

    auto end_field = [&]() {
        record.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_record = [&]() {
        end_field();
        if (out.header.empty())
            out.header = record;
        else
            out.rows.push_back(record);
        record.clear();
        record_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field_started && field.empty()) {
                    in_quotes = true;
                    field_started = true;
                    record_started = true;
                } else {
                    field += c; // stray quote inside unquoted field, keep it
                }
                break;
            case ',':
                end_field();
                record_started = true;
                break;
            case '\r':
                break;
            case '\n':
                if (record_started || !field.empty() || !record.empty())
                    end_record();
                break;
            default:
                field += c;
                field_started = true;
                record_started = true;
        }
    }
    if (in_quotes) throw ValidationError("CSV: unterminated quoted field");
    if (record_started || !field.empty() || !record.empty()) end_record();
    return out;
}

bool parse_full_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    if (end != begin + s.size()) return false;
    if (errno == ERANGE || !std::isfinite(v)) return false;
    out = v;
    return true;
}

std::string quote_if_needed(const std::string& s) {
    const bool needs = s.find_first_of(",\"\n\r") != std::string::npos;
    if (!needs) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += "\"\"";
        else q += c;
    }
    q += '"';
    return q;
}

} // namespace

std::string kind_name(ColumnKind k) {
    return k == ColumnKind::Categorical ? "categorical" : "numeric";
}

const Column& Dataset::column(const std::string& name) const {
    const auto it = index_.find(name);
    if (it == index_.end())
        throw ValidationError("no such column: " + name);
    return columns_[it->second];
}

bool Dataset::has_column(const std::string& name) const {
    return index_.count(name) > 0;
}

void Dataset::add_column(Column col) {
    if (index_.count(col.name))
        throw ValidationError("duplicate column: " + col.name);
    if (!columns_.empty() && col.size() != rows_)
        throw ValidationError("column length mismatch for: " + col.name);
    rows_ = col.size();
    index_[col.name] = columns_.size();
    columns_.push_back(std::move(col));
}

Dataset Dataset::drop_column(const std::string& name) const {
    if (!has_column(name)) throw ValidationError("no such column: " + name);
    Dataset out;
    for (const auto& c : columns_)
        if (c.name != name) out.add_column(c);
    return out;
}

Dataset Dataset::filter_rows(const std::string& column,
                             const std::string& value) const {
    const Column& key = this->column(column);
    if (key.kind != ColumnKind::Categorical)
        throw ValidationError("filter_rows requires a categorical column: " + column);
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < key.cat.size(); ++i)
        if (key.cat[i] == value) keep.push_back(i);
    return select_rows(keep);
}

Dataset Dataset::select_rows(const std::vector<std::size_t>& indices) const {
    for (std::size_t i : indices)
        if (i >= rows_) throw ValidationError("row index out of range");
    Dataset out;
    for (const auto& c : columns_) {
        Column nc;
        nc.name = c.name;
        nc.kind = c.kind;
        nc.integral = c.integral;
        if (c.kind == ColumnKind::Categorical) {
            nc.cat.reserve(indices.size());
            for (std::size_t i : indices) nc.cat.push_back(c.cat[i]);
        } else {
            nc.num.reserve(indices.size());
            for (std::size_t i : indices) nc.num.push_back(c.num[i]);
        }
        out.add_column(std::move(nc));
    }
    return out;
}

void Dataset::append_row_from(const Dataset& src, std::size_t row) {
    if (src.column_count() != column_count())
        throw ValidationError("cannot append a row across different schemas");
    if (row >= src.rows_) throw ValidationError("row index out of range");
    for (std::size_t c = 0; c < columns_.size(); ++c) {
        Column& dst = columns_[c];
        const Column& from = src.columns_[c];
        if (dst.name != from.name || dst.kind != from.kind)
            throw ValidationError("cannot append a row across different schemas");
        if (dst.kind == ColumnKind::Categorical)
            dst.cat.push_back(from.cat[row]);
        else
            dst.num.push_back(from.num[row]);
    }
    ++rows_;
}

void Dataset::set_cat(std::size_t row, std::size_t col, std::string value) {
    Column& c = columns_.at(col);
    if (c.kind != ColumnKind::Categorical)
        throw ValidationError("set_cat on numeric column " + c.name);
    c.cat.at(row) = std::move(value);
}

void Dataset::set_num(std::size_t row, std::size_t col, double value) {
    Column& c = columns_.at(col);
    if (c.kind != ColumnKind::Numeric)
        throw ValidationError("set_num on categorical column " + c.name);
    c.num.at(row) = value;
}

std::string Dataset::cell_text(std::size_t row, std::size_t col) const {
    const Column& c = columns_.at(col);
    if (c.kind == ColumnKind::Categorical) return c.cat.at(row);
    return format_numeric(c.num.at(row), c.integral);
}

Dataset parse_csv_text(const std::string& text, const LoadOptions& options) {
    RawTable raw = parse_records(text);
    if (raw.header.empty()) throw ValidationError("CSV: missing header row");
    {
        std::set<std::string> seen;
        for (const auto& h : raw.header) {
            if (h.empty()) throw ValidationError("CSV: empty column name in header");
            if (!seen.insert(h).second)
                throw ValidationError("CSV: duplicate column name: " + h);
        }
    }
    const std::size_t width = raw.header.size();
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        if (raw.rows[r].size() != width) {
            std::ostringstream os;
            os << "CSV: row " << r + 2 << " has " << raw.rows[r].size()
               << " fields, expected " << width;
            throw ValidationError(os.str());
        }
    }

    // Missing-cell policy before any typing.
    std::vector<std::vector<std::string>> rows;
    rows.reserve(raw.rows.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
        const bool missing = std::any_of(raw.rows[r].begin(), raw.rows[r].end(),
                                         [](const std::string& s) { return s.empty(); });
        if (missing) {
            if (options.drop_missing_rows) continue;
            std::ostringstream os;
            os << "CSV: missing value in row " << r + 2
               << " (use the drop-missing option to skip such rows)";
            throw ValidationError(os.str());
        }
        rows.push_back(std::move(raw.rows[r]));
    }
    if (rows.empty()) throw ValidationError("CSV: no data rows");

    for (const auto& name : options.overrides.categorical)
        if (options.overrides.numeric.count(name))
            throw ValidationError("column forced both categorical and numeric: " + name);

    Dataset out;
    const double distinct_needed =
        std::min(20.0, 0.05 * static_cast<double>(rows.size()));
    for (std::size_t c = 0; c < width; ++c) {
        const std::string& name = raw.header[c];
        std::vector<double> parsed(rows.size());
        bool all_numeric = true;
        bool all_integral = true;
        std::set<double> distinct;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (!parse_full_double(rows[r][c], parsed[r])) {
                all_numeric = false;
                break;
            }
            distinct.insert(parsed[r]);
            if (parsed[r] != std::floor(parsed[r])) all_integral = false;
        }

        bool numeric;
        if (options.overrides.numeric.count(name)) {
            if (!all_numeric)
                throw ValidationError("column forced numeric has non-numeric cells: " + name);
            numeric = true;
        } else if (options.overrides.categorical.count(name)) {
            numeric = false;
        } else {
            numeric = all_numeric &&
                      static_cast<double>(distinct.size()) > distinct_needed;
        }

        Column col;
        col.name = name;
        if (numeric) {
            col.kind = ColumnKind::Numeric;
            col.num = std::move(parsed);
            col.integral = all_integral;
        } else {
            col.kind = ColumnKind::Categorical;
            col.cat.reserve(rows.size());
            for (const auto& row : rows) col.cat.push_back(row[c]);
        }
        out.add_column(std::move(col));
    }
    return out;
}

Dataset load_csv(const std::string& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path);
    return parse_csv_text(buf.str(), options);
}

std::string format_numeric(double value, bool prefer_integral) {
    if (prefer_integral && std::isfinite(value) && value == std::floor(value) &&
        std::abs(value) < 9.007199254740992e15) {
        const auto as_int = static_cast<long long>(value);
        return std::to_string(as_int);
    }
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

std::string csv_text(const Dataset& data) {
    std::string out;
    const auto& cols = data.columns();
    for (std::size_t c = 0; c < cols.size(); ++c) {
        if (c) out += ',';
        out += quote_if_needed(cols[c].name);
    }
    out += '\n';
    for (std::size_t r = 0; r < data.row_count(); ++r) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            if (cols[c].kind == ColumnKind::Categorical)
                out += quote_if_needed(cols[c].cat[r]);
            else
                out += format_numeric(cols[c].num[r], cols[c].integral);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << csv_text(data);
    if (!out) throw IoError("write failure: " + path);
}

} // namespace synthwright
