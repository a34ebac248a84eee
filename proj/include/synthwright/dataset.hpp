#ifndef SYNTHWRIGHT_DATASET_HPP
#define SYNTHWRIGHT_DATASET_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace synthwright {

enum class ColumnKind { Categorical, Numeric };

std::string kind_name(ColumnKind k);

// One typed column. Exactly one of the two value vectors is populated,
// matching `kind`. Numeric cells are 64-bit reals; `integral` records whether
// every loaded cell was a whole number so writers can keep "25" as "25".
struct Column {
    std::string name;
    ColumnKind kind = ColumnKind::Categorical;
    std::vector<std::string> cat;
    std::vector<double> num;
    bool integral = false;

    std::size_t size() const {
        return kind == ColumnKind::Categorical ? cat.size() : num.size();
    }
};

struct TypeOverrides {
    std::set<std::string> categorical;
    std::set<std::string> numeric;
};

struct LoadOptions {
    TypeOverrides overrides;
    bool drop_missing_rows = false; // otherwise a missing cell is an error
};

// Column-major table with unique, ordered column names.
class Dataset {
public:
    Dataset() = default;

    std::size_t row_count() const { return rows_; }
    std::size_t column_count() const { return columns_.size(); }

    const std::vector<Column>& columns() const { return columns_; }
    const Column& column(const std::string& name) const;
    bool has_column(const std::string& name) const;

    // Appends a fully built column; its length must match existing ones
    // (any length is fine for the first column).
    void add_column(Column col);

    Dataset drop_column(const std::string& name) const;

    // Rows where `column` (categorical) equals `value`.
    Dataset filter_rows(const std::string& column, const std::string& value) const;

    // Row-index projection, used by splits.
    Dataset select_rows(const std::vector<std::size_t>& indices) const;

    // Copies one row of a schema-identical dataset onto the end of this one.
    void append_row_from(const Dataset& src, std::size_t row);
    void set_cat(std::size_t row, std::size_t col, std::string value);
    void set_num(std::size_t row, std::size_t col, double value);

    std::string cell_text(std::size_t row, std::size_t col) const;

private:
    std::vector<Column> columns_;
    std::map<std::string, std::size_t> index_;
    std::size_t rows_ = 0;
};

// RFC 4180 reader: quoted fields may contain commas, quotes ("" escape) and
// newlines. The first record is the header. Type detection per column: numeric
// iff every non-missing cell parses fully as a finite real and the distinct
// parsed-value count exceeds min(20, 5% of rows); overrides take precedence.
// A missing (empty) cell raises ValidationError unless drop_missing_rows is
// set, which silently drops the whole row.
Dataset load_csv(const std::string& path, const LoadOptions& options = {});
Dataset parse_csv_text(const std::string& text, const LoadOptions& options = {});

// Writer: quotes only when needed; numeric cells print either as integers
// (whole values) or shortest round-trip decimals; rows end with '\n'.
void write_csv(const Dataset& data, const std::string& path);
std::string csv_text(const Dataset& data);

// Shortest text that parses back to exactly this double; whole numbers in
// the safe integer range print without a decimal part.
std::string format_numeric(double value, bool prefer_integral = true);

} // namespace synthwright

#endif
