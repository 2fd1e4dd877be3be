#include "edbench/common/table.hpp"

#include "edbench/common/csv.hpp"
#include "edbench/common/error.hpp"

namespace edbench {

NumericTable::NumericTable(std::vector<std::string> names)
    : names_(std::move(names)), columns_(names_.size()) {}

std::optional<std::size_t> NumericTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  return std::nullopt;
}

std::size_t NumericTable::index_of(std::string_view name) const {
  if (auto i = find(name)) return *i;
  throw Error(ErrorCode::MissingColumn, "table has no column '" + std::string(name) + "'");
}

void NumericTable::add_row(const std::vector<double>& values) {
  if (values.size() != names_.size()) {
    throw Error(ErrorCode::MalformedRow, "row width " + std::to_string(values.size()) +
                                             " != " + std::to_string(names_.size()));
  }
  for (std::size_t c = 0; c < values.size(); ++c) columns_[c].push_back(values[c]);
  ++rows_;
}

void NumericTable::add_column(std::string name, std::vector<double> values) {
  if (!names_.empty() && values.size() != rows_) {
    throw Error(ErrorCode::MalformedRow, "column '" + name + "' has wrong length");
  }
  if (names_.empty()) rows_ = values.size();
  names_.push_back(std::move(name));
  columns_.push_back(std::move(values));
}

NumericTable NumericTable::select_rows(const std::vector<std::size_t>& rows) const {
  NumericTable out(names_);
  for (std::size_t c = 0; c < names_.size(); ++c) {
    out.columns_[c].reserve(rows.size());
    for (std::size_t r : rows) out.columns_[c].push_back(columns_[c][r]);
  }
  out.rows_ = rows.size();
  return out;
}

std::size_t NumericTable::missing_cells() const {
  std::size_t n = 0;
  for (const auto& col : columns_) {
    for (double v : col) n += is_missing(v) ? 1 : 0;
  }
  return n;
}

std::string NumericTable::to_csv() const {
  csv::Writer writer(names_);
  std::vector<std::string> fields(names_.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < names_.size(); ++c) fields[c] = csv::format_number(columns_[c][r]);
    writer.add_row(fields);
  }
  return writer.str();
}

void NumericTable::write_csv(const std::filesystem::path& path) const {
  csv::write_text_file(path, to_csv());
}

NumericTable NumericTable::read_csv(const std::filesystem::path& path) {
  const auto doc = csv::read_file(path);
  NumericTable table(doc.header);
  std::vector<double> values(doc.header.size());
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    if (row.size() != doc.header.size()) {
      throw Error(ErrorCode::MalformedRow, path.string() + " line " +
                                               std::to_string(doc.line_numbers[r]));
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      values[c] = value_or_missing(csv::parse_double(row[c]));
    }
    table.add_row(values);
  }
  return table;
}

bool operator==(const NumericTable& a, const NumericTable& b) {
  if (a.names_ != b.names_ || a.rows_ != b.rows_) return false;
  for (std::size_t c = 0; c < a.columns_.size(); ++c) {
    for (std::size_t r = 0; r < a.rows_; ++r) {
      const double x = a.columns_[c][r], y = b.columns_[c][r];
      if (!(x == y || (is_missing(x) && is_missing(y)))) return false;
    }
  }
  return true;
}

}  // namespace edbench
