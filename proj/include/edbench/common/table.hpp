#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edbench {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }
inline double value_or_missing(const std::optional<double>& v) { return v ? *v : kMissing; }

/// Column-major numeric table; NaN marks a missing cell. This is the on-disk
/// shape of train.csv / test.csv and the input to feature-matrix assembly.
class NumericTable {
 public:
  NumericTable() = default;
  explicit NumericTable(std::vector<std::string> names);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  std::optional<std::size_t> find(std::string_view name) const;
  /// Throws MissingColumn.
  std::size_t index_of(std::string_view name) const;

  std::vector<double>& column(std::size_t c) { return columns_[c]; }
  const std::vector<double>& column(std::size_t c) const { return columns_[c]; }
  std::vector<double>& column(std::string_view name) { return columns_[index_of(name)]; }
  const std::vector<double>& column(std::string_view name) const {
    return columns_[index_of(name)];
  }

  double at(std::size_t row, std::size_t col) const { return columns_[col][row]; }

  void add_row(const std::vector<double>& values);
  void add_column(std::string name, std::vector<double> values);
  NumericTable select_rows(const std::vector<std::size_t>& rows) const;

  std::size_t missing_cells() const;

  std::string to_csv() const;
  void write_csv(const std::filesystem::path& path) const;
  /// Every column is parsed as a number; empty cells become missing.
  static NumericTable read_csv(const std::filesystem::path& path);

  friend bool operator==(const NumericTable& a, const NumericTable& b);

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
};

}  // namespace edbench
