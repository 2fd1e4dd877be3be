#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace edbench::csv {

/// Parsed comma-separated file. Dialect: comma delimiter, double-quote quoting
/// with `""` escapes, LF or CRLF line ends, UTF-8 with optional BOM, header row.
struct Document {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  /// 1-based physical line on which each row starts.
  std::vector<std::size_t> line_numbers;

  std::optional<std::size_t> column(std::string_view name) const;
};

Document parse(std::string_view text);
Document read_file(const std::filesystem::path& path);

std::string escape_field(std::string_view field);

class Writer {
 public:
  explicit Writer(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& fields);
  /// Lines starting with `#` placed before the header.
  void add_comment(std::string_view comment);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::size_t columns_;
  std::string comments_;
  std::string body_;
};

/// Shortest representation that parses back to the identical double.
std::string format_number(double value);
/// Fixed decimals, e.g. for report cells.
std::string format_fixed(double value, int decimals);

std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_integer(std::string_view text);

/// Writes through a temporary sibling file and renames, so readers never see
/// a partial file.
void write_text_file(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace edbench::csv
