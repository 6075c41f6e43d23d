#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace qtwist {

/// Write `content` to a sibling temporary file and rename it over `path`,
/// so readers never observe a partial file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// RFC-4180 field quoting: fields with comma, quote, CR or LF are quoted and
/// embedded quotes doubled.
std::string csv_field(std::string_view s);

/// Shortest round-trip representation of a double.
std::string format_double(double v);

/// Accumulates CSV rows in memory and writes them atomically.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  void add_row(const std::vector<std::string>& fields);
  /// Comment lines are emitted before the header, prefixed by "# ".
  void add_comment(const std::string& text);

  std::string str() const;
  void write(const std::filesystem::path& path) const;

  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

}  // namespace qtwist
