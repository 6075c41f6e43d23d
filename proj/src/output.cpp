#include "qtwist/output.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "qtwist/errors.hpp"

namespace qtwist {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw RangeError("cannot open " + tmp.string() + " for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw RangeError("write to " + tmp.string() + " failed");
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<std::string>& fields) {
  if (fields.size() != header_.size())
    throw DomainError("CsvTable: row width does not match header");
  std::string line;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) line += ',';
    line += csv_field(fields[i]);
  }
  rows_.push_back(std::move(line));
}

void CsvTable::add_comment(const std::string& text) { comments_.push_back(text); }

std::string CsvTable::str() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\n";
  for (std::size_t i = 0; i < header_.size(); ++i) {
    if (i) out += ',';
    out += csv_field(header_[i]);
  }
  out += '\n';
  for (const auto& r : rows_) out += r + '\n';
  return out;
}

void CsvTable::write(const std::filesystem::path& path) const {
  write_file_atomic(path, str());
}

}  // namespace qtwist
