#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace conelab {

/// Deterministic round-trip formatting for emitted numbers: shortest decimal
/// that parses back to the same double.
std::string format_double(double v);
std::string format_double_list(const std::vector<double>& v);

/// CSV with '#'-prefixed comment lines documenting columns and units,
/// followed by a header row and data rows. All numbers use format_double.
class CsvWriter {
 public:
  void add_comment(const std::string& line) { comments_.push_back(line); }
  void set_columns(const std::vector<std::string>& names) { columns_ = names; }
  void add_row(const std::vector<double>& values);
  void add_text_row(const std::vector<std::string>& cells);
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> comments_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_text_file(const std::filesystem::path& path, const std::string& content);

}  // namespace conelab
