#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace vrfb::io {

/// Rows of cells under a header. Numbers are written with 17 significant
/// digits so a write-read cycle reproduces every double exactly.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
  std::size_t column(const std::string& name) const;  // throws ConfigError if absent
  double number(std::size_t row, std::size_t col) const;
};

std::string format_double(double v);

std::string to_string(const CsvTable& t);
void write_csv(const std::filesystem::path& path, const CsvTable& t);  // atomic
/// Throws ConfigError on a missing file or ragged rows.
CsvTable read_csv(const std::filesystem::path& path);
CsvTable parse_csv(const std::string& text, const std::string& source = "csv");

}  // namespace vrfb::io
