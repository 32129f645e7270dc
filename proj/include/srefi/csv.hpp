#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace srefi {

// Minimal CSV support for the manifest formats: comma-separated, no quoting,
// one header row. Field values therefore must not contain commas; list-valued
// cells use ';' as the inner separator.
std::vector<std::string> split_csv_line(const std::string& line);

struct CsvTable {
  std::vector<std::string> header;
  std::map<std::string, size_t> column;          // header name -> index
  std::vector<std::vector<std::string>> rows;    // field values per data row
  std::vector<size_t> line_numbers;              // 1-based source line per row
};

// Reads a CSV file. `required_columns` must all appear in the header.
CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& required_columns);

std::string join_csv_line(const std::vector<std::string>& fields);

}  // namespace srefi
