#include "srefi/csv.hpp"

#include <fstream>
#include <sstream>

#include "srefi/error.hpp"

namespace srefi {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

CsvTable read_csv(const std::filesystem::path& path,
                  const std::vector<std::string>& required_columns) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open: " + path.string());

  CsvTable table;
  std::string line;
  size_t line_no = 0;
  if (!std::getline(in, line)) {
    fail(ErrorKind::Parse, path.string() + ": no records (empty file)");
  }
  ++line_no;
  table.header = split_csv_line(line);
  for (size_t i = 0; i < table.header.size(); ++i) {
    table.column[table.header[i]] = i;
  }
  for (const std::string& col : required_columns) {
    if (!table.column.count(col)) {
      fail(ErrorKind::Parse,
           path.string() + ": missing required column '" + col + "'");
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    if (!line.empty() && line[0] == '#') continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << line_no << ": expected "
          << table.header.size() << " fields, got " << fields.size();
      fail(ErrorKind::Parse, msg.str());
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  return table;
}

std::string join_csv_line(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += fields[i];
  }
  return out;
}

}  // namespace srefi
