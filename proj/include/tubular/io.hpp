#pragma once

#include <string>
#include <vector>

namespace tubular {

// Shortest decimal string that round-trips to the same double.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> comments;  // emitted as leading '# ' lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Writes the table with a trailing newline; LF line endings, no quoting
// (callers guarantee cells contain no commas).
void write_csv(const std::string& path, const CsvTable& table);

// Minimal CSV reader for numeric sample tables (header + double cells).
CsvTable read_csv(const std::string& path);

}  // namespace tubular
