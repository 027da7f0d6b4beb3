#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dermaprep::csv {

struct Table {
  std::vector<std::string> comments;  // lines starting with '#', without the '#'
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> row_lines;  // 1-based source line of each row
};

// Comma-separated with optional double-quote quoting. Blank lines are
// skipped; '#' lines before the header are collected as comments.
Table parse(std::string_view text, const std::string& source = "<csv>");
Table read(const std::filesystem::path& path);

std::vector<std::string> split_line(std::string_view line, const std::string& source, int lineno);
std::string escape(std::string_view field);
std::string join(const std::vector<std::string>& fields);

}  // namespace dermaprep::csv
