#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace rgen {

/// One non-blank input line split on whitespace, '#' starting a comment.
struct Line {
  std::size_t no = 0;
  std::vector<std::string> tok;
};

std::vector<Line> tokenize(std::string_view text);
std::string read_file(const std::string& path);

std::size_t parse_count(const std::string& tok, std::size_t line);
long parse_long(const std::string& tok, std::size_t line);

/// Single printable character used as an alphabet symbol.
char parse_symbol(const std::string& tok, std::size_t line);

}  // namespace rgen
