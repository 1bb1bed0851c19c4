#include "rgen/textio.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rgen/errors.hpp"

namespace rgen {

std::vector<Line> tokenize(std::string_view text) {
  std::vector<Line> out;
  std::size_t no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view raw = text.substr(pos, end - pos);
    ++no;
    if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    std::istringstream in{std::string(raw)};
    Line line;
    line.no = no;
    for (std::string t; in >> t;) line.tok.push_back(t);
    if (!line.tok.empty()) out.push_back(std::move(line));
    pos = end + 1;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

long parse_long(const std::string& tok, std::size_t line) {
  long v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size())
    throw ParseError("expected an integer, got '" + tok + "'", line);
  return v;
}

std::size_t parse_count(const std::string& tok, std::size_t line) {
  long v = parse_long(tok, line);
  if (v < 0) throw ParseError("expected a non-negative integer, got '" + tok + "'", line);
  return static_cast<std::size_t>(v);
}

char parse_symbol(const std::string& tok, std::size_t line) {
  if (tok.size() != 1) throw ParseError("symbols are single characters, got '" + tok + "'", line);
  return tok[0];
}

}  // namespace rgen
