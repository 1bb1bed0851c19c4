#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rgen {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input file; line is 1-based, 0 when unknown.
struct ParseError : Error {
  std::size_t line;
  ParseError(const std::string& what, std::size_t line_no = 0)
      : Error(line_no ? "line " + std::to_string(line_no) + ": " + what : what),
        line(line_no) {}
};

struct EmptySlice : Error {
  EmptySlice() : Error("empty slice: no element of the requested size") {}
};

struct EmptyLanguage : Error {
  using Error::Error;
};

struct RankOutOfRange : Error {
  using Error::Error;
};

struct AmbiguityExceeded : Error {
  using Error::Error;
};

struct CeilingExceeded : Error {
  using Error::Error;
};

struct SizeGuard : Error {
  using Error::Error;
};

struct EpsilonInLanguage : Error {
  EpsilonInLanguage() : Error("grammar derives the empty word") {}
};

}  // namespace rgen
