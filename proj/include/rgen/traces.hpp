#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgen/framework.hpp"
#include "rgen/regular.hpp"

namespace rgen {

/// Alphabet with a symmetric, irreflexive independence relation.
class IndepAlphabet {
 public:
  IndepAlphabet() = default;
  IndepAlphabet(Alphabet sigma, const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
  static IndepAlphabet of(const Dfa& A) { return IndepAlphabet(A.alphabet, A.indep); }

  const Alphabet& sigma() const { return sigma_; }
  bool independent(std::size_t a, std::size_t b) const { return I_[a * sigma_.size() + b]; }
  bool transitive() const;

 private:
  Alphabet sigma_;
  std::vector<bool> I_;
};

/// Lexicographically least word equivalent to x.
std::string normal_form(std::string_view x, const IndepAlphabet& A);

/// Default limit on word length for the down-set DPs.
inline constexpr std::size_t kTraceLengthLimit = 48;

/// Size of the equivalence class of x.
Nat class_size(std::string_view x, const IndepAlphabet& A, std::size_t limit = kTraceLengthLimit);

/// Number of words of L equivalent to x.
Nat count_representatives(const Dfa& L, std::string_view x, const IndepAlphabet& A,
                          std::size_t limit = kTraceLengthLimit);

/// Traces of [L] of size n, by collecting normal forms over the slice; exponential, small n only.
Nat trace_census_exact(const Dfa& L, const IndepAlphabet& A, std::size_t n, const Nat& ceiling);

/// Words of L mapped onto their traces (as normal forms).
Description<std::string, std::string> trace_description(const Dfa& L, const IndepAlphabet& A, PolyBound D);

/// Throws AmbiguityExceeded if a word of length <= max_n has more than D(n) equivalent words in L.
void validate_trace_ambiguity(const Dfa& L, const IndepAlphabet& A, const PolyBound& D, std::size_t max_n);

}  // namespace rgen
