#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgen/framework.hpp"
#include "rgen/numutil.hpp"

namespace rgen {

/// Ordered list of single-character symbols; the order is the lexicographic order.
class Alphabet {
 public:
  Alphabet() { index_.fill(-1); }
  explicit Alphabet(std::string symbols);

  std::size_t size() const { return symbols_.size(); }
  char at(std::size_t i) const { return symbols_[i]; }
  int index(char c) const { return index_[static_cast<unsigned char>(c)]; }
  bool contains(char c) const { return index(c) >= 0; }
  const std::string& symbols() const { return symbols_; }

  /// Lexicographic order with prefixes first; reflexive.
  bool lex_leq(std::string_view u, std::string_view v) const;

 private:
  std::string symbols_;
  std::array<int, 256> index_{};
};

struct Dfa {
  Alphabet alphabet;
  std::size_t states = 0;
  std::size_t start = 0;
  std::vector<bool> finals;
  std::vector<std::size_t> delta;  // delta[q * |alphabet| + a]
  /// Independence pairs (by symbol index), used by the trace module only.
  std::vector<std::pair<std::size_t, std::size_t>> indep;

  std::size_t next(std::size_t q, std::size_t a) const { return delta[q * alphabet.size() + a]; }
  bool accepts(std::string_view w) const;
};

Dfa parse_dfa(std::string_view text);
std::string format_dfa(const Dfa& A);

/// C_q(l) and bit sizes for 0 <= l <= n.
struct CensusTable {
  std::size_t n = 0;
  std::vector<std::vector<Nat>> C;  // C[l][q]
  std::vector<std::vector<std::size_t>> b;

  const Nat& at(std::size_t q, std::size_t l) const { return C[l][q]; }
};

CensusTable dfa_census(const Dfa& A, std::size_t n);

/// kappa = t + ceil(log2 n) trials for the single rank draw.
std::size_t dfa_kappa(std::size_t n, std::size_t t = 3);

Outcome<std::string> dfa_sample(const Dfa& A, const CensusTable& table, std::size_t n, CoinSource& src,
                                std::size_t kappa);
Outcome<std::string> dfa_sample(const Dfa& A, std::size_t n, CoinSource& src);

/// Members shorter than w plus same-length members lex-below or equal to w.
Nat dfa_rank(const Dfa& A, std::string_view w);

/// Rank inside the length-|w| slice.
Nat dfa_slice_rank(const Dfa& A, std::string_view w);

std::string dfa_unrank(const Dfa& A, const Nat& k);

bool dfa_language_finite(const Dfa& A);

/// Regular language as a framework WordStructure.
WordStructure dfa_structure(const Dfa& A);

}  // namespace rgen
