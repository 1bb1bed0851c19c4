#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rgen/numutil.hpp"
#include "rgen/regular.hpp"

namespace rgen {

/// Finite automaton as transition matrices; entries count parallel moves.
struct Nfa {
  Alphabet alphabet;
  std::size_t dim = 0;
  std::vector<std::vector<Nat>> M;  // M[a][i * dim + j]
  std::vector<Nat> pi;              // initial row vector
  std::vector<Nat> eta;             // final column vector
  std::size_t ambiguity = 1;
};

Nfa parse_nfa(std::string_view text);
Nfa nfa_from_dfa(const Dfa& A);

/// pi * M_{w1} ... M_{wn} * eta.
Nat path_count(const Nfa& A, std::string_view w);

/// Polynomial sum_k a[k] x^k with a[0] = 0.
struct QPoly {
  std::vector<Rat> a;

  std::size_t degree() const { return a.empty() ? 0 : a.size() - 1; }
  Rat operator()(const Rat& x) const;
};

/// The degree-d polynomial with q(0) = 0 and q(1) = ... = q(d) = 1.
QPoly build_q(std::size_t d);

/// Sum over all w in Sigma^n of path_count(w)^k, through the k-fold Kronecker lift.
Nat lifted_power_sum(const Nfa& A, std::size_t n, std::size_t k, std::size_t ceiling = 1u << 16);

/// Throws AmbiguityExceeded if some word of length n has more than
/// A.ambiguity accepting paths.
void validate_nfa_ambiguity(const Nfa& A, std::size_t n, std::size_t ceiling = 1u << 16);

/// #{gamma in Sigma^n : gamma <=lex beta, gamma accepted}, n = |beta|.
Nat nfa_rank_slice(const Nfa& A, std::string_view beta, std::size_t ceiling = 1u << 16, bool validate = true);

/// Number of accepted words of length n.
Nat nfa_slice_census(const Nfa& A, std::size_t n, std::size_t ceiling = 1u << 16, bool validate = true);

/// Rank over all lengths: accepted words shorter than w plus the slice rank.
Nat nfa_rank(const Nfa& A, std::string_view w, std::size_t ceiling = 1u << 16);

/// Inverse of nfa_rank; RankOutOfRange when fewer than k words have length <= max_len.
std::string nfa_unrank(const Nfa& A, const Nat& k, std::size_t max_len = 64, std::size_t ceiling = 1u << 16);

using SliceRank = std::function<Nat(std::string_view)>;

/// Lex-least word of length n whose slice rank reaches k, by bisection over Sigma^n.
std::string unrank_by_bisection(const SliceRank& rank, const Alphabet& sigma, std::size_t n, const Nat& k);

/// Uniform word of the slice: k from gen_uniform, then bisection.
Outcome<std::string> rank_sampler(const SliceRank& rank, const Nat& census, const Alphabet& sigma, std::size_t n,
                                  CoinSource& src, const Rat& delta = Rat(1, 4));

}  // namespace rgen
