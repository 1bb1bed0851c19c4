#pragma once

// Brute-force reference implementations, written independently of the library algorithms.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "rgen/cfl.hpp"
#include "rgen/errors.hpp"
#include "rgen/numutil.hpp"
#include "rgen/pdagram.hpp"
#include "rgen/pseudobool.hpp"
#include "rgen/rankauto.hpp"
#include "rgen/regular.hpp"
#include "rgen/traces.hpp"

namespace oracle {

using rgen::Nat;
using rgen::Rat;

/// All words of length n in lexicographic order.
std::vector<std::string> words(const rgen::Alphabet& sigma, std::size_t n);

/// Members of length < |w| plus same-length members lex-below or equal to w.
Nat dfa_rank(const rgen::Dfa& A, const std::string& w);
Nat dfa_slice_count(const rgen::Dfa& A, std::size_t n);

/// Accepting paths, enumerated one by one.
Nat path_count(const rgen::Nfa& A, const std::string& w);
Nat nfa_slice_rank(const rgen::Nfa& A, const std::string& beta);

/// Leftmost derivations of w from the start symbol.
Nat leftmost_derivations(const rgen::CnfGrammar& g, const std::string& w);
/// Every derivation tree rooted at A with l leaves.
std::vector<rgen::DerivationTree> trees(const rgen::CnfGrammar& g, std::size_t A, std::size_t l);

/// Accepting computations by breadth-first search over configurations.
Nat pda_computations(const rgen::Pda& M, const std::string& w, std::size_t max_steps);

/// Equivalence class of x by closing under swaps of adjacent independent letters.
std::set<std::string> trace_class(const std::string& x, const rgen::IndepAlphabet& A);
Nat representatives(const rgen::Dfa& L, const std::string& x, const rgen::IndepAlphabet& A);

/// Permanent by Laplace expansion along the first row.
Nat permanent(const rgen::Matrix01& A);

/// Coefficient of the square-free monomial `mask` in msf(c) by Moebius inversion over {0,1}^n.
rgen::Int msf_coefficient(const rgen::Circuit& c, std::size_t n, std::uint64_t mask);

/// Average of the objective over all completions of the prefix.
Rat expectation(const rgen::PbProblem& p, const std::string& prefix);
rgen::Int optimum(const rgen::PbProblem& p);

/// Exact output law of a randomized procedure, by branching on every coin it reads.
template <class R>
struct Law {
  std::map<R, Rat> prob;
  Rat fail = 0;
  std::size_t leaves = 0;
};

template <class R>
Law<R> enumerate_tapes(const std::function<rgen::Outcome<R>(rgen::CoinSource&)>& run, std::size_t max_leaves = 1u << 22) {
  Law<R> law;
  std::vector<std::vector<bool>> todo{{}};
  while (!todo.empty()) {
    std::vector<bool> tape = std::move(todo.back());
    todo.pop_back();
    rgen::CoinSource src = rgen::CoinSource::from_tape(tape);
    try {
      rgen::Outcome<R> out = run(src);
      if (src.bits_consumed() != tape.size()) throw std::logic_error("run left tape bits unread");
      if (++law.leaves > max_leaves) throw std::runtime_error("tape enumeration too large");
      Rat w = rgen::rat(Nat(1), Nat(1) << static_cast<mp_bitcnt_t>(tape.size()));
      if (out)
        law.prob[*out] += w;
      else
        law.fail += w;
    } catch (const rgen::TapeExhausted&) {
      tape.push_back(true);
      todo.push_back(tape);
      tape.back() = false;
      todo.push_back(std::move(tape));
    }
  }
  return law;
}

/// Upper-tail p-value of Pearson's statistic against a uniform law on k cells.
double chi_square_uniform_p(const std::vector<std::size_t>& counts);

}  // namespace oracle
