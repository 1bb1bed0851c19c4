#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rgen/cfl.hpp"
#include "rgen/framework.hpp"
#include "rgen/regular.hpp"

namespace rgen {

/// One-way pushdown automaton; every move either reads input or changes the stack by one symbol.
struct Pda {
  static constexpr int kEps = -1;

  struct Consume {
    std::size_t from, top, to;
    int symbol;  // input index or kEps
  };
  struct Push {
    std::size_t from, top, pushed, to;
  };
  struct Pop {
    std::size_t from, top, to;
  };

  std::size_t states = 0;
  std::size_t start = 0;
  std::vector<bool> finals;
  Alphabet input;
  std::vector<std::string> stack;  // stack symbol names
  std::size_t init = 0;            // bottom symbol Z0
  std::vector<Consume> consumes;
  std::vector<Push> pushes;
  std::vector<Pop> pops;
};

Pda parse_pda(std::string_view text);

struct SurfaceConfig {
  std::size_t state = 0;
  std::size_t top = 0;
  std::size_t pos = 1;  // 1..n+1
  bool operator==(const SurfaceConfig&) const = default;
};

std::vector<SurfaceConfig> surface_configs(const Pda& M, std::size_t n);

struct SliceGrammarStats {
  std::size_t configs = 0;
  std::size_t candidate_nonterminals = 0;  // 2 * configs^2
  std::size_t productive = 0;
  std::size_t reachable = 0;
  std::size_t productions = 0;
  std::size_t cnf_variables = 0;
  std::size_t cnf_productions = 0;
};

struct SliceGrammar {
  Grammar grammar;  // before normal form, with empty and unit productions
  CnfGrammar cnf;
  SliceGrammarStats stats;
};

SliceGrammar build_slice_grammar(const Pda& M, std::size_t n);

/// Accepting computations on w by direct simulation; SizeGuard past max_steps moves.
Nat pda_count_computations(const Pda& M, std::string_view w, std::size_t max_steps = 64);

/// Throws AmbiguityExceeded if a word of length <= max_n has more than D(n) computations.
void validate_pda_ambiguity(const Pda& M, const PolyBound& D, std::size_t max_n, std::size_t max_steps = 64);

Description<DerivationTree, std::string> pda_description(const Pda& M, std::size_t n, PolyBound D);

SampleReport<std::string> pda_sample(const Pda& M, std::size_t n, const PolyBound& D, CoinSource& src);
EstimateReport pda_census_estimate(const Pda& M, std::size_t n, const PolyBound& D, const Rat& epsilon,
                                   CoinSource& src);

}  // namespace rgen
