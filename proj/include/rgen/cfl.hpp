#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgen/framework.hpp"
#include "rgen/numutil.hpp"
#include "rgen/regular.hpp"

namespace rgen {

/// Context-free grammar with arbitrary right-hand sides.
struct Grammar {
  struct Symbol {
    bool terminal = false;
    std::size_t id = 0;  // variable index or terminal index
    bool operator==(const Symbol&) const = default;
  };
  struct Production {
    std::size_t lhs = 0;
    std::vector<Symbol> rhs;
    bool operator==(const Production&) const = default;
  };

  std::vector<std::string> vars;
  Alphabet terminals;
  std::size_t start = 0;
  std::vector<Production> prods;

  std::size_t var_index(const std::string& name) const;  // npos when absent
};

/// Grammar text: `var ...`, `term ...`, `start S`, then `A -> X Y | a` lines.
/// An empty alternative, `eps` or `ε` stands for the empty word.
Grammar parse_grammar(std::string_view text);

/// Chomsky normal form; productions listed per variable in a fixed order.
struct CnfGrammar {
  std::vector<std::string> vars;
  Alphabet terminals;
  std::size_t start = 0;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> binary;  // A -> B C, sorted by (B, C)
  std::vector<std::vector<std::size_t>> unary;                           // A -> a, sorted by a

  std::size_t production_count() const;
};

struct CnfOptions {
  /// Drop the empty word instead of raising EpsilonInLanguage.
  bool drop_epsilon = false;
};

CnfGrammar to_cnf(const Grammar& g, CnfOptions opt = {});
CnfGrammar parse_cnf(std::string_view text, CnfOptions opt = {});
std::string format_cnf(const CnfGrammar& g);

/// C[l][A] = number of derivation trees rooted at A with l leaves, 0 <= l <= n.
struct TreeCensus {
  std::size_t n = 0;
  std::vector<std::vector<Nat>> C;
  std::vector<std::vector<std::size_t>> b;

  const Nat& at(std::size_t A, std::size_t l) const { return C[l][A]; }
};

TreeCensus tree_census_table(const CnfGrammar& g, std::size_t n);
Nat tree_census(const CnfGrammar& g, std::size_t A, std::size_t n);

struct DerivationTree {
  std::size_t var = 0;
  std::size_t terminal = 0;            // meaningful for leaves
  std::vector<DerivationTree> kids;    // empty for a leaf, else two subtrees

  bool leaf() const { return kids.empty(); }
  std::size_t size() const;
  bool operator==(const DerivationTree&) const = default;
  bool operator<(const DerivationTree& o) const;
};

std::string tree_yield(const CnfGrammar& g, const DerivationTree& t);
/// Parenthesized form `(A (B a) (C b))`.
std::string format_tree(const CnfGrammar& g, const DerivationTree& t);

/// kappa = 3 + ceil(log2 n) + t.
std::size_t tree_kappa(std::size_t n, std::size_t t_confidence = 0);

/// Split located by the prefix-sum rule over P_A x {1..l-1}.
struct Split {
  std::size_t h = 0;
  std::size_t prod = 0;  // index into binary[A]
  bool operator==(const Split&) const = default;
};

Split find_split_linear(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, const Nat& r);
Split find_split_boustrophedon(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, const Nat& r);

Outcome<DerivationTree> random_tree(const CnfGrammar& g, const TreeCensus& c, std::size_t n, CoinSource& src,
                                    std::size_t kappa);
Outcome<DerivationTree> random_tree(const CnfGrammar& g, std::size_t n, CoinSource& src,
                                    std::size_t t_confidence = 0);

struct EarleyState {
  std::size_t dotted = 0;
  Nat weight;
  bool marked = false;
};

/// Chart S_{i,j}, stored at cells[i * (n + 1) + j].
struct EarleyChart {
  std::size_t n = 0;
  std::vector<std::vector<EarleyState>> cells;
  Nat count;

  const std::vector<EarleyState>& cell(std::size_t i, std::size_t j) const { return cells[i * (n + 1) + j]; }
};

EarleyChart earley_chart(const CnfGrammar& g, std::string_view x);

/// Number of derivation trees of x.
Nat earley_count(const CnfGrammar& g, std::string_view x);

/// Throws AmbiguityExceeded if some word of length <= max_n has more than D(n) trees.
void validate_cfl_ambiguity(const CnfGrammar& g, const PolyBound& D, std::size_t max_n);

/// Derivation trees described onto words: f = yield, d = earley_count.
Description<DerivationTree, std::string> cfl_description(const CnfGrammar& g, PolyBound D,
                                                         std::size_t t_confidence = 0);

}  // namespace rgen
