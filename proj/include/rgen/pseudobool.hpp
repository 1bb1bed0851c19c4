#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rgen/framework.hpp"
#include "rgen/numutil.hpp"

namespace rgen {

using Int = mpz_class;

/// Arithmetic circuit over constants -1, 0, 1; node i only reads nodes before it.
struct Circuit {
  enum class Kind { Input, Const, Add, Mul };
  struct Node {
    Kind kind = Kind::Const;
    std::size_t var = 0;  // 0-based, for inputs
    int value = 0;        // for constants
    std::vector<std::size_t> args;
  };

  std::size_t inputs = 0;
  std::vector<Node> nodes;
  std::size_t output = 0;

  std::size_t input(std::size_t var);
  std::size_t constant(int v);
  std::size_t add(std::vector<std::size_t> args);
  std::size_t mul(std::vector<std::size_t> args);

  std::size_t size() const { return nodes.size(); }
  std::size_t depth() const;
};

/// Lines `id in k`, `id const v`, `id add ids...`, `id mul ids...`, then `out id`. Inputs are 1-based.
Circuit parse_circuit(std::string_view text);
std::string format_circuit(const Circuit& c);

Rat eval_circuit(const Circuit& c, const std::vector<Rat>& point);
Int eval_circuit_bits(const Circuit& c, std::string_view bits);

/// Coefficient of a monomial (exponent per variable) in a circuit whose polynomial is square-free.
Int msf_coefficient(const Circuit& c, const std::vector<unsigned>& monomial);

/// Square-free polynomial: variable bitmask -> coefficient.
using Multilinear = std::map<std::uint64_t, Int>;

/// Expansion of the circuit with every x^k (k >= 1) replaced by x; SizeGuard past max_terms.
Multilinear expand_msf(const Circuit& c, std::size_t max_terms = 1u << 20);
Circuit circuit_from_multilinear(const Multilinear& p, std::size_t vars);

struct Matrix01 {
  std::size_t n = 0;
  std::vector<std::uint8_t> a;  // row-major

  int at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

Matrix01 parse_matrix(std::string_view text);

/// Circuit for prod_i sum_j a_ij x_j.
Circuit perm_circuit(const Matrix01& A);

enum class PermMethod { Coefficient, Fraction, Bruteforce };

Nat permanent(const Matrix01& A, PermMethod method, std::size_t max_n = 10);

enum class Goal { Max, Min };

struct PbProblem {
  std::size_t n = 0;
  Circuit objective;  // multilinear, by contract
  Goal goal = Goal::Max;
};

/// Objective at the prefix bits with the remaining variables at 1/2.
Rat cond_expectation(const PbProblem& p, std::string_view prefix);

/// Fixes variables one at a time; ties choose 0.
std::string derandomize(const PbProblem& p);

struct SearchReport {
  std::string assignment;
  Int value;
  std::size_t draws = 0;
};

/// N = ceil(ceil(log2(1/delta)) / (2 epsilon^2)).
std::size_t random_search_draws(const Rat& epsilon, const Rat& delta);

SearchReport random_search(const PbProblem& p, const Rat& epsilon, const Rat& delta, CoinSource& src);

struct LocalSearchReport {
  std::string assignment;
  Int value;
  std::vector<Int> trajectory;  // objective after each accepted move, starting value first
};

/// First improvement over flip sets of size <= h, scanned in lexicographic order of sorted index lists.
LocalSearchReport local_search(const PbProblem& p, std::size_t h, std::string start);

LocalSearchReport eg_solve(const PbProblem& p, std::size_t h);

struct Clause {
  std::vector<Literal> lits;
};

/// Header `p cnf n m` or `n m`, then clauses of signed 1-based literals, each ended by 0.
std::vector<Clause> parse_cnf_instance(std::string_view text, std::size_t& vars);

/// Header `n m`, then `u v` edges with 1-based vertices.
std::vector<std::pair<std::size_t, std::size_t>> parse_graph(std::string_view text, std::size_t& vertices);

/// Sum over clauses of 1 - prod(1 - literal).
PbProblem max_sat_problem(std::size_t vars, const std::vector<Clause>& clauses);

/// Sum over edges of x_u + x_v - 2 x_u x_v.
PbProblem max_cut_problem(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges);

}  // namespace rgen
