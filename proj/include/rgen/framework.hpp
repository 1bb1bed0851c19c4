#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rgen/errors.hpp"
#include "rgen/numutil.hpp"

namespace rgen {

template <class T>
using Sampler = std::function<Outcome<T>(std::size_t, CoinSource&)>;

/// D(n) = k1 * n^exp + k2.
struct PolyBound {
  Nat k1 = 1;
  unsigned exp = 0;
  Nat k2 = 0;

  Nat operator()(std::size_t n) const;
};

/// A structure T mapped onto S by a size-preserving surjection.
template <class T, class S>
struct Description {
  Sampler<T> sampler;
  std::function<S(const T&)> project;
  std::function<Nat(const S&)> ambiguity;
  PolyBound bound;
  std::function<Nat(std::size_t)> census_t;  // may be empty
};

template <class S>
struct SampleReport {
  Outcome<S> value;
  std::size_t trials_used = 0;
  std::size_t trials_max = 0;
  std::uint64_t bits_used = 0;
};

struct EstimateReport {
  Outcome<Rat> value;
  std::size_t trials_used = 0;
  std::size_t successes = 0;
  std::uint64_t bits_used = 0;
};

struct CountReport {
  Outcome<Nat> value;
  std::size_t trials_used = 0;
  std::uint64_t bits_used = 0;
};

/// Smallest t >= 1 with alpha * (1 - beta*epsilon)^t < delta.
std::size_t trial_budget(const Rat& alpha, const Rat& beta, const Rat& epsilon, const Rat& delta);

/// Iteration budget of sample_described for ambiguity bound D.
std::size_t describe_budget(std::size_t D);

/// Number of draws of estimate_census for bound D and tolerance epsilon.
std::size_t estimate_budget(std::size_t D, const Rat& epsilon);

/// Smallest a >= 1 with delta^a <= target.
std::size_t amplify_attempts(const Rat& delta, const Rat& target);

/// Repeats used by amplify_ras for a (1/2 + delta)-correct base.
std::size_t amplify_ras_repeats(const Rat& delta, const Rat& target);

std::size_t bound_at(const PolyBound& D, std::size_t n);

template <class T, class S>
SampleReport<S> sample_described(const Description<T, S>& desc, std::size_t n, CoinSource& src,
                                 std::optional<std::size_t> trials = std::nullopt) {
  if (desc.census_t && desc.census_t(n) == 0) throw EmptySlice();
  std::size_t D = bound_at(desc.bound, n);
  Nat m = lcm_upto(D);
  std::size_t ell = bit_size(m);
  SampleReport<S> rep;
  rep.trials_max = trials ? *trials : describe_budget(D);
  std::uint64_t bits0 = src.bits_consumed();
  for (std::size_t i = 0; i < rep.trials_max; ++i) {
    ++rep.trials_used;
    Outcome<T> t = desc.sampler(n, src);
    if (!t) continue;
    S s = desc.project(*t);
    Nat d = desc.ambiguity(s);
    if (d < 1 || d > D) throw AmbiguityExceeded("ambiguity " + d.get_str() + " outside [1, " + std::to_string(D) + "]");
    Nat r = src.draw_bits(ell) + 1;
    if (r * d <= m) {
      rep.value = std::move(s);
      break;
    }
  }
  rep.bits_used = src.bits_consumed() - bits0;
  return rep;
}

template <class T, class S>
EstimateReport estimate_census(const Description<T, S>& desc, std::size_t n, const Rat& epsilon,
                               CoinSource& src, std::optional<std::size_t> trials = std::nullopt) {
  if (!desc.census_t) throw std::invalid_argument("estimate_census needs census_t");
  if (epsilon <= 0 || epsilon >= 1) throw std::invalid_argument("epsilon must lie in (0,1)");
  Nat CT = desc.census_t(n);
  if (CT == 0) throw EmptySlice();
  std::size_t D = bound_at(desc.bound, n);
  EstimateReport rep;
  std::size_t N = trials ? *trials : estimate_budget(D, epsilon);
  std::uint64_t bits0 = src.bits_consumed();
  Rat sum = 0;
  for (std::size_t i = 0; i < N; ++i) {
    ++rep.trials_used;
    Outcome<T> t = desc.sampler(n, src);
    if (!t) continue;
    Nat d = desc.ambiguity(desc.project(*t));
    if (d < 1 || d > D) throw AmbiguityExceeded("ambiguity " + d.get_str() + " outside [1, " + std::to_string(D) + "]");
    sum += rat(Nat(1), d);
    ++rep.successes;
  }
  rep.bits_used = src.bits_consumed() - bits0;
  if (rep.successes > 0) {
    Rat est = sum * Rat(CT) / Rat(static_cast<unsigned long>(rep.successes));
    est.canonicalize();
    rep.value = est;
  }
  return rep;
}

template <class T, class S>
CountReport exact_count(const Description<T, S>& desc, std::size_t n, CoinSource& src, const Nat& ceiling,
                        std::optional<std::size_t> trials = std::nullopt) {
  if (!desc.census_t) throw std::invalid_argument("exact_count needs census_t");
  Nat CT = desc.census_t(n);
  if (CT > ceiling) throw CeilingExceeded("census of T is " + CT.get_str() + ", above ceiling " + ceiling.get_str());
  CountReport rep;
  if (CT == 0) {
    rep.value = Nat(0);
    return rep;
  }
  Rat eps = rat(Nat(1), Nat(3 * CT));
  EstimateReport e = estimate_census(desc, n, eps, src, trials);
  rep.trials_used = e.trials_used;
  rep.bits_used = e.bits_used;
  if (e.value) rep.value = round_of(*e.value);
  return rep;
}

template <class S>
Sampler<S> amplify_urg(Sampler<S> base, const Rat& delta, const Rat& target) {
  std::size_t attempts = amplify_attempts(delta, target);
  return [base = std::move(base), attempts](std::size_t n, CoinSource& src) -> Outcome<S> {
    for (std::size_t i = 0; i < attempts; ++i)
      if (Outcome<S> s = base(n, src)) return s;
    return std::nullopt;
  };
}

/// Lower median of the non-failed results.
Outcome<Rat> median_of(std::vector<Outcome<Rat>> runs);

using Estimator = std::function<Outcome<Rat>(CoinSource&)>;

Estimator amplify_ras_repeated(Estimator base, std::size_t repeats);
Estimator amplify_ras(Estimator base, const Rat& delta, const Rat& target);

/// A language given by a sampler for each length, membership, and census.
struct WordStructure {
  Sampler<std::string> sample;
  std::function<bool(const std::string&)> contains;
  std::function<Nat(std::size_t)> census;
};

using WordPair = std::pair<std::string, std::string>;

struct Tagged {
  int side = 0;  // 0 for the first operand, 1 for the second
  std::string word;
  auto operator<=>(const Tagged&) const = default;
};

/// Concatenation S.T; a length-n sample splits as k + (n-k) with
/// probability C_S(k) C_T(n-k) / C_P(n).
Description<WordPair, std::string> product(WordStructure A, WordStructure B);

/// Concatenation with the left factor always of length left_size(n).
Description<WordPair, std::string> product_fixed(WordStructure A, WordStructure B,
                                                 std::function<std::size_t(std::size_t)> left_size);

Description<Tagged, std::string> union_of(WordStructure A, WordStructure B);

/// Word sampler of a description, wrapped as a WordStructure.
template <class T>
WordStructure structure_of(Description<T, std::string> desc, std::function<bool(const std::string&)> contains,
                           std::function<Nat(std::size_t)> census) {
  WordStructure w;
  w.sample = [desc = std::move(desc)](std::size_t n, CoinSource& src) {
    return sample_described(desc, n, src).value;
  };
  w.contains = std::move(contains);
  w.census = std::move(census);
  return w;
}

struct Literal {
  std::size_t var = 0;  // 0-based
  bool positive = true;
};

struct DnfFormula {
  std::size_t vars = 0;
  std::vector<std::vector<Literal>> clauses;
};

struct DnfTerm {
  std::size_t clause = 0;
  std::string assignment;  // '0'/'1' per variable
};

DnfFormula parse_dnf(std::string_view text);
bool satisfies(const std::vector<Literal>& clause, const std::string& assignment);
Description<DnfTerm, std::string> dnf_description(const DnfFormula& f);

}  // namespace rgen
