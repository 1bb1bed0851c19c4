#include "rgen/framework.hpp"

#include <algorithm>

#include "rgen/textio.hpp"

namespace rgen {

Nat PolyBound::operator()(std::size_t n) const {
  Nat p;
  Nat base = static_cast<unsigned long>(n);
  mpz_pow_ui(p.get_mpz_t(), base.get_mpz_t(), exp);
  return k1 * p + k2;
}

std::size_t bound_at(const PolyBound& D, std::size_t n) {
  Nat v = D(n);
  if (v < 1) throw std::invalid_argument("ambiguity bound must be at least 1");
  return to_size(v, "ambiguity bound");
}

namespace {

// alpha * (num/den)^t < delta, exactly.
bool below(const Rat& alpha, const Nat& num, const Nat& den, std::size_t t, const Rat& delta) {
  Nat nt, dt;
  mpz_pow_ui(nt.get_mpz_t(), num.get_mpz_t(), t);
  mpz_pow_ui(dt.get_mpz_t(), den.get_mpz_t(), t);
  Nat lhs = alpha.get_num() * nt * delta.get_den();
  Nat rhs = delta.get_num() * dt * alpha.get_den();
  return lhs < rhs;
}

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

}  // namespace

std::size_t trial_budget(const Rat& alpha, const Rat& beta, const Rat& epsilon, const Rat& delta) {
  if (alpha <= 0 || beta <= 0 || delta <= 0) throw std::invalid_argument("trial_budget: alpha, beta, delta must be positive");
  Rat q = 1 - beta * epsilon;
  if (epsilon <= 0 || q <= 0) throw std::invalid_argument("trial_budget: need 0 < epsilon < 1/beta");
  q.canonicalize();
  const Nat& num = q.get_num();
  const Nat& den = q.get_den();
  if (below(alpha, num, den, 1, delta)) return 1;
  std::size_t lo = 1, hi = 2;
  while (!below(alpha, num, den, hi, delta)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (below(alpha, num, den, mid, delta))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::size_t describe_budget(std::size_t D) {
  std::size_t t = trial_budget(rat(4, 3), rat(3, 8), rat(Nat(1), Nat(static_cast<unsigned long>(D))), rat(1, 4));
  return ceil_div(t, D) * D;
}

std::size_t estimate_budget(std::size_t D, const Rat& epsilon) {
  Rat ratio = Rat(static_cast<unsigned long>(D)) / epsilon;
  std::size_t side = to_size(ceil_of(ratio), "estimate budget");
  std::size_t M = side * side;
  Rat e = epsilon / Rat(static_cast<unsigned long>(D));
  std::size_t t = trial_budget(rat(8, 3), rat(3, 4), e * e, rat(1, 4));
  return ceil_div(t, M) * M;
}

std::size_t amplify_attempts(const Rat& delta, const Rat& target) {
  if (delta <= 0 || delta >= 1 || target <= 0 || target >= 1)
    throw std::invalid_argument("amplify: probabilities must lie in (0,1)");
  std::size_t a = 1;
  Rat p = delta;
  while (p > target) {
    p *= delta;
    ++a;
  }
  return a;
}

std::size_t amplify_ras_repeats(const Rat& delta, const Rat& target) {
  if (delta <= 0 || delta >= rat(1, 2)) throw std::invalid_argument("amplify_ras: delta must lie in (0,1/2)");
  // Median fails with probability <= exp(-2 j delta^2) <= (1 + 2 delta^2)^-j.
  Rat x = 2 * delta * delta;
  Rat eps = x / (1 + x);
  std::size_t j = trial_budget(1, 1, eps, target);
  Rat base = Rat(static_cast<unsigned long>(ceil_log2_inv(target))) / (delta * delta);
  std::size_t M = std::max<std::size_t>(1, to_size(ceil_of(base), "repeat count"));
  return ceil_div(j, M) * M;
}

Outcome<Rat> median_of(std::vector<Outcome<Rat>> runs) {
  std::vector<Rat> ok;
  for (auto& r : runs)
    if (r) ok.push_back(*r);
  if (ok.empty()) return std::nullopt;
  std::sort(ok.begin(), ok.end());
  return ok[(ok.size() - 1) / 2];
}

Estimator amplify_ras_repeated(Estimator base, std::size_t repeats) {
  return [base = std::move(base), repeats](CoinSource& src) {
    std::vector<Outcome<Rat>> runs;
    runs.reserve(repeats);
    for (std::size_t i = 0; i < repeats; ++i) runs.push_back(base(src));
    return median_of(std::move(runs));
  };
}

Estimator amplify_ras(Estimator base, const Rat& delta, const Rat& target) {
  return amplify_ras_repeated(std::move(base), amplify_ras_repeats(delta, target));
}

namespace {

Nat product_factorizations(const WordStructure& A, const WordStructure& B, const std::string& q) {
  Nat d = 0;
  for (std::size_t k = 0; k <= q.size(); ++k)
    if (A.contains(q.substr(0, k)) && B.contains(q.substr(k))) ++d;
  return d;
}

Outcome<WordPair> sample_pair(const WordStructure& A, const WordStructure& B, std::size_t k, std::size_t rest,
                              CoinSource& src, std::size_t kappa) {
  for (std::size_t i = 0; i < kappa; ++i) {
    Outcome<std::string> s = A.sample(k, src);
    if (!s) continue;
    Outcome<std::string> t = B.sample(rest, src);
    if (!t) continue;
    return WordPair{std::move(*s), std::move(*t)};
  }
  return std::nullopt;
}

// Both factors succeed with probability > 9/16; retries push the failure below 1/8.
std::size_t pair_retries() { return trial_budget(1, rat(9, 16), 1, rat(1, 8)); }

}  // namespace

Description<WordPair, std::string> product(WordStructure A, WordStructure B) {
  auto census = [A, B](std::size_t n) {
    Nat c = 0;
    for (std::size_t k = 0; k <= n; ++k) c += A.census(k) * B.census(n - k);
    return c;
  };
  Description<WordPair, std::string> d;
  d.census_t = census;
  d.sampler = [A, B, census](std::size_t n, CoinSource& src) -> Outcome<WordPair> {
    Nat total = census(n);
    if (total == 0) throw EmptySlice();
    Outcome<Nat> r = gen_uniform(src, total, rat(1, 8));
    if (!r) return std::nullopt;
    Nat acc = 0;
    std::size_t k = 0;
    for (;; ++k) {
      acc += A.census(k) * B.census(n - k);
      if (acc >= *r) break;
    }
    return sample_pair(A, B, k, n - k, src, pair_retries());
  };
  d.project = [](const WordPair& p) { return p.first + p.second; };
  d.ambiguity = [A, B](const std::string& q) { return product_factorizations(A, B, q); };
  d.bound = PolyBound{1, 1, 1};
  return d;
}

Description<WordPair, std::string> product_fixed(WordStructure A, WordStructure B,
                                                 std::function<std::size_t(std::size_t)> left_size) {
  Description<WordPair, std::string> d;
  d.census_t = [A, B, left_size](std::size_t n) {
    std::size_t k = left_size(n);
    return k <= n ? Nat(A.census(k) * B.census(n - k)) : Nat(0);
  };
  d.sampler = [A, B, left_size](std::size_t n, CoinSource& src) -> Outcome<WordPair> {
    std::size_t k = left_size(n);
    if (k > n || A.census(k) * B.census(n - k) == 0) throw EmptySlice();
    return sample_pair(A, B, k, n - k, src, pair_retries());
  };
  d.project = [](const WordPair& p) { return p.first + p.second; };
  d.ambiguity = [A, B, left_size](const std::string& q) {
    std::size_t k = left_size(q.size());
    return Nat(k <= q.size() && A.contains(q.substr(0, k)) && B.contains(q.substr(k)) ? 1 : 0);
  };
  d.bound = PolyBound{0, 0, 1};
  return d;
}

Description<Tagged, std::string> union_of(WordStructure A, WordStructure B) {
  Description<Tagged, std::string> d;
  d.census_t = [A, B](std::size_t n) { return Nat(A.census(n) + B.census(n)); };
  d.sampler = [A, B](std::size_t n, CoinSource& src) -> Outcome<Tagged> {
    Nat cs = A.census(n);
    Nat total = cs + B.census(n);
    if (total == 0) throw EmptySlice();
    std::size_t ell = bit_size(total);
    // Each round succeeds with probability > 1/2 * 3/4.
    static const std::size_t kappa = trial_budget(1, rat(3, 8), 1, rat(1, 4));
    for (std::size_t i = 0; i < kappa; ++i) {
      Nat r = src.draw_bits(ell) + 1;
      if (r > total) continue;
      int side = r <= cs ? 0 : 1;
      Outcome<std::string> w = side == 0 ? A.sample(n, src) : B.sample(n, src);
      if (w) return Tagged{side, std::move(*w)};
    }
    return std::nullopt;
  };
  d.project = [](const Tagged& t) { return t.word; };
  d.ambiguity = [A, B](const std::string& w) { return Nat((A.contains(w) ? 1 : 0) + (B.contains(w) ? 1 : 0)); };
  d.bound = PolyBound{0, 0, 2};
  return d;
}

DnfFormula parse_dnf(std::string_view text) {
  auto lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty DNF file");
  const Line& head = lines[0];
  if (head.tok.size() != 2) throw ParseError("expected 'n m' header", head.no);
  DnfFormula f;
  f.vars = parse_count(head.tok[0], head.no);
  std::size_t m = parse_count(head.tok[1], head.no);
  if (lines.size() - 1 != m)
    throw ParseError("header announces " + std::to_string(m) + " clauses, found " + std::to_string(lines.size() - 1), head.no);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& ln = lines[i];
    std::vector<Literal> clause;
    for (std::size_t j = 0; j < ln.tok.size(); ++j) {
      long v = parse_long(ln.tok[j], ln.no);
      if (v == 0) {
        if (j + 1 != ln.tok.size()) throw ParseError("0 may only end a clause", ln.no);
        break;
      }
      std::size_t var = static_cast<std::size_t>(v < 0 ? -v : v);
      if (var > f.vars) throw ParseError("variable " + std::to_string(var) + " out of range", ln.no);
      Literal lit{var - 1, v > 0};
      bool dup = false;
      for (const auto& l : clause) {
        if (l.var != lit.var) continue;
        if (l.positive != lit.positive) throw ParseError("clause contains a variable and its negation", ln.no);
        dup = true;
      }
      if (!dup) clause.push_back(lit);
    }
    if (clause.empty()) throw ParseError("empty clause", ln.no);
    f.clauses.push_back(std::move(clause));
  }
  return f;
}

bool satisfies(const std::vector<Literal>& clause, const std::string& a) {
  for (const auto& l : clause)
    if ((a[l.var] == '1') != l.positive) return false;
  return true;
}

Description<DnfTerm, std::string> dnf_description(const DnfFormula& f) {
  if (f.clauses.empty()) throw EmptyLanguage("DNF formula has no clauses");
  for (const auto& c : f.clauses) {
    if (c.empty()) throw std::invalid_argument("empty DNF clause");
    for (const auto& l : c)
      if (l.var >= f.vars) throw std::invalid_argument("DNF literal out of range");
  }
  std::vector<Nat> weight;
  for (const auto& c : f.clauses) {
    Nat w;
    mpz_ui_pow_ui(w.get_mpz_t(), 2, f.vars - c.size());
    weight.push_back(w);
  }
  Nat total = 0;
  for (const auto& w : weight) total += w;

  Description<DnfTerm, std::string> d;
  d.census_t = [n0 = f.vars, total](std::size_t n) { return n == n0 ? total : Nat(0); };
  d.sampler = [f, weight, total](std::size_t n, CoinSource& src) -> Outcome<DnfTerm> {
    if (n != f.vars) throw EmptySlice();
    Outcome<Nat> r = gen_uniform(src, total, rat(1, 4));
    if (!r) return std::nullopt;
    std::size_t j = 0;
    Nat acc = weight[0];
    while (acc < *r) acc += weight[++j];
    std::string a(f.vars, '?');
    for (const auto& l : f.clauses[j]) a[l.var] = l.positive ? '1' : '0';
    for (char& c : a)
      if (c == '?') c = src.draw_bit() ? '1' : '0';
    return DnfTerm{j, std::move(a)};
  };
  d.project = [](const DnfTerm& t) { return t.assignment; };
  d.ambiguity = [f](const std::string& a) {
    Nat c = 0;
    for (const auto& cl : f.clauses)
      if (satisfies(cl, a)) ++c;
    return c;
  };
  d.bound = PolyBound{0, 0, Nat(static_cast<unsigned long>(f.clauses.size()))};
  return d;
}

}  // namespace rgen
