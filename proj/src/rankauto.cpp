#include "rgen/rankauto.hpp"

#include <string>

#include "rgen/errors.hpp"
#include "rgen/textio.hpp"

namespace rgen {

Nfa parse_nfa(std::string_view text) {
  Nfa A;
  bool have_states = false, have_alpha = false, have_start = false;
  auto need = [&](const Line& ln) {
    if (!have_states || !have_alpha) throw ParseError("'states' and 'alphabet' must precede '" + ln.tok[0] + "'", ln.no);
    if (A.M.empty()) {
      A.M.assign(A.alphabet.size(), std::vector<Nat>(A.dim * A.dim, 0));
      A.pi.assign(A.dim, 0);
      A.eta.assign(A.dim, 0);
    }
  };
  auto state = [&](const std::string& t, std::size_t no) {
    std::size_t q = parse_count(t, no);
    if (q >= A.dim) throw ParseError("state " + t + " out of range", no);
    return q;
  };
  for (const Line& ln : tokenize(text)) {
    const std::string& key = ln.tok[0];
    if (key == "states") {
      if (ln.tok.size() != 2) throw ParseError("usage: states k", ln.no);
      A.dim = parse_count(ln.tok[1], ln.no);
      if (A.dim == 0) throw ParseError("need at least one state", ln.no);
      have_states = true;
    } else if (key == "alphabet") {
      std::string s;
      for (std::size_t i = 1; i < ln.tok.size(); ++i) s.push_back(parse_symbol(ln.tok[i], ln.no));
      try {
        A.alphabet = Alphabet(s);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), ln.no);
      }
      have_alpha = true;
    } else if (key == "start") {
      need(ln);
      for (std::size_t i = 1; i < ln.tok.size(); ++i) A.pi[state(ln.tok[i], ln.no)] = 1;
      have_start = true;
    } else if (key == "finals") {
      need(ln);
      for (std::size_t i = 1; i < ln.tok.size(); ++i) A.eta[state(ln.tok[i], ln.no)] = 1;
    } else if (key == "trans") {
      need(ln);
      if (ln.tok.size() != 4) throw ParseError("usage: trans q symbol q'", ln.no);
      std::size_t q = state(ln.tok[1], ln.no);
      char c = parse_symbol(ln.tok[2], ln.no);
      if (!A.alphabet.contains(c)) throw ParseError("symbol '" + ln.tok[2] + "' not in alphabet", ln.no);
      std::size_t p = state(ln.tok[3], ln.no);
      A.M[static_cast<std::size_t>(A.alphabet.index(c))][q * A.dim + p] += 1;
    } else if (key == "ambiguity") {
      if (ln.tok.size() != 2) throw ParseError("usage: ambiguity d", ln.no);
      A.ambiguity = parse_count(ln.tok[1], ln.no);
      if (A.ambiguity == 0) throw ParseError("ambiguity bound must be at least 1", ln.no);
    } else {
      throw ParseError("unknown keyword '" + key + "'", ln.no);
    }
  }
  if (!have_states || !have_alpha || !have_start) throw ParseError("missing states, alphabet or start");
  return A;
}

Nfa nfa_from_dfa(const Dfa& D) {
  Nfa A;
  A.alphabet = D.alphabet;
  A.dim = D.states;
  A.M.assign(D.alphabet.size(), std::vector<Nat>(A.dim * A.dim, 0));
  for (std::size_t q = 0; q < D.states; ++q)
    for (std::size_t a = 0; a < D.alphabet.size(); ++a) A.M[a][q * A.dim + D.next(q, a)] = 1;
  A.pi.assign(A.dim, 0);
  A.pi[D.start] = 1;
  A.eta.assign(A.dim, 0);
  for (std::size_t q = 0; q < D.states; ++q) A.eta[q] = D.finals[q] ? 1 : 0;
  A.ambiguity = 1;
  return A;
}

namespace {

std::size_t symbol_of(const Nfa& A, char c) {
  int a = A.alphabet.index(c);
  if (a < 0) throw std::invalid_argument(std::string("symbol not in alphabet: ") + c);
  return static_cast<std::size_t>(a);
}

using Vec = std::vector<Nat>;

Vec row_times(const Vec& v, const std::vector<Nat>& M, std::size_t dim) {
  Vec out(dim, 0);
  for (std::size_t i = 0; i < dim; ++i) {
    if (v[i] == 0) continue;
    for (std::size_t j = 0; j < dim; ++j)
      if (M[i * dim + j] != 0) out[j] += v[i] * M[i * dim + j];
  }
  return out;
}

// Vectors indexed by k-tuples of states; the first coordinate is most significant.
struct Lift {
  std::size_t dim, k, size;

  Lift(std::size_t d, std::size_t kk, std::size_t ceiling) : dim(d), k(kk), size(1) {
    for (std::size_t i = 0; i < k; ++i) {
      if (size > ceiling / dim) throw SizeGuard("Kronecker lift of dimension " + std::to_string(dim) + "^" + std::to_string(k) + " exceeds ceiling");
      size *= dim;
    }
  }

  Vec power(const Vec& v) const {
    Vec out(size, 1);
    for (std::size_t idx = 0; idx < size; ++idx) {
      std::size_t r = idx;
      for (std::size_t l = 0; l < k; ++l) {
        out[idx] *= v[r % dim];
        r /= dim;
      }
    }
    return out;
  }

  // v * M^{(x)k} if row, else M^{(x)k} * v; one tensor axis at a time.
  Vec apply(const Vec& v, const std::vector<Nat>& M, bool row) const {
    Vec cur = v;
    std::size_t stride = 1;
    for (std::size_t l = 0; l < k; ++l, stride *= dim) {
      Vec next(size, 0);
      for (std::size_t idx = 0; idx < size; ++idx) {
        if (cur[idx] == 0) continue;
        std::size_t digit = (idx / stride) % dim;
        std::size_t base = idx - digit * stride;
        for (std::size_t j = 0; j < dim; ++j) {
          const Nat& m = row ? M[digit * dim + j] : M[j * dim + digit];
          if (m != 0) next[base + j * stride] += cur[idx] * m;
        }
      }
      cur.swap(next);
    }
    return cur;
  }

  static Nat dot(const Vec& a, const Vec& b) {
    Nat s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (a[i] != 0 && b[i] != 0) s += a[i] * b[i];
    return s;
  }
};

// u_m = (sum_sigma M_sigma^{(x)k})^m eta^{(x)k}, m = 0..n.
std::vector<Vec> suffix_vectors(const Nfa& A, const Lift& L, std::size_t n) {
  std::vector<Vec> u;
  u.push_back(L.power(A.eta));
  for (std::size_t m = 1; m <= n; ++m) {
    Vec next(L.size, 0);
    for (const auto& M : A.M) {
      Vec part = L.apply(u.back(), M, false);
      for (std::size_t i = 0; i < L.size; ++i) next[i] += part[i];
    }
    u.push_back(std::move(next));
  }
  return u;
}

// Sum of path_count(gamma)^k over gamma <=lex beta of length |beta|.
Nat lifted_rank_sum(const Nfa& A, std::string_view beta, std::size_t k, std::size_t ceiling) {
  Lift L(A.dim, k, ceiling);
  std::size_t n = beta.size();
  std::vector<Vec> u = suffix_vectors(A, L, n);
  Vec v = L.power(A.pi);
  Nat total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t bi = symbol_of(A, beta[i]);
    for (std::size_t c = 0; c < bi; ++c) total += Lift::dot(L.apply(v, A.M[c], true), u[n - i - 1]);
    v = L.apply(v, A.M[bi], true);
  }
  return total + Lift::dot(v, u[0]);
}

// Coefficients of prod_{i in roots} (x - i).
std::vector<Nat> falling_product(std::size_t count) {
  std::vector<Nat> p{1};
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<Nat> next(p.size() + 1, 0);
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j + 1] += p[j];
      next[j] -= p[j] * static_cast<unsigned long>(i);
    }
    p.swap(next);
  }
  return p;
}

Nat combine(const std::vector<Rat>& coef, const std::vector<Nat>& sums) {
  Rat r = 0;
  for (std::size_t k = 1; k < coef.size(); ++k)
    if (coef[k] != 0) r += coef[k] * Rat(sums[k]);
  r.canonicalize();
  if (r.get_den() != 1) throw std::logic_error("non-integral lifted sum");
  return r.get_num();
}

}  // namespace

Nat path_count(const Nfa& A, std::string_view w) {
  Vec v = A.pi;
  for (char c : w) v = row_times(v, A.M[symbol_of(A, c)], A.dim);
  Nat s = 0;
  for (std::size_t i = 0; i < A.dim; ++i) s += v[i] * A.eta[i];
  return s;
}

Rat QPoly::operator()(const Rat& x) const {
  Rat r = 0;
  for (std::size_t k = a.size(); k-- > 0;) r = r * x + a[k];
  r.canonicalize();
  return r;
}

QPoly build_q(std::size_t d) {
  if (d < 1) throw std::invalid_argument("build_q: d must be at least 1");
  // q(x) = 1 - prod_{i=1..d} (1 - x/i)
  std::vector<Rat> p{Rat(1)};
  for (std::size_t i = 1; i <= d; ++i) {
    std::vector<Rat> next(p.size() + 1, Rat(0));
    Rat inv = rat(1, static_cast<long>(i));
    for (std::size_t j = 0; j < p.size(); ++j) {
      next[j] += p[j];
      next[j + 1] -= p[j] * inv;
    }
    p.swap(next);
  }
  QPoly q;
  q.a.resize(p.size());
  for (std::size_t j = 0; j < p.size(); ++j) {
    q.a[j] = -p[j];
    q.a[j].canonicalize();
  }
  q.a[0] += 1;
  return q;
}

Nat lifted_power_sum(const Nfa& A, std::size_t n, std::size_t k, std::size_t ceiling) {
  Lift L(A.dim, k, ceiling);
  std::vector<Vec> u = suffix_vectors(A, L, n);
  return Lift::dot(L.power(A.pi), u[n]);
}

void validate_nfa_ambiguity(const Nfa& A, std::size_t n, std::size_t ceiling) {
  // sum_w binom(pc(w), d+1) vanishes iff every pc(w) <= d.
  std::size_t e = A.ambiguity + 1;
  std::vector<Nat> poly = falling_product(e);
  Nat fact = 1;
  for (std::size_t i = 2; i <= e; ++i) fact *= static_cast<unsigned long>(i);
  std::vector<Rat> coef(poly.size());
  for (std::size_t k = 0; k < poly.size(); ++k) coef[k] = rat(poly[k], fact);
  std::vector<Nat> sums(e + 1, 0);
  for (std::size_t k = 1; k <= e; ++k) sums[k] = lifted_power_sum(A, n, k, ceiling);
  Nat excess = combine(coef, sums);
  if (excess != 0)
    throw AmbiguityExceeded("some word of length " + std::to_string(n) + " has more than " +
                            std::to_string(A.ambiguity) + " accepting paths");
}

Nat nfa_rank_slice(const Nfa& A, std::string_view beta, std::size_t ceiling, bool validate) {
  if (validate) validate_nfa_ambiguity(A, beta.size(), ceiling);
  QPoly q = build_q(A.ambiguity);
  std::vector<Nat> sums(q.a.size(), 0);
  for (std::size_t k = 1; k < q.a.size(); ++k)
    if (q.a[k] != 0) sums[k] = lifted_rank_sum(A, beta, k, ceiling);
  return combine(q.a, sums);
}

Nat nfa_slice_census(const Nfa& A, std::size_t n, std::size_t ceiling, bool validate) {
  if (validate) validate_nfa_ambiguity(A, n, ceiling);
  QPoly q = build_q(A.ambiguity);
  std::vector<Nat> sums(q.a.size(), 0);
  for (std::size_t k = 1; k < q.a.size(); ++k)
    if (q.a[k] != 0) sums[k] = lifted_power_sum(A, n, k, ceiling);
  return combine(q.a, sums);
}

Nat nfa_rank(const Nfa& A, std::string_view w, std::size_t ceiling) {
  Nat r = 0;
  for (std::size_t l = 0; l < w.size(); ++l) r += nfa_slice_census(A, l, ceiling);
  return r + nfa_rank_slice(A, w, ceiling);
}

namespace {

std::string word_at(const Alphabet& sigma, std::size_t n, Nat x) {
  std::string w(n, sigma.at(0));
  Nat base = static_cast<unsigned long>(sigma.size());
  for (std::size_t i = n; i-- > 0;) {
    Nat digit = x % base;
    w[i] = sigma.at(digit.get_ui());
    x /= base;
  }
  return w;
}

}  // namespace

std::string unrank_by_bisection(const SliceRank& rank, const Alphabet& sigma, std::size_t n, const Nat& k) {
  if (sigma.size() == 0) throw std::invalid_argument("empty alphabet");
  Nat hi;
  mpz_ui_pow_ui(hi.get_mpz_t(), sigma.size(), n);
  hi -= 1;
  if (k < 1 || rank(word_at(sigma, n, hi)) < k) throw RankOutOfRange("slice rank " + k.get_str() + " out of range");
  Nat lo = 0;
  while (lo < hi) {
    Nat mid = (lo + hi) / 2;
    if (rank(word_at(sigma, n, mid)) >= k)
      hi = mid;
    else
      lo = mid + 1;
  }
  return word_at(sigma, n, lo);
}

std::string nfa_unrank(const Nfa& A, const Nat& k, std::size_t max_len, std::size_t ceiling) {
  if (k < 1) throw RankOutOfRange("rank must be at least 1");
  Nat rest = k;
  for (std::size_t n = 0; n <= max_len; ++n) {
    Nat c = nfa_slice_census(A, n, ceiling);
    if (rest <= c) {
      if (n == 0) return "";
      return unrank_by_bisection([&](std::string_view w) { return nfa_rank_slice(A, w, ceiling, false); }, A.alphabet, n,
                                 rest);
    }
    rest -= c;
  }
  throw RankOutOfRange("rank " + k.get_str() + " beyond words of length <= " + std::to_string(max_len));
}

Outcome<std::string> rank_sampler(const SliceRank& rank, const Nat& census, const Alphabet& sigma, std::size_t n,
                                  CoinSource& src, const Rat& delta) {
  if (census == 0) throw EmptySlice();
  Outcome<Nat> k = gen_uniform(src, census, delta);
  if (!k) return std::nullopt;
  return unrank_by_bisection(rank, sigma, n, *k);
}

}  // namespace rgen
