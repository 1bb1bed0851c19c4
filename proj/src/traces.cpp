#include "rgen/traces.hpp"

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

#include "rgen/errors.hpp"

namespace rgen {

IndepAlphabet::IndepAlphabet(Alphabet sigma, const std::vector<std::pair<std::size_t, std::size_t>>& pairs)
    : sigma_(std::move(sigma)), I_(sigma_.size() * sigma_.size(), false) {
  std::size_t k = sigma_.size();
  for (auto [a, b] : pairs) {
    if (a >= k || b >= k) throw std::invalid_argument("independence pair out of range");
    if (a == b) throw std::invalid_argument("independence relation must be irreflexive");
    I_[a * k + b] = I_[b * k + a] = true;
  }
}

bool IndepAlphabet::transitive() const {
  std::size_t k = sigma_.size();
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = 0; b < k; ++b)
      for (std::size_t c = 0; c < k; ++c)
        if (a != c && independent(a, b) && independent(b, c) && !independent(a, c)) return false;
  return true;
}

namespace {

std::vector<std::size_t> indices(std::string_view x, const Alphabet& sigma) {
  std::vector<std::size_t> out;
  for (char c : x) {
    int a = sigma.index(c);
    if (a < 0) throw std::invalid_argument(std::string("symbol not in alphabet: ") + c);
    out.push_back(static_cast<std::size_t>(a));
  }
  return out;
}

// Occurrence structure of x: a down-set is a vector of per-letter counts.
struct Occurrences {
  std::size_t k;
  std::vector<std::vector<std::size_t>> pos;     // pos[a] = positions of letter a
  std::vector<std::vector<std::size_t>> before;  // before[p][e] = e-occurrences before p

  Occurrences(const std::vector<std::size_t>& w, std::size_t kk) : k(kk), pos(kk) {
    std::vector<std::size_t> seen(k, 0);
    for (std::size_t p = 0; p < w.size(); ++p) {
      before.push_back(seen);
      pos[w[p]].push_back(p);
      ++seen[w[p]];
    }
  }

  // Whether the next occurrence of a is minimal among the ones not yet taken.
  bool enabled(const std::string& counts, std::size_t a, const IndepAlphabet& A) const {
    std::size_t ca = static_cast<unsigned char>(counts[a]);
    if (ca >= pos[a].size()) return false;
    const auto& b = before[pos[a][ca]];
    for (std::size_t e = 0; e < k; ++e)
      if (e != a && !A.independent(a, e) && static_cast<std::size_t>(static_cast<unsigned char>(counts[e])) < b[e])
        return false;
    return true;
  }
};

void guard(std::size_t n, std::size_t limit) {
  if (n > limit) throw SizeGuard("word length " + std::to_string(n) + " exceeds limit " + std::to_string(limit));
  if (n > 255) throw SizeGuard("word length above 255");
}

}  // namespace

std::string normal_form(std::string_view x, const IndepAlphabet& A) {
  std::vector<std::size_t> w = indices(x, A.sigma());
  std::vector<bool> used(w.size(), false);
  std::string out;
  for (std::size_t step = 0; step < w.size(); ++step) {
    std::size_t best = w.size();
    // A remaining position is minimal if every remaining earlier letter is independent of it.
    for (std::size_t p = 0; p < w.size(); ++p) {
      if (used[p]) continue;
      bool minimal = true;
      for (std::size_t r = 0; r < p && minimal; ++r)
        if (!used[r] && (w[r] == w[p] || !A.independent(w[r], w[p]))) minimal = false;
      if (minimal && (best == w.size() || w[p] < w[best])) best = p;
    }
    used[best] = true;
    out.push_back(A.sigma().at(w[best]));
  }
  return out;
}

Nat class_size(std::string_view x, const IndepAlphabet& A, std::size_t limit) {
  guard(x.size(), limit);
  std::vector<std::size_t> w = indices(x, A.sigma());
  std::size_t k = A.sigma().size();
  Occurrences occ(w, k);
  std::map<std::string, Nat> layer{{std::string(k, '\0'), Nat(1)}};
  for (std::size_t step = 0; step < w.size(); ++step) {
    std::map<std::string, Nat> next;
    for (const auto& [counts, ways] : layer)
      for (std::size_t a = 0; a < k; ++a)
        if (occ.enabled(counts, a, A)) {
          std::string c = counts;
          ++c[a];
          next[c] += ways;
        }
    layer.swap(next);
  }
  Nat total = 0;
  for (const auto& [counts, ways] : layer) total += ways;
  return total;
}

Nat count_representatives(const Dfa& L, std::string_view x, const IndepAlphabet& A, std::size_t limit) {
  guard(x.size(), limit);
  std::vector<std::size_t> w = indices(x, A.sigma());
  std::size_t k = A.sigma().size();
  Occurrences occ(w, k);
  using Key = std::pair<std::string, std::size_t>;
  std::map<Key, Nat> layer{{Key{std::string(k, '\0'), L.start}, Nat(1)}};
  for (std::size_t step = 0; step < w.size(); ++step) {
    std::map<Key, Nat> next;
    for (const auto& [key, ways] : layer)
      for (std::size_t a = 0; a < k; ++a)
        if (occ.enabled(key.first, a, A)) {
          std::string c = key.first;
          ++c[a];
          next[Key{c, L.next(key.second, a)}] += ways;
        }
    layer.swap(next);
  }
  Nat total = 0;
  for (const auto& [key, ways] : layer)
    if (L.finals[key.second]) total += ways;
  return total;
}

namespace {

// Calls visit on every word of L of length n.
void for_each_member(const Dfa& L, std::size_t n, const std::function<void(const std::string&)>& visit) {
  CensusTable t = dfa_census(L, n);
  std::string w;
  std::function<void(std::size_t)> go = [&](std::size_t q) {
    if (w.size() == n) {
      visit(w);
      return;
    }
    std::size_t rest = n - w.size() - 1;
    for (std::size_t a = 0; a < L.alphabet.size(); ++a) {
      std::size_t p = L.next(q, a);
      if (t.at(p, rest) == 0) continue;
      w.push_back(L.alphabet.at(a));
      go(p);
      w.pop_back();
    }
  };
  if (t.at(L.start, n) != 0) go(L.start);
}

}  // namespace

Nat trace_census_exact(const Dfa& L, const IndepAlphabet& A, std::size_t n, const Nat& ceiling) {
  Nat words = dfa_census(L, n).at(L.start, n);
  if (words > ceiling) throw CeilingExceeded("slice has " + words.get_str() + " words, above ceiling " + ceiling.get_str());
  std::set<std::string> traces;
  for_each_member(L, n, [&](const std::string& w) { traces.insert(normal_form(w, A)); });
  return Nat(static_cast<unsigned long>(traces.size()));
}

Description<std::string, std::string> trace_description(const Dfa& L, const IndepAlphabet& A, PolyBound D) {
  auto dfa = std::make_shared<const Dfa>(L);
  auto ia = std::make_shared<const IndepAlphabet>(A);
  Description<std::string, std::string> d;
  d.sampler = [dfa](std::size_t n, CoinSource& src) { return dfa_sample(*dfa, n, src); };
  d.project = [ia](const std::string& w) { return normal_form(w, *ia); };
  d.ambiguity = [dfa, ia](const std::string& s) { return count_representatives(*dfa, s, *ia); };
  d.bound = std::move(D);
  d.census_t = [dfa](std::size_t n) { return dfa_census(*dfa, n).at(dfa->start, n); };
  return d;
}

void validate_trace_ambiguity(const Dfa& L, const IndepAlphabet& A, const PolyBound& D, std::size_t max_n) {
  for (std::size_t n = 1; n <= max_n; ++n) {
    Nat limit = D(n);
    for_each_member(L, n, [&](const std::string& w) {
      Nat c = count_representatives(L, w, A);
      if (c > limit)
        throw AmbiguityExceeded("trace of " + w + " has " + c.get_str() + " representatives in L, bound is " +
                                limit.get_str());
    });
  }
}

}  // namespace rgen
