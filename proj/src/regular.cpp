#include "rgen/regular.hpp"

#include <memory>
#include <sstream>

#include "rgen/errors.hpp"
#include "rgen/textio.hpp"

namespace rgen {

Alphabet::Alphabet(std::string symbols) : symbols_(std::move(symbols)) {
  index_.fill(-1);
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    auto c = static_cast<unsigned char>(symbols_[i]);
    if (index_[c] >= 0) throw std::invalid_argument(std::string("duplicate symbol ") + symbols_[i]);
    index_[c] = static_cast<int>(i);
  }
}

bool Alphabet::lex_leq(std::string_view u, std::string_view v) const {
  std::size_t m = std::min(u.size(), v.size());
  for (std::size_t i = 0; i < m; ++i) {
    int a = index(u[i]), b = index(v[i]);
    if (a != b) return a < b;
  }
  return u.size() <= v.size();
}

bool Dfa::accepts(std::string_view w) const {
  std::size_t q = start;
  for (char c : w) {
    int a = alphabet.index(c);
    if (a < 0) return false;
    q = next(q, static_cast<std::size_t>(a));
  }
  return finals[q];
}

Dfa parse_dfa(std::string_view text) {
  Dfa A;
  bool have_states = false, have_alpha = false, have_start = false;
  std::vector<bool> defined;
  std::vector<std::size_t> finals_list;
  auto need = [&](const Line& ln) {
    if (!have_states || !have_alpha) throw ParseError("'states' and 'alphabet' must precede '" + ln.tok[0] + "'", ln.no);
  };
  auto state = [&](const std::string& t, std::size_t no) {
    std::size_t q = parse_count(t, no);
    if (q >= A.states) throw ParseError("state " + t + " out of range", no);
    return q;
  };
  auto symbol = [&](const std::string& t, std::size_t no) {
    char c = parse_symbol(t, no);
    if (!A.alphabet.contains(c)) throw ParseError("symbol '" + t + "' not in alphabet", no);
    return static_cast<std::size_t>(A.alphabet.index(c));
  };
  for (const Line& ln : tokenize(text)) {
    const std::string& key = ln.tok[0];
    if (key == "states") {
      if (ln.tok.size() != 2) throw ParseError("usage: states k", ln.no);
      A.states = parse_count(ln.tok[1], ln.no);
      if (A.states == 0) throw ParseError("need at least one state", ln.no);
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
      if (ln.tok.size() != 2) throw ParseError("usage: start q", ln.no);
      A.start = state(ln.tok[1], ln.no);
      have_start = true;
    } else if (key == "finals") {
      need(ln);
      for (std::size_t i = 1; i < ln.tok.size(); ++i) finals_list.push_back(state(ln.tok[i], ln.no));
    } else if (key == "trans") {
      need(ln);
      if (ln.tok.size() != 4) throw ParseError("usage: trans q symbol q'", ln.no);
      if (A.delta.empty()) {
        A.delta.assign(A.states * A.alphabet.size(), 0);
        defined.assign(A.delta.size(), false);
      }
      std::size_t q = state(ln.tok[1], ln.no);
      std::size_t a = symbol(ln.tok[2], ln.no);
      std::size_t p = state(ln.tok[3], ln.no);
      std::size_t slot = q * A.alphabet.size() + a;
      if (defined[slot]) throw ParseError("duplicate transition in a deterministic automaton", ln.no);
      defined[slot] = true;
      A.delta[slot] = p;
    } else if (key == "indep") {
      need(ln);
      if (ln.tok.size() != 3) throw ParseError("usage: indep a b", ln.no);
      std::size_t a = symbol(ln.tok[1], ln.no), b = symbol(ln.tok[2], ln.no);
      if (a == b) throw ParseError("independence must be irreflexive", ln.no);
      A.indep.emplace_back(a, b);
    } else {
      throw ParseError("unknown keyword '" + key + "'", ln.no);
    }
  }
  if (!have_states || !have_alpha || !have_start) throw ParseError("missing states, alphabet or start");
  if (A.delta.empty()) {
    A.delta.assign(A.states * A.alphabet.size(), 0);
    defined.assign(A.delta.size(), false);
  }
  for (std::size_t s = 0; s < defined.size(); ++s)
    if (!defined[s])
      throw ParseError("transition function not total: missing state " + std::to_string(s / A.alphabet.size()) +
                       " on '" + std::string(1, A.alphabet.at(s % A.alphabet.size())) + "'");
  A.finals.assign(A.states, false);
  for (std::size_t q : finals_list) A.finals[q] = true;
  return A;
}

std::string format_dfa(const Dfa& A) {
  std::ostringstream out;
  out << "states " << A.states << "\nalphabet";
  for (char c : A.alphabet.symbols()) out << ' ' << c;
  out << "\nstart " << A.start << "\nfinals";
  for (std::size_t q = 0; q < A.states; ++q)
    if (A.finals[q]) out << ' ' << q;
  out << '\n';
  for (std::size_t q = 0; q < A.states; ++q)
    for (std::size_t a = 0; a < A.alphabet.size(); ++a)
      out << "trans " << q << ' ' << A.alphabet.at(a) << ' ' << A.next(q, a) << '\n';
  for (auto [a, b] : A.indep) out << "indep " << A.alphabet.at(a) << ' ' << A.alphabet.at(b) << '\n';
  return out.str();
}

CensusTable dfa_census(const Dfa& A, std::size_t n) {
  CensusTable t;
  t.n = n;
  t.C.assign(n + 1, std::vector<Nat>(A.states, 0));
  t.b.assign(n + 1, std::vector<std::size_t>(A.states, 0));
  for (std::size_t q = 0; q < A.states; ++q) t.C[0][q] = A.finals[q] ? 1 : 0;
  for (std::size_t l = 1; l <= n; ++l)
    for (std::size_t q = 0; q < A.states; ++q) {
      Nat c = 0;
      for (std::size_t a = 0; a < A.alphabet.size(); ++a) c += t.C[l - 1][A.next(q, a)];
      t.C[l][q] = c;
    }
  for (std::size_t l = 0; l <= n; ++l)
    for (std::size_t q = 0; q < A.states; ++q)
      if (t.C[l][q] > 0) t.b[l][q] = bit_size(t.C[l][q]);
  return t;
}

std::size_t dfa_kappa(std::size_t n, std::size_t t) { return t + (n > 1 ? bit_size(Nat(static_cast<unsigned long>(n))) : 0); }

Outcome<std::string> dfa_sample(const Dfa& A, const CensusTable& table, std::size_t n, CoinSource& src,
                                std::size_t kappa) {
  if (table.n < n) throw std::invalid_argument("census table too short");
  if (table.at(A.start, n) == 0) throw EmptySlice();
  const Nat& c = table.at(A.start, n);
  std::size_t bits = table.b[n][A.start];
  Nat r;
  bool picked = false;
  for (std::size_t i = 0; i < kappa && !picked; ++i) {
    r = src.draw_bits(bits) + 1;
    picked = r <= c;
  }
  if (!picked) return std::nullopt;
  // residual rank inside the chosen successor slice
  std::string w;
  w.reserve(n);
  std::size_t q = A.start;
  for (std::size_t ell = n; ell >= 1; --ell) {
    for (std::size_t a = 0; a < A.alphabet.size(); ++a) {
      std::size_t p = A.next(q, a);
      const Nat& cp = table.at(p, ell - 1);
      if (r <= cp) {
        w.push_back(A.alphabet.at(a));
        q = p;
        break;
      }
      r -= cp;
    }
  }
  return w;
}

Outcome<std::string> dfa_sample(const Dfa& A, std::size_t n, CoinSource& src) {
  return dfa_sample(A, dfa_census(A, n), n, src, dfa_kappa(n));
}

Nat dfa_slice_rank(const Dfa& A, std::string_view w) {
  std::size_t n = w.size();
  CensusTable t = dfa_census(A, n);
  Nat r = 0;
  std::size_t q = A.start;
  for (std::size_t i = 0; i < n; ++i) {
    int wi = A.alphabet.index(w[i]);
    if (wi < 0) throw std::invalid_argument(std::string("symbol not in alphabet: ") + w[i]);
    for (int c = 0; c < wi; ++c) r += t.at(A.next(q, static_cast<std::size_t>(c)), n - i - 1);
    q = A.next(q, static_cast<std::size_t>(wi));
  }
  if (A.finals[q]) ++r;
  return r;
}

Nat dfa_rank(const Dfa& A, std::string_view w) {
  CensusTable t = dfa_census(A, w.size());
  Nat r = 0;
  for (std::size_t l = 0; l < w.size(); ++l) r += t.at(A.start, l);
  return r + dfa_slice_rank(A, w);
}

bool dfa_language_finite(const Dfa& A) {
  std::size_t k = A.alphabet.size();
  std::vector<bool> reach(A.states, false), coreach(A.states, false);
  std::vector<std::size_t> stack{A.start};
  reach[A.start] = true;
  while (!stack.empty()) {
    std::size_t q = stack.back();
    stack.pop_back();
    for (std::size_t a = 0; a < k; ++a) {
      std::size_t p = A.next(q, a);
      if (!reach[p]) reach[p] = true, stack.push_back(p);
    }
  }
  for (std::size_t q = 0; q < A.states; ++q) coreach[q] = A.finals[q];
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t q = 0; q < A.states; ++q) {
      if (coreach[q]) continue;
      for (std::size_t a = 0; a < k; ++a)
        if (coreach[A.next(q, a)]) {
          coreach[q] = true;
          changed = true;
          break;
        }
    }
  }
  // Cycle among useful states means an infinite language.
  std::vector<int> color(A.states, 0);
  std::function<bool(std::size_t)> cyclic = [&](std::size_t q) {
    color[q] = 1;
    for (std::size_t a = 0; a < k; ++a) {
      std::size_t p = A.next(q, a);
      if (!reach[p] || !coreach[p]) continue;
      if (color[p] == 1) return true;
      if (color[p] == 0 && cyclic(p)) return true;
    }
    color[q] = 2;
    return false;
  };
  for (std::size_t q = 0; q < A.states; ++q)
    if (reach[q] && coreach[q] && color[q] == 0 && cyclic(q)) return false;
  return true;
}

std::string dfa_unrank(const Dfa& A, const Nat& k) {
  if (k < 1) throw RankOutOfRange("ranks start at 1");
  bool finite = dfa_language_finite(A);
  std::size_t max_len = finite ? A.states : 0;
  Nat below = 0;
  std::size_t n = 0;
  for (;; ++n) {
    if (finite && n >= max_len) throw RankOutOfRange("rank " + k.get_str() + " exceeds |L| = " + below.get_str());
    Nat c = dfa_census(A, n).at(A.start, n);
    if (below + c >= k) break;
    below += c;
  }
  CensusTable t = dfa_census(A, n);
  Nat r = k - below;
  std::string w;
  std::size_t q = A.start;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < A.alphabet.size(); ++a) {
      std::size_t p = A.next(q, a);
      const Nat& c = t.at(p, n - i - 1);
      if (r <= c) {
        w.push_back(A.alphabet.at(a));
        q = p;
        break;
      }
      r -= c;
    }
  }
  return w;
}

WordStructure dfa_structure(const Dfa& A) {
  auto dfa = std::make_shared<const Dfa>(A);
  WordStructure s;
  s.sample = [dfa](std::size_t n, CoinSource& src) { return dfa_sample(*dfa, n, src); };
  s.contains = [dfa](const std::string& w) { return dfa->accepts(w); };
  s.census = [dfa](std::size_t n) { return dfa_census(*dfa, n).at(dfa->start, n); };
  return s;
}

}  // namespace rgen
