#include "rgen/cfl.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <unordered_map>

#include "rgen/errors.hpp"
#include "rgen/textio.hpp"

namespace rgen {

std::size_t Grammar::var_index(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i] == name) return i;
  return std::string::npos;
}

Grammar parse_grammar(std::string_view text) {
  Grammar g;
  bool have_vars = false, have_terms = false, have_start = false;
  std::string start_name;
  std::size_t start_line = 0;
  for (const Line& ln : tokenize(text)) {
    const std::string& key = ln.tok[0];
    if (key == "var") {
      for (std::size_t i = 1; i < ln.tok.size(); ++i) {
        if (g.var_index(ln.tok[i]) != std::string::npos) throw ParseError("duplicate variable " + ln.tok[i], ln.no);
        g.vars.push_back(ln.tok[i]);
      }
      have_vars = true;
    } else if (key == "term") {
      std::string s;
      for (std::size_t i = 1; i < ln.tok.size(); ++i) s.push_back(parse_symbol(ln.tok[i], ln.no));
      try {
        g.terminals = Alphabet(s);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), ln.no);
      }
      have_terms = true;
    } else if (key == "start") {
      if (ln.tok.size() != 2) throw ParseError("usage: start S", ln.no);
      start_name = ln.tok[1];
      start_line = ln.no;
      have_start = true;
    } else if (ln.tok.size() >= 2 && ln.tok[1] == "->") {
      if (!have_vars || !have_terms) throw ParseError("'var' and 'term' must precede productions", ln.no);
      std::size_t lhs = g.var_index(key);
      if (lhs == std::string::npos) throw ParseError("unknown variable " + key, ln.no);
      Grammar::Production p{lhs, {}};
      auto flush = [&]() {
        g.prods.push_back(p);
        p.rhs.clear();
      };
      for (std::size_t i = 2; i < ln.tok.size(); ++i) {
        const std::string& t = ln.tok[i];
        if (t == "|") {
          flush();
        } else if (t == "eps" || t == "ε") {
          continue;
        } else if (std::size_t v = g.var_index(t); v != std::string::npos) {
          if (t.size() == 1 && g.terminals.contains(t[0])) throw ParseError("'" + t + "' is both a variable and a terminal", ln.no);
          p.rhs.push_back({false, v});
        } else if (t.size() == 1 && g.terminals.contains(t[0])) {
          p.rhs.push_back({true, static_cast<std::size_t>(g.terminals.index(t[0]))});
        } else {
          throw ParseError("unknown symbol '" + t + "'", ln.no);
        }
      }
      flush();
    } else {
      throw ParseError("unknown line starting with '" + key + "'", ln.no);
    }
  }
  if (!have_vars || !have_terms || !have_start) throw ParseError("missing var, term or start");
  g.start = g.var_index(start_name);
  if (g.start == std::string::npos) throw ParseError("unknown start variable " + start_name, start_line);
  return g;
}

std::size_t CnfGrammar::production_count() const {
  std::size_t c = 0;
  for (std::size_t A = 0; A < vars.size(); ++A) c += binary[A].size() + unary[A].size();
  return c;
}

namespace {

using Sym = Grammar::Symbol;
using Prod = Grammar::Production;

std::string fresh_name(std::vector<std::string>& vars, const std::string& base) {
  std::string name = base;
  for (int i = 1; std::find(vars.begin(), vars.end(), name) != vars.end(); ++i) name = base + "_" + std::to_string(i);
  vars.push_back(name);
  return name;
}

void push_unique(std::vector<Prod>& out, std::set<std::pair<std::size_t, std::vector<std::pair<bool, std::size_t>>>>& seen,
                 const Prod& p) {
  std::vector<std::pair<bool, std::size_t>> key;
  for (const Sym& s : p.rhs) key.emplace_back(s.terminal, s.id);
  if (seen.insert({p.lhs, key}).second) out.push_back(p);
}

}  // namespace

CnfGrammar to_cnf(const Grammar& g, CnfOptions opt) {
  std::vector<std::string> vars = g.vars;
  std::vector<Prod> prods;

  // Terminals inside long right-hand sides get their own variable.
  std::map<std::size_t, std::size_t> term_var;
  std::vector<Prod> extra;
  for (Prod p : g.prods) {
    if (p.rhs.size() >= 2)
      for (Sym& s : p.rhs) {
        if (!s.terminal) continue;
        auto it = term_var.find(s.id);
        if (it == term_var.end()) {
          fresh_name(vars, std::string("T_") + g.terminals.at(s.id));
          it = term_var.emplace(s.id, vars.size() - 1).first;
          extra.push_back(Prod{it->second, {Sym{true, s.id}}});
        }
        s = Sym{false, it->second};
      }
    prods.push_back(std::move(p));
  }
  prods.insert(prods.end(), extra.begin(), extra.end());

  // Binarize.
  std::vector<Prod> bin;
  for (const Prod& p : prods) {
    if (p.rhs.size() <= 2) {
      bin.push_back(p);
      continue;
    }
    std::size_t lhs = p.lhs;
    for (std::size_t i = 0; i + 2 < p.rhs.size(); ++i) {
      fresh_name(vars, vars[p.lhs] + "_" + std::to_string(i + 1));
      std::size_t nv = vars.size() - 1;
      bin.push_back(Prod{lhs, {p.rhs[i], Sym{false, nv}}});
      lhs = nv;
    }
    bin.push_back(Prod{lhs, {p.rhs[p.rhs.size() - 2], p.rhs.back()}});
  }

  std::size_t V = vars.size();
  std::vector<bool> nullable(V, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Prod& p : bin) {
      if (nullable[p.lhs]) continue;
      bool all = std::all_of(p.rhs.begin(), p.rhs.end(), [&](const Sym& s) { return !s.terminal && nullable[s.id]; });
      if (all) nullable[p.lhs] = changed = true;
    }
  }
  if (nullable[g.start] && !opt.drop_epsilon) throw EpsilonInLanguage();

  std::vector<Prod> noeps;
  std::set<std::pair<std::size_t, std::vector<std::pair<bool, std::size_t>>>> seen;
  for (const Prod& p : bin) {
    if (p.rhs.empty()) continue;
    push_unique(noeps, seen, p);
    if (p.rhs.size() == 2) {
      const Sym &x = p.rhs[0], &y = p.rhs[1];
      if (!x.terminal && nullable[x.id]) push_unique(noeps, seen, Prod{p.lhs, {y}});
      if (!y.terminal && nullable[y.id]) push_unique(noeps, seen, Prod{p.lhs, {x}});
    }
  }

  // Unit closure: A =>* B through unit productions.
  std::vector<std::vector<bool>> unit(V, std::vector<bool>(V, false));
  for (std::size_t A = 0; A < V; ++A) unit[A][A] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Prod& p : noeps)
      if (p.rhs.size() == 1 && !p.rhs[0].terminal)
        for (std::size_t A = 0; A < V; ++A)
          if (unit[A][p.lhs] && !unit[A][p.rhs[0].id]) unit[A][p.rhs[0].id] = changed = true;
  }
  std::vector<Prod> nounit;
  seen.clear();
  for (std::size_t A = 0; A < V; ++A)
    for (std::size_t B = 0; B < V; ++B) {
      if (!unit[A][B]) continue;
      for (const Prod& p : noeps)
        if (p.lhs == B && !(p.rhs.size() == 1 && !p.rhs[0].terminal)) push_unique(nounit, seen, Prod{A, p.rhs});
    }

  // Keep generating variables reachable from the start.
  std::vector<bool> gen(V, false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const Prod& p : nounit) {
      if (gen[p.lhs]) continue;
      if (std::all_of(p.rhs.begin(), p.rhs.end(), [&](const Sym& s) { return s.terminal || gen[s.id]; }))
        gen[p.lhs] = changed = true;
    }
  }
  std::vector<bool> reach(V, false);
  reach[g.start] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Prod& p : nounit) {
      if (!reach[p.lhs]) continue;
      if (!std::all_of(p.rhs.begin(), p.rhs.end(), [&](const Sym& s) { return s.terminal || gen[s.id]; })) continue;
      for (const Sym& s : p.rhs)
        if (!s.terminal && !reach[s.id]) reach[s.id] = changed = true;
    }
  }

  CnfGrammar out;
  out.terminals = g.terminals;
  std::vector<std::size_t> remap(V, std::string::npos);
  for (std::size_t A = 0; A < V; ++A)
    if (A == g.start || (gen[A] && reach[A])) {
      remap[A] = out.vars.size();
      out.vars.push_back(vars[A]);
    }
  out.start = remap[g.start];
  out.binary.resize(out.vars.size());
  out.unary.resize(out.vars.size());
  for (const Prod& p : nounit) {
    if (remap[p.lhs] == std::string::npos) continue;
    bool ok = std::all_of(p.rhs.begin(), p.rhs.end(), [&](const Sym& s) { return s.terminal || remap[s.id] != std::string::npos; });
    if (!ok) continue;
    std::size_t A = remap[p.lhs];
    if (p.rhs.size() == 1)
      out.unary[A].push_back(p.rhs[0].id);
    else
      out.binary[A].emplace_back(remap[p.rhs[0].id], remap[p.rhs[1].id]);
  }
  for (std::size_t A = 0; A < out.vars.size(); ++A) {
    std::sort(out.binary[A].begin(), out.binary[A].end());
    std::sort(out.unary[A].begin(), out.unary[A].end());
  }
  return out;
}

CnfGrammar parse_cnf(std::string_view text, CnfOptions opt) { return to_cnf(parse_grammar(text), opt); }

std::string format_cnf(const CnfGrammar& g) {
  std::ostringstream out;
  out << "var";
  for (const auto& v : g.vars) out << ' ' << v;
  out << "\nterm";
  for (char c : g.terminals.symbols()) out << ' ' << c;
  out << "\nstart " << g.vars[g.start] << '\n';
  for (std::size_t A = 0; A < g.vars.size(); ++A) {
    for (auto [B, C] : g.binary[A]) out << g.vars[A] << " -> " << g.vars[B] << ' ' << g.vars[C] << '\n';
    for (std::size_t a : g.unary[A]) out << g.vars[A] << " -> " << g.terminals.at(a) << '\n';
  }
  return out.str();
}

TreeCensus tree_census_table(const CnfGrammar& g, std::size_t n) {
  std::size_t V = g.vars.size();
  TreeCensus t;
  t.n = n;
  t.C.assign(n + 1, std::vector<Nat>(V, 0));
  t.b.assign(n + 1, std::vector<std::size_t>(V, 0));
  if (n >= 1)
    for (std::size_t A = 0; A < V; ++A) t.C[1][A] = static_cast<unsigned long>(g.unary[A].size());
  for (std::size_t l = 2; l <= n; ++l)
    for (std::size_t A = 0; A < V; ++A) {
      Nat c = 0;
      for (auto [B, C] : g.binary[A])
        for (std::size_t h = 1; h < l; ++h) c += t.C[h][B] * t.C[l - h][C];
      t.C[l][A] = c;
    }
  for (std::size_t l = 1; l <= n; ++l)
    for (std::size_t A = 0; A < V; ++A)
      if (t.C[l][A] > 0) t.b[l][A] = bit_size(t.C[l][A]);
  return t;
}

Nat tree_census(const CnfGrammar& g, std::size_t A, std::size_t n) {
  if (A >= g.vars.size()) throw std::invalid_argument("unknown variable");
  return tree_census_table(g, n).at(A, n);
}

std::size_t DerivationTree::size() const {
  if (leaf()) return 1;
  return kids[0].size() + kids[1].size();
}

namespace {

void yield_into(const CnfGrammar& g, const DerivationTree& t, std::string& out) {
  if (t.leaf()) {
    out.push_back(g.terminals.at(t.terminal));
    return;
  }
  yield_into(g, t.kids[0], out);
  yield_into(g, t.kids[1], out);
}

void format_into(const CnfGrammar& g, const DerivationTree& t, std::string& out) {
  out += '(';
  out += g.vars[t.var];
  out += ' ';
  if (t.leaf()) {
    out.push_back(g.terminals.at(t.terminal));
  } else {
    format_into(g, t.kids[0], out);
    out += ' ';
    format_into(g, t.kids[1], out);
  }
  out += ')';
}

Nat split_weight(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, std::size_t h) {
  Nat w = 0;
  for (auto [B, C] : g.binary[A]) w += c.at(B, h) * c.at(C, l - h);
  return w;
}

// Within the group of split point h, the production reaching residual r.
Split pick_in_group(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, std::size_t h, Nat r) {
  for (std::size_t p = 0; p < g.binary[A].size(); ++p) {
    auto [B, C] = g.binary[A][p];
    Nat w = c.at(B, h) * c.at(C, l - h);
    if (r <= w) return Split{h, p};
    r -= w;
  }
  throw std::logic_error("split search out of range");
}

}  // namespace

bool DerivationTree::operator<(const DerivationTree& o) const {
  if (var != o.var) return var < o.var;
  if (terminal != o.terminal) return terminal < o.terminal;
  return std::lexicographical_compare(kids.begin(), kids.end(), o.kids.begin(), o.kids.end());
}

std::string tree_yield(const CnfGrammar& g, const DerivationTree& t) {
  std::string out;
  yield_into(g, t, out);
  return out;
}

std::string format_tree(const CnfGrammar& g, const DerivationTree& t) {
  std::string out;
  format_into(g, t, out);
  return out;
}

std::size_t tree_kappa(std::size_t n, std::size_t t_confidence) {
  return 3 + (n > 1 ? bit_size(Nat(static_cast<unsigned long>(n))) : 0) + t_confidence;
}

Split find_split_linear(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, const Nat& r) {
  Nat acc = 0;
  for (std::size_t h = 1; h < l; ++h) {
    Nat w = split_weight(g, c, A, l, h);
    if (acc + w >= r) return pick_in_group(g, c, A, l, h, r - acc);
    acc += w;
  }
  throw std::logic_error("split search out of range");
}

Split find_split_boustrophedon(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, const Nat& r) {
  const Nat& total = c.at(A, l);
  std::size_t lo = 1, hi = l - 1;
  Nat below = 0;  // weight of groups h < lo
  Nat above = 0;  // weight of groups h > hi
  while (lo <= hi) {
    Nat w = split_weight(g, c, A, l, lo);
    if (below + w >= r) return pick_in_group(g, c, A, l, lo, r - below);
    below += w;
    ++lo;
    if (lo > hi) break;
    Nat v = split_weight(g, c, A, l, hi);
    Nat start = total - above - v;  // weight of groups h < hi
    if (start < r) return pick_in_group(g, c, A, l, hi, r - start);
    above += v;
    --hi;
  }
  throw std::logic_error("split search out of range");
}

namespace {

// Rank of r inside the (h, prod) cell chosen for it.
Nat cell_offset(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, const Split& s, Nat r) {
  for (std::size_t h = 1; h < s.h; ++h) r -= split_weight(g, c, A, l, h);
  for (std::size_t p = 0; p < s.prod; ++p) {
    auto [B, C] = g.binary[A][p];
    r -= c.at(B, s.h) * c.at(C, l - s.h);
  }
  return r;
}

// Unranks r in {1..C_A(l)}; the pair (r_B, r_C) of a cell is ordered by r_B first.
DerivationTree unrank_tree(const CnfGrammar& g, const TreeCensus& c, std::size_t A, std::size_t l, const Nat& r) {
  DerivationTree t;
  t.var = A;
  if (l == 1) {
    t.terminal = g.unary[A][r.get_ui() - 1];
    return t;
  }
  Split s = find_split_boustrophedon(g, c, A, l, r);
  auto [B, C] = g.binary[A][s.prod];
  Nat off = cell_offset(g, c, A, l, s, r) - 1;
  const Nat& cc = c.at(C, l - s.h);
  Nat rb = off / cc + 1;
  Nat rc = off % cc + 1;
  t.kids.push_back(unrank_tree(g, c, B, s.h, rb));
  t.kids.push_back(unrank_tree(g, c, C, l - s.h, rc));
  return t;
}

}  // namespace

Outcome<DerivationTree> random_tree(const CnfGrammar& g, const TreeCensus& c, std::size_t n, CoinSource& src,
                                    std::size_t kappa) {
  if (n < 1 || c.n < n) throw std::invalid_argument("random_tree: bad size or census table");
  if (c.at(g.start, n) == 0) throw EmptySlice();
  const Nat& total = c.at(g.start, n);
  std::size_t bits = c.b[n][g.start];
  for (std::size_t i = 0; i < kappa; ++i) {
    Nat u = src.draw_bits(bits) + 1;
    if (u <= total) return unrank_tree(g, c, g.start, n, u);
  }
  return std::nullopt;
}

Outcome<DerivationTree> random_tree(const CnfGrammar& g, std::size_t n, CoinSource& src, std::size_t t_confidence) {
  return random_tree(g, tree_census_table(g, n), n, src, tree_kappa(n, t_confidence));
}

namespace {

// Dotted productions: binary p with dot 0..2 at 3p + dot, unary u with dot 0..1 after them.
struct Dotted {
  const CnfGrammar& g;
  std::vector<std::pair<std::size_t, std::size_t>> bin_index;  // (A, position in binary[A])
  std::vector<std::pair<std::size_t, std::size_t>> un_index;
  std::vector<std::vector<std::size_t>> bin_of, un_of;  // per variable, global ids

  explicit Dotted(const CnfGrammar& gr) : g(gr) {
    bin_of.resize(g.vars.size());
    un_of.resize(g.vars.size());
    for (std::size_t A = 0; A < g.vars.size(); ++A) {
      for (std::size_t k = 0; k < g.binary[A].size(); ++k) {
        bin_of[A].push_back(bin_index.size());
        bin_index.emplace_back(A, k);
      }
      for (std::size_t k = 0; k < g.unary[A].size(); ++k) {
        un_of[A].push_back(un_index.size());
        un_index.emplace_back(A, k);
      }
    }
  }

  std::size_t bin(std::size_t p, std::size_t dot) const { return 3 * p + dot; }
  std::size_t un(std::size_t u, std::size_t dot) const { return 3 * bin_index.size() + 2 * u + dot; }
  bool is_unary(std::size_t d) const { return d >= 3 * bin_index.size(); }

  std::size_t lhs(std::size_t d) const {
    return is_unary(d) ? un_index[(d - 3 * bin_index.size()) / 2].first : bin_index[d / 3].first;
  }
  std::size_t dot(std::size_t d) const { return is_unary(d) ? (d - 3 * bin_index.size()) % 2 : d % 3; }
  bool complete(std::size_t d) const { return is_unary(d) ? dot(d) == 1 : dot(d) == 2; }
  std::size_t terminal(std::size_t d) const {
    auto [A, k] = un_index[(d - 3 * bin_index.size()) / 2];
    return g.unary[A][k];
  }
  /// Variable after the dot, or npos.
  std::size_t next_var(std::size_t d) const {
    if (is_unary(d) || complete(d)) return std::string::npos;
    auto [A, k] = bin_index[d / 3];
    return dot(d) == 0 ? g.binary[A][k].first : g.binary[A][k].second;
  }
};

struct Chart {
  const Dotted& dp;
  std::size_t n;
  std::vector<std::vector<EarleyState>> cells;
  std::vector<std::unordered_map<std::size_t, std::size_t>> where;
  std::vector<std::vector<std::vector<std::size_t>>> L;  // L[B][i] = k list

  Chart(const Dotted& d, std::size_t len) : dp(d), n(len) {
    cells.resize((n + 1) * (n + 1));
    where.resize(cells.size());
    L.assign(d.g.vars.size(), std::vector<std::vector<std::size_t>>(n + 1));
  }

  std::size_t id(std::size_t i, std::size_t j) const { return i * (n + 1) + j; }

  EarleyState* find(std::size_t i, std::size_t j, std::size_t dotted) {
    auto& w = where[id(i, j)];
    auto it = w.find(dotted);
    return it == w.end() ? nullptr : &cells[id(i, j)][it->second];
  }

  void add(std::size_t i, std::size_t j, std::size_t dotted, Nat weight) {
    auto& cell = cells[id(i, j)];
    where[id(i, j)].emplace(dotted, cell.size());
    cell.push_back(EarleyState{dotted, std::move(weight), false});
    std::size_t B = dp.next_var(dotted);
    if (B != std::string::npos) {
      auto& lst = L[B][j];
      if (std::find(lst.begin(), lst.end(), i) == lst.end()) lst.push_back(i);
    }
  }

  void predict_from(std::size_t j, std::size_t B) {
    for (std::size_t p : dp.bin_of[B])
      if (!find(j, j, dp.bin(p, 0))) add(j, j, dp.bin(p, 0), 1);
    for (std::size_t u : dp.un_of[B])
      if (!find(j, j, dp.un(u, 0))) add(j, j, dp.un(u, 0), 1);
  }

  void close(std::size_t j) {
    auto& cell = cells[id(j, j)];
    for (std::size_t s = 0; s < cell.size(); ++s) {
      if (cell[s].marked) continue;
      std::size_t B = dp.next_var(cell[s].dotted);
      if (B == std::string::npos) continue;
      cell[s].marked = true;
      predict_from(j, B);
    }
  }
};

}  // namespace

EarleyChart earley_chart(const CnfGrammar& g, std::string_view x) {
  std::size_t n = x.size();
  Dotted dp(g);
  Chart ch(dp, n);
  std::vector<int> sym(n);
  for (std::size_t i = 0; i < n; ++i) sym[i] = g.terminals.index(x[i]);

  ch.predict_from(0, g.start);
  ch.close(0);

  for (std::size_t j = 1; j <= n; ++j) {
    // Scanner
    for (std::size_t i = j; i-- > 0;) {
      auto& cell = ch.cells[ch.id(i, j - 1)];
      for (std::size_t s = 0; s < cell.size(); ++s) {
        std::size_t d = cell[s].dotted;
        if (!dp.is_unary(d) || dp.dot(d) != 0) continue;
        cell[s].marked = true;
        if (sym[j - 1] >= 0 && dp.terminal(d) == static_cast<std::size_t>(sym[j - 1]))
          ch.add(i, j, d + 1, cell[s].weight);
      }
    }
    // Completer
    for (std::size_t i = j; i-- > 0;) {
      for (std::size_t s = 0; s < ch.cells[ch.id(i, j)].size(); ++s) {
        EarleyState st = ch.cells[ch.id(i, j)][s];
        if (!dp.complete(st.dotted)) continue;
        ch.cells[ch.id(i, j)][s].marked = true;
        std::size_t B = dp.lhs(st.dotted);
        std::vector<std::size_t> ks = ch.L[B][i];
        for (std::size_t k : ks) {
          std::size_t cnt = ch.cells[ch.id(k, i)].size();
          for (std::size_t q = 0; q < cnt; ++q) {
            const EarleyState& src = ch.cells[ch.id(k, i)][q];
            if (dp.next_var(src.dotted) != B) continue;
            Nat w = st.weight * src.weight;
            std::size_t adv = src.dotted + 1;
            if (EarleyState* e = ch.find(k, j, adv))
              e->weight += w;
            else
              ch.add(k, j, adv, std::move(w));
          }
        }
      }
    }
    // Predictor
    for (std::size_t i = 0; i < j; ++i) {
      auto& cell = ch.cells[ch.id(i, j)];
      for (std::size_t s = 0; s < cell.size(); ++s) {
        std::size_t B = dp.next_var(cell[s].dotted);
        if (B == std::string::npos) continue;
        cell[s].marked = true;
        ch.predict_from(j, B);
      }
    }
    ch.close(j);
  }

  EarleyChart out;
  out.n = n;
  out.count = 0;
  if (n >= 1)
    for (const EarleyState& st : ch.cells[ch.id(0, n)])
      if (dp.complete(st.dotted) && dp.lhs(st.dotted) == g.start) out.count += st.weight;
  out.cells = std::move(ch.cells);
  return out;
}

Nat earley_count(const CnfGrammar& g, std::string_view x) { return earley_chart(g, x).count; }

void validate_cfl_ambiguity(const CnfGrammar& g, const PolyBound& D, std::size_t max_n) {
  std::size_t k = g.terminals.size();
  for (std::size_t n = 1; n <= max_n; ++n) {
    Nat limit = D(n);
    std::vector<std::size_t> idx(n, 0);
    std::string w(n, k ? g.terminals.at(0) : '?');
    if (k == 0) return;
    while (true) {
      Nat c = earley_count(g, w);
      if (c > limit)
        throw AmbiguityExceeded("word " + w + " has " + c.get_str() + " derivation trees, bound is " + limit.get_str());
      std::size_t pos = n;
      while (pos > 0 && idx[pos - 1] + 1 == k) {
        idx[pos - 1] = 0;
        w[pos - 1] = g.terminals.at(0);
        --pos;
      }
      if (pos == 0) break;
      ++idx[pos - 1];
      w[pos - 1] = g.terminals.at(idx[pos - 1]);
    }
  }
}

namespace {

struct CensusCache {
  std::mutex mu;
  std::shared_ptr<const TreeCensus> table;

  std::shared_ptr<const TreeCensus> get(const CnfGrammar& g, std::size_t n) {
    std::lock_guard<std::mutex> lock(mu);
    if (!table || table->n < n) table = std::make_shared<const TreeCensus>(tree_census_table(g, n));
    return table;
  }
};

}  // namespace

Description<DerivationTree, std::string> cfl_description(const CnfGrammar& g, PolyBound D, std::size_t t_confidence) {
  auto gram = std::make_shared<const CnfGrammar>(g);
  auto cache = std::make_shared<CensusCache>();
  Description<DerivationTree, std::string> d;
  d.census_t = [gram, cache](std::size_t n) { return n == 0 ? Nat(0) : cache->get(*gram, n)->at(gram->start, n); };
  d.sampler = [gram, cache, t_confidence](std::size_t n, CoinSource& src) {
    auto table = cache->get(*gram, n);
    return random_tree(*gram, *table, n, src, tree_kappa(n, t_confidence));
  };
  d.project = [gram](const DerivationTree& t) { return tree_yield(*gram, t); };
  d.ambiguity = [gram](const std::string& w) { return earley_count(*gram, w); };
  d.bound = std::move(D);
  return d;
}

}  // namespace rgen
