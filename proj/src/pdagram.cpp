#include "rgen/pdagram.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>

#include "rgen/errors.hpp"
#include "rgen/textio.hpp"

namespace rgen {

Pda parse_pda(std::string_view text) {
  Pda M;
  std::vector<std::string> names;
  bool have_states = false, have_input = false, have_stack = false, have_init = false;
  std::string start_name;
  std::size_t start_line = 0;
  std::vector<std::pair<std::string, std::size_t>> final_names;
  auto state = [&](const std::string& t, std::size_t no) {
    auto it = std::find(names.begin(), names.end(), t);
    if (it == names.end()) throw ParseError("unknown state '" + t + "'", no);
    return static_cast<std::size_t>(it - names.begin());
  };
  auto stack_sym = [&](const std::string& t, std::size_t no) {
    auto it = std::find(M.stack.begin(), M.stack.end(), t);
    if (it == M.stack.end()) throw ParseError("unknown stack symbol '" + t + "'", no);
    return static_cast<std::size_t>(it - M.stack.begin());
  };
  auto need = [&](const Line& ln) {
    if (!have_states || !have_input || !have_stack)
      throw ParseError("states, input and stack must precede '" + ln.tok[0] + "'", ln.no);
  };
  for (const Line& ln : tokenize(text)) {
    const std::string& key = ln.tok[0];
    if (key == "states" && ln.tok.size() == 2 && std::all_of(ln.tok[1].begin(), ln.tok[1].end(), ::isdigit)) {
      std::size_t k = parse_count(ln.tok[1], ln.no);
      for (std::size_t i = 0; i < k; ++i) names.push_back(std::to_string(i));
      have_states = k > 0;
    } else if (key == "state" || key == "states") {
      for (std::size_t i = 1; i < ln.tok.size(); ++i) {
        if (std::find(names.begin(), names.end(), ln.tok[i]) != names.end()) throw ParseError("duplicate state " + ln.tok[i], ln.no);
        names.push_back(ln.tok[i]);
      }
      have_states = !names.empty();
    } else if (key == "input") {
      std::string s;
      for (std::size_t i = 1; i < ln.tok.size(); ++i) s.push_back(parse_symbol(ln.tok[i], ln.no));
      try {
        M.input = Alphabet(s);
      } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), ln.no);
      }
      have_input = true;
    } else if (key == "stack") {
      for (std::size_t i = 1; i < ln.tok.size(); ++i) {
        if (std::find(M.stack.begin(), M.stack.end(), ln.tok[i]) != M.stack.end()) throw ParseError("duplicate stack symbol " + ln.tok[i], ln.no);
        M.stack.push_back(ln.tok[i]);
      }
      have_stack = !M.stack.empty();
    } else if (key == "init") {
      need(ln);
      if (ln.tok.size() != 2) throw ParseError("usage: init Z0", ln.no);
      M.init = stack_sym(ln.tok[1], ln.no);
      have_init = true;
    } else if (key == "start") {
      if (ln.tok.size() != 2) throw ParseError("usage: start q", ln.no);
      start_name = ln.tok[1];
      start_line = ln.no;
    } else if (key == "final" || key == "finals") {
      for (std::size_t i = 1; i < ln.tok.size(); ++i) final_names.emplace_back(ln.tok[i], ln.no);
    } else if (key == "consume") {
      need(ln);
      if (ln.tok.size() != 5) throw ParseError("usage: consume q symbol top q'", ln.no);
      Pda::Consume c{state(ln.tok[1], ln.no), stack_sym(ln.tok[3], ln.no), state(ln.tok[4], ln.no), Pda::kEps};
      const std::string& s = ln.tok[2];
      if (s != "eps" && s != "ε" && s != "-") {
        char ch = parse_symbol(s, ln.no);
        if (!M.input.contains(ch)) throw ParseError("symbol '" + s + "' not in input alphabet", ln.no);
        c.symbol = M.input.index(ch);
      }
      M.consumes.push_back(c);
    } else if (key == "push") {
      need(ln);
      if (ln.tok.size() != 5) throw ParseError("usage: push q top pushed q'", ln.no);
      M.pushes.push_back({state(ln.tok[1], ln.no), stack_sym(ln.tok[2], ln.no), stack_sym(ln.tok[3], ln.no),
                         state(ln.tok[4], ln.no)});
    } else if (key == "pop") {
      need(ln);
      if (ln.tok.size() != 4) throw ParseError("usage: pop q top q'", ln.no);
      M.pops.push_back({state(ln.tok[1], ln.no), stack_sym(ln.tok[2], ln.no), state(ln.tok[3], ln.no)});
    } else {
      throw ParseError("unknown keyword '" + key + "'", ln.no);
    }
  }
  if (!have_states || !have_input || !have_stack || !have_init) throw ParseError("missing states, input, stack or init");
  M.states = names.size();
  M.start = start_name.empty() ? 0 : state(start_name, start_line);
  M.finals.assign(M.states, false);
  for (const auto& [f, no] : final_names) M.finals[state(f, no)] = true;
  return M;
}

std::vector<SurfaceConfig> surface_configs(const Pda& M, std::size_t n) {
  std::vector<SurfaceConfig> out;
  for (std::size_t j = 1; j <= n + 1; ++j)
    for (std::size_t q = 0; q < M.states; ++q)
      for (std::size_t X = 0; X < M.stack.size(); ++X) out.push_back({q, X, j});
  return out;
}

namespace {

struct Construction {
  const Pda& M;
  std::size_t n, Q, G, K;

  // Move instances between surface configurations.
  std::vector<std::vector<std::pair<std::size_t, int>>> cons_from, cons_into;
  std::vector<std::vector<std::size_t>> push_into;    // D1 -> C1 list
  std::vector<std::vector<std::size_t>> pop_targets;  // D2 -> states reached by popping its top
  std::vector<std::pair<std::size_t, std::size_t>> brackets;  // push then pop right away: (C1, C2)

  std::vector<std::uint8_t> has;
  std::vector<std::vector<std::uint64_t>> by_first, by_second;
  std::vector<std::uint64_t> work;

  Construction(const Pda& m, std::size_t len) : M(m), n(len), Q(m.states), G(m.stack.size()) {
    K = (n + 1) * Q * G;
    cons_from.resize(K);
    cons_into.resize(K);
    push_into.resize(K);
    pop_targets.resize(K);
    for (std::size_t j = 1; j <= n + 1; ++j) {
      for (const auto& c : M.consumes) {
        std::size_t j2 = c.symbol == Pda::kEps ? j : j + 1;
        if (j2 > n + 1) continue;
        std::size_t a = idx(c.from, c.top, j), b = idx(c.to, c.top, j2);
        cons_from[a].emplace_back(b, c.symbol);
        cons_into[b].emplace_back(a, c.symbol);
      }
      for (const auto& p : M.pushes) push_into[idx(p.to, p.pushed, j)].push_back(idx(p.from, p.top, j));
      for (const auto& p : M.pops) pop_targets[idx(p.from, p.top, j)].push_back(p.to);
      for (const auto& pu : M.pushes)
        for (const auto& po : M.pops)
          if (po.from == pu.to && po.top == pu.pushed)
            brackets.emplace_back(idx(pu.from, pu.top, j), idx(po.to, pu.top, j));
    }
    has.assign(2 * K * K, 0);
    by_first.resize(K);
    by_second.resize(K);
  }

  std::size_t idx(std::size_t q, std::size_t X, std::size_t j) const { return ((j - 1) * Q + q) * G + X; }
  std::size_t state_of(std::size_t c) const { return (c / G) % Q; }
  std::size_t top_of(std::size_t c) const { return c % G; }
  std::size_t pos_of(std::size_t c) const { return c / (G * Q) + 1; }

  static std::uint64_t key(std::size_t a, std::size_t b, std::size_t l, std::size_t K) { return (std::uint64_t(a) * K + b) * 2 + l; }
  std::uint64_t key(std::size_t a, std::size_t b, std::size_t l) const { return key(a, b, l, K); }
  std::size_t first(std::uint64_t f) const { return (f / 2) / K; }
  std::size_t second(std::uint64_t f) const { return (f / 2) % K; }
  static std::size_t level(std::uint64_t f) { return f % 2; }

  void add(std::size_t a, std::size_t b, std::size_t l) {
    std::uint64_t f = key(a, b, l);
    if (has[f]) return;
    has[f] = 1;
    by_first[a].push_back(f);
    by_second[b].push_back(f);
    work.push_back(f);
  }

  void saturate() {
    for (std::size_t a = 0; a < K; ++a)
      for (auto [b, s] : cons_from[a]) add(a, b, 0);
    for (auto [c1, c2] : brackets) add(c1, c2, 1);
    while (!work.empty()) {
      std::uint64_t f = work.back();
      work.pop_back();
      std::size_t a = first(f), b = second(f), l = level(f);
      for (std::size_t i = 0; i < by_second[a].size(); ++i) {
        std::uint64_t g = by_second[a][i];
        if (level(g) == 1) add(first(g), b, 0);
      }
      for (auto [z, s] : cons_into[a]) add(z, b, 0);
      if (l == 1)
        for (std::size_t i = 0; i < by_first[b].size(); ++i) add(a, second(by_first[b][i]), 0);
      for (std::size_t c1 : push_into[a])
        for (std::size_t p : pop_targets[b]) add(c1, idx(p, top_of(c1), pos_of(b)), 1);
    }
  }

  std::string config_name(std::size_t c) const {
    return M.stack.empty() ? "" : std::to_string(state_of(c)) + "," + M.stack[top_of(c)] + "," + std::to_string(pos_of(c));
  }
  std::string fact_name(std::uint64_t f) const {
    return "<" + config_name(first(f)) + "|" + config_name(second(f)) + "|" + std::to_string(level(f)) + ">";
  }
};

}  // namespace

SliceGrammar build_slice_grammar(const Pda& M, std::size_t n) {
  if (n < 1) throw std::invalid_argument("build_slice_grammar: n must be at least 1");
  Construction c(M, n);
  c.saturate();

  using Sym = Grammar::Symbol;
  struct RawProd {
    std::uint64_t lhs;  // fact key, or UINT64_MAX for the start symbol
    std::vector<std::pair<bool, std::uint64_t>> rhs;  // (terminal, fact key or terminal index)
  };
  const std::uint64_t kStart = UINT64_MAX;
  std::vector<RawProd> raw;
  std::size_t productive = 0;
  for (std::uint64_t f = 0; f < c.has.size(); ++f)
    if (c.has[f]) ++productive;

  for (std::size_t a = 0; a < c.K; ++a)
    for (auto [b, s] : c.cons_from[a]) {
      RawProd p{c.key(a, b, 0), {}};
      if (s != Pda::kEps) p.rhs.emplace_back(true, static_cast<std::uint64_t>(s));
      raw.push_back(p);
      for (std::uint64_t g : c.by_first[b]) {
        RawProd q{c.key(a, c.second(g), 0), {}};
        if (s != Pda::kEps) q.rhs.emplace_back(true, static_cast<std::uint64_t>(s));
        q.rhs.emplace_back(false, g);
        raw.push_back(q);
      }
    }
  for (std::size_t a = 0; a < c.K; ++a)
    for (std::uint64_t f : c.by_first[a]) {
      if (Construction::level(f) != 1) continue;
      std::size_t d = c.second(f);
      for (std::uint64_t g : c.by_first[d]) raw.push_back(RawProd{c.key(a, c.second(g), 0), {{false, f}, {false, g}}});
    }
  for (std::uint64_t f = 0; f < c.has.size(); ++f) {
    if (!c.has[f]) continue;
    std::size_t a = c.first(f), b = c.second(f);
    for (std::size_t c1 : c.push_into[a])
      for (std::size_t p : c.pop_targets[b])
        raw.push_back(RawProd{c.key(c1, c.idx(p, c.top_of(c1), c.pos_of(b)), 1), {{false, f}}});
  }
  for (auto [c1, c2] : c.brackets) raw.push_back(RawProd{c.key(c1, c2, 1), {}});
  std::size_t cin = c.idx(M.start, M.init, 1);
  for (std::size_t q = 0; q < M.states; ++q) {
    if (!M.finals[q]) continue;
    std::size_t cfin = c.idx(q, M.init, n + 1);
    for (std::size_t l = 0; l < 2; ++l)
      if (c.has[c.key(cin, cfin, l)]) raw.push_back(RawProd{kStart, {{false, c.key(cin, cfin, l)}}});
  }

  // Reachability from the start symbol.
  std::map<std::uint64_t, std::vector<std::size_t>> by_lhs;
  for (std::size_t i = 0; i < raw.size(); ++i) by_lhs[raw[i].lhs].push_back(i);
  std::map<std::uint64_t, std::size_t> var_of;  // fact -> variable index
  std::vector<std::uint64_t> order{kStart};
  std::map<std::uint64_t, bool> seen{{kStart, true}};
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t pi : by_lhs[order[i]])
      for (auto [term, s] : raw[pi].rhs)
        if (!term && !seen[s]) {
          seen[s] = true;
          order.push_back(s);
        }
  std::sort(order.begin() + 1, order.end());

  SliceGrammar out;
  Grammar& g = out.grammar;
  g.terminals = M.input;
  g.vars.push_back("S");
  var_of[kStart] = 0;
  for (std::size_t i = 1; i < order.size(); ++i) {
    var_of[order[i]] = g.vars.size();
    g.vars.push_back(c.fact_name(order[i]));
  }
  g.start = 0;
  for (std::uint64_t v : order)
    for (std::size_t pi : by_lhs[v]) {
      Grammar::Production p{var_of[v], {}};
      for (auto [term, s] : raw[pi].rhs) p.rhs.push_back(term ? Sym{true, static_cast<std::size_t>(s)} : Sym{false, var_of[s]});
      g.prods.push_back(std::move(p));
    }

  out.cnf = to_cnf(g, CnfOptions{true});
  out.stats.configs = c.K;
  out.stats.candidate_nonterminals = 2 * c.K * c.K;
  out.stats.productive = productive;
  out.stats.reachable = order.size() - 1;
  out.stats.productions = g.prods.size();
  out.stats.cnf_variables = out.cnf.vars.size();
  out.stats.cnf_productions = out.cnf.production_count();
  return out;
}

namespace {

struct Simulator {
  const Pda& M;
  std::vector<int> in;
  std::size_t max_steps;
  Nat count = 0;
  std::vector<std::size_t> st;

  void run(std::size_t q, std::size_t pos, std::size_t steps) {
    if (M.finals[q] && pos == in.size() && st.size() == 1 && st[0] == M.init) ++count;
    if (st.empty()) return;
    std::size_t X = st.back();
    auto over = [&] {
      if (steps >= max_steps) throw SizeGuard("computation longer than " + std::to_string(max_steps) + " moves");
    };
    for (const auto& c : M.consumes) {
      if (c.from != q || c.top != X) continue;
      if (c.symbol == Pda::kEps) {
        over();
        run(c.to, pos, steps + 1);
      } else if (pos < in.size() && in[pos] == c.symbol) {
        over();
        run(c.to, pos + 1, steps + 1);
      }
    }
    for (const auto& p : M.pushes) {
      if (p.from != q || p.top != X) continue;
      over();
      st.push_back(p.pushed);
      run(p.to, pos, steps + 1);
      st.pop_back();
    }
    for (const auto& p : M.pops) {
      if (p.from != q || p.top != X) continue;
      over();
      st.pop_back();
      run(p.to, pos, steps + 1);
      st.push_back(X);
    }
  }
};

}  // namespace

Nat pda_count_computations(const Pda& M, std::string_view w, std::size_t max_steps) {
  Simulator s{M, {}, max_steps, 0, {}};
  for (char ch : w) {
    int a = M.input.index(ch);
    if (a < 0) return 0;
    s.in.push_back(a);
  }
  s.st.push_back(M.init);
  s.run(M.start, 0, 0);
  return s.count;
}

void validate_pda_ambiguity(const Pda& M, const PolyBound& D, std::size_t max_n, std::size_t max_steps) {
  std::size_t k = M.input.size();
  if (k == 0) return;
  for (std::size_t n = 1; n <= max_n; ++n) {
    Nat limit = D(n);
    std::vector<std::size_t> idx(n, 0);
    std::string w(n, M.input.at(0));
    while (true) {
      Nat c = pda_count_computations(M, w, max_steps);
      if (c > limit)
        throw AmbiguityExceeded("word " + w + " has " + c.get_str() + " accepting computations, bound is " + limit.get_str());
      std::size_t pos = n;
      while (pos > 0 && idx[pos - 1] + 1 == k) {
        idx[pos - 1] = 0;
        w[pos - 1] = M.input.at(0);
        --pos;
      }
      if (pos == 0) break;
      ++idx[pos - 1];
      w[pos - 1] = M.input.at(idx[pos - 1]);
    }
  }
}

Description<DerivationTree, std::string> pda_description(const Pda& M, std::size_t n, PolyBound D) {
  SliceGrammar sg = build_slice_grammar(M, n);
  return cfl_description(sg.cnf, std::move(D));
}

SampleReport<std::string> pda_sample(const Pda& M, std::size_t n, const PolyBound& D, CoinSource& src) {
  return sample_described(pda_description(M, n, D), n, src);
}

EstimateReport pda_census_estimate(const Pda& M, std::size_t n, const PolyBound& D, const Rat& epsilon,
                                   CoinSource& src) {
  return estimate_census(pda_description(M, n, D), n, epsilon, src);
}

}  // namespace rgen
