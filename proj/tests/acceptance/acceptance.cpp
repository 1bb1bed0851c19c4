// One line per acceptance criterion; exit status is the number of failures.

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "rgen/cfl.hpp"
#include "rgen/framework.hpp"
#include "rgen/numutil.hpp"
#include "rgen/pdagram.hpp"
#include "rgen/pseudobool.hpp"
#include "rgen/rankauto.hpp"
#include "rgen/regular.hpp"
#include "rgen/traces.hpp"
#include "testdata.hpp"

using namespace rgen;

namespace {

struct Check {
  bool ok = true;
  std::size_t checks = 0;
  std::ostringstream note;

  void expect(bool cond, const std::string& what) {
    ++checks;
    if (!cond && ok) note << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

template <class R>
bool uniform(const oracle::Law<R>& law, std::size_t support) {
  if (law.fail >= 1 || law.prob.size() != support) return false;
  Rat want = rat(Nat(1), Nat(static_cast<unsigned long>(support)));
  for (const auto& [x, p] : law.prob)
    if (p / (1 - law.fail) != want) return false;
  return true;
}

Rat pow2inv(std::size_t k) { return rat(Nat(1), Nat(1) << static_cast<mp_bitcnt_t>(k)); }

// 1
void gen_uniform_exact(Check& c) {
  for (unsigned N : {2u, 3u, 5u, 7u})
    for (Rat delta : {rat(1, 2), rat(1, 4)}) {
      auto law = oracle::enumerate_tapes<Nat>([&](CoinSource& s) { return gen_uniform(s, Nat(N), delta); });
      c.expect(uniform(law, N), "gen_uniform N=" + std::to_string(N) + " not uniform");
      c.expect(law.fail < delta, "gen_uniform N=" + std::to_string(N) + " fails too often");
    }
}

// 2
void dfa_sampler(Check& c) {
  for (const char* f : {"no_bb.dfa", "even_a.dfa", "mod3.dfa", "cdstar.dfa", "ab.dfa"}) {
    Dfa A = parse_dfa(test_data(f));
    auto t = dfa_census(A, 3);
    for (std::size_t n = 1; n <= 3; ++n) {
      if (t.at(A.start, n) == 0) continue;
      std::size_t kappa = dfa_kappa(n);
      auto law = oracle::enumerate_tapes<std::string>([&](CoinSource& s) { return dfa_sample(A, t, n, s, kappa); });
      c.expect(uniform(law, t.at(A.start, n).get_ui()), std::string(f) + " not uniform at n=" + std::to_string(n));
      c.expect(law.fail <= rat(Nat(n), Nat(1) << static_cast<mp_bitcnt_t>(kappa)), std::string(f) + " failure bound");
    }
  }
  const std::size_t n = 8, samples = 10000;
  for (const char* f : {"no_bb.dfa", "even_a.dfa", "mod3.dfa"}) {
    Dfa A = parse_dfa(test_data(f));
    auto t = dfa_census(A, n);
    std::size_t cells = t.at(A.start, n).get_ui();
    std::vector<std::size_t> counts(cells, 0);
    std::size_t fails = 0;
    CoinSource src(20240601);
    for (std::size_t i = 0; i < samples; ++i) {
      auto w = dfa_sample(A, t, n, src, dfa_kappa(n));
      if (!w) {
        ++fails;
        continue;
      }
      counts[dfa_slice_rank(A, *w).get_ui() - 1]++;
    }
    double p = oracle::chi_square_uniform_p(counts);
    c.note << f << " p=" << p << " fail=" << fails << "; ";
    c.expect(p > 0.01, std::string(f) + " chi-square");
    c.expect(Rat(static_cast<unsigned long>(fails)) / Rat(static_cast<unsigned long>(samples)) <=
                 rat(Nat(n), Nat(1) << static_cast<mp_bitcnt_t>(dfa_kappa(n))),
             std::string(f) + " measured failure rate");
  }
}

// 3
void rank_roundtrip(Check& c) {
  for (const char* f : {"cdstar.dfa", "no_bb.dfa", "even_a.dfa", "mod3.dfa", "ab.dfa"}) {
    Dfa A = parse_dfa(test_data(f));
    for (std::size_t n = 0; n <= 8; ++n)
      for (const auto& w : oracle::words(A.alphabet, n)) {
        if (!A.accepts(w)) continue;
        Nat r = dfa_rank(A, w);
        c.expect(r == oracle::dfa_rank(A, w), std::string(f) + " rank of " + w);
        c.expect(dfa_unrank(A, r) == w, std::string(f) + " unrank(rank(" + w + "))");
        c.expect(dfa_rank(A, dfa_unrank(A, r)) == r, std::string(f) + " rank(unrank)");
      }
  }
}

Nfa parallel_paths(std::size_t copies) {
  // `copies` disjoint copies of "no two consecutive b" plus one copy of "ends in a"
  Dfa nobb = parse_dfa(test_data("no_bb.dfa"));
  Dfa enda = parse_dfa("states 2\nalphabet a b\nstart 0\nfinals 1\ntrans 0 a 1\ntrans 0 b 0\ntrans 1 a 1\ntrans 1 b 0\n");
  std::vector<Nfa> parts;
  for (std::size_t i = 0; i < copies; ++i) parts.push_back(nfa_from_dfa(nobb));
  parts.push_back(nfa_from_dfa(enda));
  Nfa out;
  out.alphabet = nobb.alphabet;
  for (const auto& p : parts) out.dim += p.dim;
  out.M.assign(2, std::vector<Nat>(out.dim * out.dim, 0));
  out.pi.assign(out.dim, 0);
  out.eta.assign(out.dim, 0);
  std::size_t off = 0;
  for (const auto& p : parts) {
    for (std::size_t a = 0; a < 2; ++a)
      for (std::size_t i = 0; i < p.dim; ++i)
        for (std::size_t j = 0; j < p.dim; ++j) out.M[a][(off + i) * out.dim + off + j] = p.M[a][i * p.dim + j];
    for (std::size_t i = 0; i < p.dim; ++i) {
      out.pi[off + i] = p.pi[i];
      out.eta[off + i] = p.eta[i];
    }
    off += p.dim;
  }
  out.ambiguity = copies + 1;
  return out;
}

// 4
void kronecker(Check& c) {
  std::vector<Nfa> autos{parse_nfa(test_data("amb2.nfa")), nfa_from_dfa(parse_dfa(test_data("mod3.dfa"))),
                         nfa_from_dfa(parse_dfa(test_data("even_a.dfa"))), parallel_paths(1), parallel_paths(2)};
  auto three = parse_nfa(test_data("amb2.nfa"));
  three.ambiguity = 3;
  autos.push_back(three);
  for (std::size_t i = 0; i < autos.size(); ++i) {
    const Nfa& A = autos[i];
    auto q = build_q(A.ambiguity);
    for (std::size_t n = 1; n <= 4; ++n) {
      Rat viaq = 0;
      Nat words = 0, paths = 0;
      for (const auto& w : oracle::words(A.alphabet, n)) {
        Nat pc = oracle::path_count(A, w);
        viaq += q(Rat(pc));
        words += pc > 0;
        paths += pc;
        c.expect(nfa_rank_slice(A, w) == oracle::nfa_slice_rank(A, w), "automaton " + std::to_string(i) + " rank of " + w);
      }
      c.expect(viaq == Rat(words), "q-correction automaton " + std::to_string(i));
      c.expect(nfa_slice_census(A, n) == words, "slice census automaton " + std::to_string(i));
      if (i == 0 && n == 4) c.note << "amb2 n=4 words=" << words << " paths=" << paths << "; ";
    }
  }
}

// 5
void earley(Check& c) {
  std::vector<CnfGrammar> gs;
  for (const char* f : {"catalan.cfg", "anbn.cfg", "dyck.cfg", "expr.cfg", "palin.cfg"})
    gs.push_back(to_cnf(parse_grammar(test_data(f))));
  gs.push_back(to_cnf(parse_grammar(test_data("l2.cfg")), CnfOptions{true}));
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const auto& g = gs[i];
    auto t = tree_census_table(g, 8);
    for (std::size_t n = 1; n <= 8; ++n) {
      Nat sum = 0;
      for (const auto& w : oracle::words(g.terminals, n)) {
        Nat e = earley_count(g, w);
        sum += e;
        if (n <= 6) c.expect(e == oracle::leftmost_derivations(g, w), "grammar " + std::to_string(i) + " word " + w);
      }
      c.expect(sum == t.at(g.start, n), "grammar " + std::to_string(i) + " census at n=" + std::to_string(n));
    }
  }
  std::vector<unsigned> cat{1, 1, 2, 5, 14};
  for (std::size_t n = 1; n <= 5; ++n) c.expect(earley_count(gs[0], std::string(n, 'a')) == cat[n - 1], "catalan");
}

// 6
void random_tree_law(Check& c) {
  std::vector<CnfGrammar> gs;
  for (const char* f : {"catalan.cfg", "anbn.cfg", "dyck.cfg", "expr.cfg", "palin.cfg"})
    gs.push_back(to_cnf(parse_grammar(test_data(f))));
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const auto& g = gs[i];
    auto t = tree_census_table(g, 3);
    for (std::size_t n = 1; n <= 3; ++n) {
      if (t.at(g.start, n) == 0) continue;
      auto law = oracle::enumerate_tapes<DerivationTree>(
          [&](CoinSource& s) { return random_tree(g, t, n, s, tree_kappa(n)); });
      c.expect(uniform(law, t.at(g.start, n).get_ui()), "grammar " + std::to_string(i) + " n=" + std::to_string(n));
    }
  }
  for (std::size_t n = 1; n <= 8; ++n) {
    const auto& g = gs[0];
    auto t = tree_census_table(g, n);
    std::size_t fails = 0, runs = 4000;
    CoinSource src(77 + n);
    for (std::size_t i = 0; i < runs; ++i) fails += !random_tree(g, t, n, src, tree_kappa(n)).has_value();
    Rat rate = Rat(static_cast<unsigned long>(fails)) / Rat(static_cast<unsigned long>(runs));
    c.expect(rate <= Rat(static_cast<unsigned long>(2 * n - 1)) * pow2inv(tree_kappa(n)), "failure rate at n=" + std::to_string(n));
    if (n == 8) c.note << "catalan n=8 failure rate " << rate.get_d() << "; ";
  }
}

// 7
void dnf(Check& c) {
  auto d = dnf_description(parse_dnf("2 2\n1 0\n1 2 0\n"));
  for (std::size_t trials : {1u, 2u}) {
    auto law = oracle::enumerate_tapes<std::string>([&](CoinSource& s) { return sample_described(d, 2, s, trials).value; });
    c.expect(uniform(law, 2) && law.prob.count("10") && law.prob.count("11"), "sampler law");
  }
  std::size_t inside = 0, exact = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    CoinSource s(seed);
    auto rep = estimate_census(d, 2, rat(1, 4), s);
    inside += rep.value && *rep.value >= rat(3, 2) && *rep.value <= rat(5, 2);
    CoinSource t(seed);
    exact += exact_count(d, 2, t, 1000).value == Nat(2);
  }
  c.note << "estimate coverage " << inside << "/1000, exact " << exact << "/1000; ";
  c.expect(inside >= 750, "estimate coverage");
  c.expect(exact > 750, "exact count frequency");
}

// 8
void pda(Check& c) {
  for (const char* f : {"anbn.pda", "amb2.pda"}) {
    Pda M = parse_pda(test_data(f));
    for (std::size_t n = 1; n <= 6; ++n) {
      auto g = build_slice_grammar(M, n);
      for (const auto& w : oracle::words(M.input, n)) {
        Nat comps = oracle::pda_computations(M, w, 8 * (n + 2));
        Nat d = g.cnf.production_count() == 0 ? Nat(0) : earley_count(g.cnf, w);
        c.expect((d > 0) == (comps > 0), std::string(f) + " language at " + w);
        if (n <= 5) c.expect(d <= comps, std::string(f) + " derivations exceed computations at " + w);
      }
      if (n == 6) c.note << f << " G_6 productions " << g.stats.cnf_productions << "; ";
    }
  }
}

// 9
void traces(Check& c) {
  Dfa L = parse_dfa(test_data("trace.dfa"));
  auto T = IndepAlphabet::of(L);
  for (std::size_t n = 1; n <= 7; ++n) {
    std::set<std::string> classes;
    Nat members = 0;
    for (const auto& x : oracle::words(T.sigma(), n)) {
      c.expect(count_representatives(L, x, T) == oracle::representatives(L, x, T), "representatives of " + x);
      if (L.accepts(x)) {
        ++members;
        classes.insert(normal_form(x, T));
      }
    }
    Nat sum = 0;
    for (const auto& t : classes) sum += count_representatives(L, t, T);
    c.expect(sum == members, "partition identity at n=" + std::to_string(n));
  }
}

// 10
void derandomization(Check& c) {
  CoinSource g(2718);
  auto pick = [&](std::size_t k) { return static_cast<std::size_t>(g.draw_bits(16).get_ui() % k); };
  for (int round = 0; round < 100; ++round) {
    std::size_t n = 3 + pick(10), m = 1 + pick(20);
    std::vector<Clause> cl;
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::size_t> vs;
      while (vs.size() < 3) {
        std::size_t v = pick(n);
        if (std::find(vs.begin(), vs.end(), v) == vs.end()) vs.push_back(v);
      }
      Clause k;
      for (auto v : vs) k.lits.push_back(Literal{v, g.draw_bit()});
      cl.push_back(k);
    }
    auto p = max_sat_problem(n, cl);
    Rat expect = oracle::expectation(p, "");
    std::string a = derandomize(p);
    c.expect(Rat(eval_circuit_bits(p.objective, a)) >= expect, "instance " + std::to_string(round));
    for (std::size_t k = 0; k <= n; ++k) {
      std::string prefix = a.substr(0, k);
      Rat here = cond_expectation(p, prefix);
      c.expect(here == oracle::expectation(p, prefix), "conditional expectation");
      if (k < n) c.expect(here == (cond_expectation(p, prefix + '0') + cond_expectation(p, prefix + '1')) / 2, "tower property");
    }
  }
  for (std::size_t m = 1; m <= 4; ++m) {
    std::vector<Clause> cl;
    for (std::size_t i = 0; i < m; ++i) cl.push_back(Clause{{{3 * i, true}, {3 * i + 1, false}, {3 * i + 2, true}}});
    auto p = max_sat_problem(3 * m, cl);
    c.expect(eval_circuit_bits(p.objective, derandomize(p)) >= (7 * m + 7) / 8, "disjoint clauses m=" + std::to_string(m));
  }
  std::size_t v = 0;
  auto edges = parse_graph(test_data("k3.graph"), v);
  auto cut = max_cut_problem(v, edges);
  c.expect(eval_circuit_bits(cut.objective, derandomize(cut)) == 2, "K3 cut");
}

// 11
void permanents(Check& c) {
  auto check = [&](const Matrix01& A) {
    Nat b = permanent(A, PermMethod::Bruteforce);
    c.expect(b == oracle::permanent(A), "bruteforce vs expansion");
    c.expect(permanent(A, PermMethod::Coefficient) == b, "coefficient method");
    c.expect(permanent(A, PermMethod::Fraction) == b, "fraction method");
  };
  for (std::size_t n = 1; n <= 4; ++n)
    for (std::uint64_t bits = 0; bits < (1ull << (n * n)); ++bits) {
      Matrix01 A;
      A.n = n;
      for (std::size_t i = 0; i < n * n; ++i) A.a.push_back(static_cast<std::uint8_t>((bits >> i) & 1));
      check(A);
    }
  CoinSource g(31);
  for (int r = 0; r < 20; ++r) {
    Matrix01 A;
    A.n = 5;
    for (std::size_t i = 0; i < 25; ++i) A.a.push_back(g.draw_bit());
    check(A);
  }
}

// 12
std::pair<int, std::string> run(const std::string& cmd) {
  std::string out;
  FILE* p = popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return {-1, ""};
  std::array<char, 4096> buf;
  std::size_t k;
  while ((k = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), k);
  int status = pclose(p);
  return {status, out};
}

void determinism(Check& c) {
  const std::string cli = RGEN_CLI;
  const std::string d = std::string(RGEN_TEST_DATA) + "/";
  const std::vector<std::string> cmds{
      "dfa count -a " + d + "no_bb.dfa -n 12",
      "dfa sample -a " + d + "no_bb.dfa -n 16 --seed 9 --repeat 4",
      "dfa rank -a " + d + "cdstar.dfa -w cddd",
      "dfa unrank -a " + d + "mod3.dfa -k 40",
      "nfa count -a " + d + "amb2.nfa -n 6",
      "nfa sample -a " + d + "amb2.nfa -n 5 --seed 3 --format json",
      "nfa rank -a " + d + "amb2.nfa -w abab",
      "nfa unrank -a " + d + "amb2.nfa -k 17",
      "cfg grammar -g " + d + "l2.cfg --drop-epsilon",
      "cfg count -g " + d + "catalan.cfg -n 6",
      "cfg count -g " + d + "expr.cfg -w x+x*x",
      "cfg sample -g " + d + "expr.cfg -n 7 --bound 0,0,5 --seed 4",
      "cfg sample -g " + d + "catalan.cfg -n 6 --tree --seed 2",
      "cfg estimate -g " + d + "l2.cfg --drop-epsilon -n 6 --bound 1,1,1 --seed 5",
      "cfg exact -g " + d + "dyck.cfg -n 6 --seed 6",
      "pda grammar -m " + d + "amb2.pda -n 3",
      "pda count -m " + d + "amb2.pda -w aabb",
      "pda sample -m " + d + "amb2.pda -n 4 --bound 0,0,2 --seed 8 --repeat 3",
      "pda estimate -m " + d + "dyck.pda -n 6 --seed 8",
      "pda exact -m " + d + "anbn.pda -n 6",
      "trace count -a " + d + "trace.dfa -n 5",
      "trace count -a " + d + "trace.dfa -w acbc",
      "trace normal -a " + d + "trace.dfa -w bac",
      "trace sample -a " + d + "trace.dfa -n 6 --bound 1,1,1 --seed 10",
      "trace estimate -a " + d + "trace.dfa -n 5 --bound 1,1,1 --seed 10",
      "trace exact -a " + d + "trace.dfa -n 4 --bound 1,1,1 --seed 10",
      "pb perm -m " + d + "cycle3.mat --method fraction",
      "pb derand --cnf " + d + "e3sat.cnf",
      "pb search --graph " + d + "k3.graph --method random --seed 12",
      "pb search --cnf " + d + "e3sat.cnf --method eg --radius 2",
      "dnf sample -a " + d + "dnf_x1.dnf --seed 13 --repeat 5",
      "dnf estimate -a " + d + "dnf_x1.dnf --seed 13",
      "dnf exact -a " + d + "dnf_x1.dnf --seed 13 --format json",
  };
  for (const auto& cmd : cmds) {
    auto a = run(cli + " " + cmd);
    auto b = run(cli + " " + cmd);
    c.expect(a == b, "differs across runs: " + cmd);
    c.expect(a.first == 0, "nonzero exit: " + cmd + " -> " + a.second);
  }
  c.note << cmds.size() << " commands; ";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<void(Check&)> run;
    double limit;  // seconds, 0 for none
  };
  std::vector<Criterion> all{
      {1, "gen_uniform exact uniformity", gen_uniform_exact, 1},
      {2, "DFA sampler uniformity and failure bound", dfa_sampler, 10},
      {3, "rank/unrank roundtrip", rank_roundtrip, 0},
      {4, "Kronecker slice ranking", kronecker, 0},
      {5, "Earley multiplicities", earley, 30},
      {6, "random derivation trees", random_tree_law, 0},
      {7, "DNF description sampler and estimators", dnf, 0},
      {8, "PDA slice grammar", pda, 0},
      {9, "trace representatives", traces, 0},
      {10, "derandomization", derandomization, 0},
      {11, "permanent methods", permanents, 60},
      {12, "CLI determinism", determinism, 0},
  };
  int failures = 0;
  for (const auto& cr : all) {
    Check c;
    auto t0 = std::chrono::steady_clock::now();
    try {
      cr.run(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit > 0 && secs >= cr.limit) c.expect(false, "over the time limit");
    failures += !c.ok;
    std::printf("criterion %2d %s  %s (%.2fs, %zu checks) %s\n", cr.id, c.ok ? "PASS" : "FAIL", cr.name, secs, c.checks,
                c.note.str().c_str());
    std::fflush(stdout);
  }
  return failures;
}
