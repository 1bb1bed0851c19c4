#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "oracles.hpp"
#include "rgen/cfl.hpp"
#include "rgen/errors.hpp"
#include "rgen/framework.hpp"
#include "rgen/numutil.hpp"
#include "rgen/pdagram.hpp"
#include "rgen/pseudobool.hpp"
#include "rgen/rankauto.hpp"
#include "rgen/regular.hpp"
#include "rgen/textio.hpp"
#include "rgen/traces.hpp"

using namespace rgen;

namespace {

struct Options {
  std::string family, verb;
  std::string input, cnf_file, graph_file;
  std::size_t n = 0;
  bool have_n = false;
  std::optional<std::string> word;
  std::string rank;
  std::uint64_t seed = 1;
  std::string delta = "1/4", epsilon = "1/4";
  std::optional<std::size_t> trials;
  std::size_t ceiling = 1u << 16;
  std::string format = "text";
  bool oracle = false;
  std::size_t repeat = 1;
  std::string bound = "1,0,0";
  bool tree = false;
  std::string method;
  std::size_t radius = 1;
  std::string goal = "max";
  bool drop_epsilon = false;
  std::size_t max_steps = 0;
  std::size_t validate = 0;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OracleStatus { None, Ok, Mismatch, Note };

struct Result {
  std::optional<std::string> value;  // nullopt is a failed run
  std::vector<std::pair<std::string, std::string>> stats;
  std::vector<std::string> extra;  // further text lines
  OracleStatus oracle = OracleStatus::None;
  std::string oracle_msg;
};

Rat parse_rat(const std::string& s, const char* what) {
  Rat r;
  auto dot = s.find('.');
  try {
    if (dot == std::string::npos) {
      r = Rat(s);
    } else {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      Nat den = 1;
      for (std::size_t i = dot + 1; i < s.size(); ++i) den *= 10;
      r = Rat(Nat(digits), den);
    }
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("bad rational for ") + what + ": " + s);
  }
  r.canonicalize();
  if (r <= 0 || r >= 1) throw UsageError(std::string(what) + " must lie strictly between 0 and 1");
  return r;
}

PolyBound parse_bound(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("--bound expects k1,exp,k2");
  try {
    PolyBound b;
    b.k1 = Nat(parts[0]);
    b.exp = static_cast<unsigned>(std::stoul(parts[1]));
    b.k2 = Nat(parts[2]);
    if (b.k1 < 0 || b.k2 < 0) throw std::invalid_argument("negative");
    return b;
  } catch (const std::exception&) {
    throw UsageError("--bound expects non-negative integers k1,exp,k2");
  }
}

Nat parse_nat(const std::string& s, const char* what) {
  try {
    Nat k(s);
    if (k < 0) throw std::invalid_argument("negative");
    return k;
  } catch (const std::invalid_argument&) {
    throw UsageError(std::string("bad integer for ") + what + ": " + s);
  }
}

std::string fmt_rat(const Rat& r) { return r.get_den() == 1 ? r.get_num().get_str() : r.get_str(); }

const std::string& need_input(const Options& o) {
  if (o.input.empty()) throw UsageError(o.family + " " + o.verb + " needs an input file");
  return o.input;
}

std::size_t need_n(const Options& o) {
  if (!o.have_n) throw UsageError(o.family + " " + o.verb + " needs -n");
  return o.n;
}

const std::string& need_word(const Options& o) {
  if (!o.word) throw UsageError(o.family + " " + o.verb + " needs -w");
  return *o.word;
}

void check(Result& r, bool ok, const std::string& msg) {
  r.oracle = ok ? OracleStatus::Ok : OracleStatus::Mismatch;
  r.oracle_msg = msg;
}

bool small(const Alphabet& sigma, std::size_t n, std::size_t cap = 1u << 16) {
  double total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<double>(sigma.size());
  return total <= static_cast<double>(cap);
}

void skip(Result& r) {
  r.oracle = OracleStatus::Note;
  r.oracle_msg = "skipped: input too large for brute force";
}

template <class S>
void add_sample_stats(Result& r, const SampleReport<S>& rep) {
  r.stats.emplace_back("trials", std::to_string(rep.trials_used) + "/" + std::to_string(rep.trials_max));
  r.stats.emplace_back("bits", std::to_string(rep.bits_used));
}

void add_estimate_stats(Result& r, const EstimateReport& rep) {
  r.stats.emplace_back("trials", std::to_string(rep.trials_used));
  r.stats.emplace_back("successes", std::to_string(rep.successes));
  r.stats.emplace_back("bits", std::to_string(rep.bits_used));
}

void add_count_stats(Result& r, const CountReport& rep) {
  r.stats.emplace_back("trials", std::to_string(rep.trials_used));
  r.stats.emplace_back("bits", std::to_string(rep.bits_used));
}

void add_bits(Result& r, const CoinSource& src) { r.stats.emplace_back("bits", std::to_string(src.bits_consumed())); }

// Runs the estimate/exact/sample verbs shared by every description-backed family.
template <class T>
Result described(const Options& o, const Description<T, std::string>& d, CoinSource& src,
                 const std::function<Nat(std::size_t)>& brute_census) {
  Result r;
  std::size_t n = need_n(o);
  if (o.verb == "sample") {
    auto rep = sample_described(d, n, src, o.trials);
    add_sample_stats(r, rep);
    r.value = rep.value;
    if (o.oracle && rep.value) {
      Nat m = d.ambiguity(*rep.value);
      check(r, rep.value->size() == n && m >= 1, "preimages " + m.get_str());
    }
  } else if (o.verb == "estimate") {
    Rat eps = parse_rat(o.epsilon, "--epsilon");
    auto rep = estimate_census(d, n, eps, src, o.trials);
    add_estimate_stats(r, rep);
    if (rep.value) {
      r.value = fmt_rat(*rep.value);
      std::ostringstream approx;
      approx.precision(8);
      approx << rep.value->get_d();
      r.stats.emplace_back("approx", approx.str());
    }
    if (o.oracle && rep.value) {
      Nat exact = brute_census(n);
      Rat lo = Rat(exact) * (1 - eps), hi = Rat(exact) * (1 + eps);
      bool inside = *rep.value >= lo && *rep.value <= hi;
      r.oracle = inside ? OracleStatus::Ok : OracleStatus::Note;
      r.oracle_msg = "exact " + exact.get_str() + (inside ? ", within tolerance" : ", outside tolerance");
    }
  } else if (o.verb == "exact") {
    auto rep = exact_count(d, n, src, Nat(static_cast<unsigned long>(o.ceiling)), o.trials);
    add_count_stats(r, rep);
    if (rep.value) r.value = rep.value->get_str();
    if (o.oracle && rep.value) {
      Nat exact = brute_census(n);
      bool same = exact == *rep.value;
      r.oracle = same ? OracleStatus::Ok : OracleStatus::Note;
      r.oracle_msg = "exact " + exact.get_str();
    }
  } else {
    throw UsageError("unknown verb " + o.verb + " for " + o.family);
  }
  return r;
}

Result run_dfa(const Options& o, CoinSource& src) {
  Dfa A = parse_dfa(read_file(need_input(o)));
  Result r;
  if (o.verb == "count") {
    std::size_t n = need_n(o);
    Nat c = dfa_census(A, n).at(A.start, n);
    r.value = c.get_str();
    if (o.oracle) {
      if (small(A.alphabet, n)) {
        Nat b = oracle::dfa_slice_count(A, n);
        check(r, b == c, "brute " + b.get_str());
      } else {
        skip(r);
      }
    }
  } else if (o.verb == "sample") {
    std::size_t n = need_n(o);
    if (dfa_census(A, n).at(A.start, n) == 0) throw EmptySlice();
    auto w = dfa_sample(A, n, src);
    add_bits(r, src);
    r.value = w;
    if (o.oracle && w) check(r, w->size() == n && A.accepts(*w), "membership");
  } else if (o.verb == "rank") {
    const std::string& w = need_word(o);
    if (!A.accepts(w)) throw EmptyLanguage("word " + w + " is not in the language");
    Nat k = dfa_rank(A, w);
    r.value = k.get_str();
    if (o.oracle) {
      if (small(A.alphabet, w.size())) {
        Nat b = oracle::dfa_rank(A, w);
        check(r, b == k, "brute " + b.get_str());
      } else {
        skip(r);
      }
    }
  } else if (o.verb == "unrank") {
    Nat k = parse_nat(o.rank, "-k");
    std::string w = dfa_unrank(A, k);
    r.value = w;
    if (o.oracle) {
      if (small(A.alphabet, w.size())) {
        Nat b = oracle::dfa_rank(A, w);
        check(r, b == k && A.accepts(w), "brute rank " + b.get_str());
      } else {
        skip(r);
      }
    }
  } else {
    throw UsageError("unknown verb " + o.verb + " for dfa");
  }
  return r;
}

Nat brute_nfa_census(const Nfa& A, std::size_t n) {
  Nat c = 0;
  for (const auto& w : oracle::words(A.alphabet, n))
    if (oracle::path_count(A, w) > 0) ++c;
  return c;
}

Result run_nfa(const Options& o, CoinSource& src) {
  Nfa A = parse_nfa(read_file(need_input(o)));
  Result r;
  if (o.verb == "count") {
    std::size_t n = need_n(o);
    Nat c = nfa_slice_census(A, n, o.ceiling);
    r.value = c.get_str();
    if (o.oracle) {
      if (small(A.alphabet, n)) {
        Nat b = brute_nfa_census(A, n);
        check(r, b == c, "brute " + b.get_str());
      } else {
        skip(r);
      }
    }
  } else if (o.verb == "sample") {
    std::size_t n = need_n(o);
    Nat census = nfa_slice_census(A, n, o.ceiling);
    auto rank = [&](std::string_view w) { return nfa_rank_slice(A, w, o.ceiling, false); };
    auto w = rank_sampler(rank, census, A.alphabet, n, src, parse_rat(o.delta, "--delta"));
    add_bits(r, src);
    r.value = w;
    if (o.oracle && w) check(r, oracle::path_count(A, *w) > 0, "membership");
  } else if (o.verb == "rank" || o.verb == "unrank") {
    std::string w;
    Nat k;
    if (o.verb == "rank") {
      w = need_word(o);
      if (path_count(A, w) == 0) throw EmptyLanguage("word " + w + " is not in the language");
      k = nfa_rank(A, w, o.ceiling);
      r.value = k.get_str();
    } else {
      k = parse_nat(o.rank, "-k");
      w = nfa_unrank(A, k, 64, o.ceiling);
      r.value = w;
    }
    if (o.oracle) {
      if (small(A.alphabet, w.size())) {
        Nat b = oracle::nfa_slice_rank(A, w);
        for (std::size_t l = 0; l < w.size(); ++l) b += brute_nfa_census(A, l);
        check(r, b == k && oracle::path_count(A, w) > 0, "brute rank " + b.get_str());
      } else {
        skip(r);
      }
    }
  } else {
    throw UsageError("unknown verb " + o.verb + " for nfa");
  }
  return r;
}

Nat brute_word_census(const CnfGrammar& g, std::size_t n) {
  Nat c = 0;
  for (const auto& w : oracle::words(g.terminals, n))
    if (oracle::leftmost_derivations(g, w) > 0) ++c;
  return c;
}

Result run_grammar_verbs(const Options& o, const CnfGrammar& g, CoinSource& src) {
  Result r;
  if (o.verb == "count") {
    if (o.word) {
      Nat c = earley_count(g, *o.word);
      r.value = c.get_str();
      if (o.oracle) {
        Nat b = oracle::leftmost_derivations(g, *o.word);
        check(r, b == c, "leftmost derivations " + b.get_str());
      }
      return r;
    }
    std::size_t n = need_n(o);
    Nat c = tree_census(g, g.start, n);
    r.value = c.get_str();
    if (o.oracle) {
      if (small(g.terminals, n, 1u << 12)) {
        Nat b = 0;
        for (const auto& w : oracle::words(g.terminals, n)) b += oracle::leftmost_derivations(g, w);
        check(r, b == c, "sum of leftmost derivations " + b.get_str());
      } else {
        skip(r);
      }
    }
    return r;
  }
  if (o.verb == "sample" && o.tree) {
    std::size_t n = need_n(o);
    if (tree_census(g, g.start, n) == 0) throw EmptySlice();
    auto t = random_tree(g, n, src);
    add_bits(r, src);
    if (t) {
      r.value = tree_yield(g, *t);
      r.extra.push_back(format_tree(g, *t));
      if (o.oracle) check(r, oracle::leftmost_derivations(g, *r.value) > 0, "yield derivable");
    }
    return r;
  }
  Description<DerivationTree, std::string> d = cfl_description(g, parse_bound(o.bound));
  if (o.validate) validate_cfl_ambiguity(g, d.bound, o.validate);
  return described(o, d, src, [&](std::size_t n) { return brute_word_census(g, n); });
}

Result run_cfg(const Options& o, CoinSource& src) {
  Grammar raw = parse_grammar(read_file(need_input(o)));
  CnfGrammar g = to_cnf(raw, CnfOptions{o.drop_epsilon});
  if (o.verb == "grammar") {
    Result r;
    r.value = std::to_string(g.vars.size()) + " variables, " + std::to_string(g.production_count()) + " productions";
    std::string text = format_cnf(g);
    std::stringstream ss(text);
    for (std::string line; std::getline(ss, line);) r.extra.push_back(line);
    return r;
  }
  return run_grammar_verbs(o, g, src);
}

std::size_t pda_steps(const Options& o, std::size_t n) { return o.max_steps ? o.max_steps : 8 * (n + 2); }

Result run_pda(const Options& o, CoinSource& src) {
  Pda M = parse_pda(read_file(need_input(o)));
  Result r;
  if (o.verb == "count" && o.word) {
    std::size_t steps = pda_steps(o, o.word->size());
    Nat c = pda_count_computations(M, *o.word, steps);
    r.value = c.get_str();
    if (o.oracle) {
      Nat b = oracle::pda_computations(M, *o.word, steps);
      check(r, b == c, "breadth-first count " + b.get_str());
    }
    return r;
  }
  std::size_t n = need_n(o);
  SliceGrammar sg = build_slice_grammar(M, n);
  if (o.verb == "grammar") {
    const auto& s = sg.stats;
    r.value = std::to_string(s.cnf_variables) + " variables, " + std::to_string(s.cnf_productions) + " productions";
    r.stats = {{"configs", std::to_string(s.configs)},
               {"candidates", std::to_string(s.candidate_nonterminals)},
               {"productive", std::to_string(s.productive)},
               {"reachable", std::to_string(s.reachable)},
               {"productions", std::to_string(s.productions)}};
    std::stringstream ss(format_cnf(sg.cnf));
    for (std::string line; std::getline(ss, line);) r.extra.push_back(line);
    if (o.oracle) {
      if (small(M.input, n, 1u << 12)) {
        bool ok = true;
        for (const auto& w : oracle::words(M.input, n))
          ok = ok && ((earley_count(sg.cnf, w) > 0) == (oracle::pda_computations(M, w, pda_steps(o, n)) > 0));
        check(r, ok, "slice language against direct simulation");
      } else {
        skip(r);
      }
    }
    return r;
  }
  if (o.validate) validate_pda_ambiguity(M, parse_bound(o.bound), o.validate, pda_steps(o, o.validate));
  if (o.verb == "count") return run_grammar_verbs(o, sg.cnf, src);
  Description<DerivationTree, std::string> d = cfl_description(sg.cnf, parse_bound(o.bound));
  return described(o, d, src, [&](std::size_t len) {
    Nat c = 0;
    for (const auto& w : oracle::words(M.input, len))
      if (oracle::pda_computations(M, w, pda_steps(o, len)) > 0) ++c;
    return c;
  });
}

Result run_trace(const Options& o, CoinSource& src) {
  Dfa L = parse_dfa(read_file(need_input(o)));
  IndepAlphabet A = IndepAlphabet::of(L);
  Result r;
  if (o.verb == "count") {
    if (o.word) {
      Nat c = count_representatives(L, *o.word, A);
      r.value = c.get_str();
      if (o.oracle) {
        Nat b = oracle::representatives(L, *o.word, A);
        check(r, b == c, "swap closure " + b.get_str());
      }
      return r;
    }
    std::size_t n = need_n(o);
    Nat c = trace_census_exact(L, A, n, Nat(static_cast<unsigned long>(o.ceiling)));
    r.value = c.get_str();
    if (o.oracle) {
      if (small(L.alphabet, n)) {
        std::set<std::string> nf;
        for (const auto& w : oracle::words(L.alphabet, n))
          if (L.accepts(w)) nf.insert(*oracle::trace_class(w, A).begin());
        check(r, Nat(static_cast<unsigned long>(nf.size())) == c, "distinct classes " + std::to_string(nf.size()));
      } else {
        skip(r);
      }
    }
    return r;
  }
  if (o.verb == "normal") {
    r.value = normal_form(need_word(o), A);
    if (o.oracle) check(r, *oracle::trace_class(*o.word, A).begin() == *r.value, "least word of the swap closure");
    return r;
  }
  PolyBound D = parse_bound(o.bound);
  if (o.validate) validate_trace_ambiguity(L, A, D, o.validate);
  auto d = trace_description(L, A, D);
  return described(o, d, src, [&](std::size_t n) {
    return trace_census_exact(L, A, n, Nat(static_cast<unsigned long>(o.ceiling)));
  });
}

Result run_dnf(const Options& o, CoinSource& src) {
  DnfFormula f = parse_dnf(read_file(need_input(o)));
  auto d = dnf_description(f);
  Options fixed = o;
  fixed.have_n = true;
  fixed.n = f.vars;
  return described(fixed, d, src, [&](std::size_t) {
    Nat c = 0;
    for (std::uint64_t m = 0; m < (std::uint64_t(1) << f.vars); ++m) {
      std::string a(f.vars, '0');
      for (std::size_t i = 0; i < f.vars; ++i)
        if (m >> i & 1) a[i] = '1';
      for (const auto& cl : f.clauses)
        if (satisfies(cl, a)) {
          ++c;
          break;
        }
    }
    return c;
  });
}

PbProblem load_problem(const Options& o) {
  PbProblem p;
  int sources = !o.input.empty() + !o.cnf_file.empty() + !o.graph_file.empty();
  if (sources != 1) throw UsageError("give exactly one of -c/--circuit, --cnf, --graph");
  if (!o.cnf_file.empty()) {
    std::size_t vars = 0;
    auto clauses = parse_cnf_instance(read_file(o.cnf_file), vars);
    p = max_sat_problem(vars, clauses);
  } else if (!o.graph_file.empty()) {
    std::size_t v = 0;
    auto edges = parse_graph(read_file(o.graph_file), v);
    p = max_cut_problem(v, edges);
  } else {
    p.objective = parse_circuit(read_file(o.input));
    p.n = p.objective.inputs;
  }
  if (o.goal == "min")
    p.goal = Goal::Min;
  else if (o.goal != "max")
    throw UsageError("--goal is max or min");
  return p;
}

Result run_pb(const Options& o, CoinSource& src) {
  Result r;
  if (o.verb == "perm") {
    Matrix01 A = parse_matrix(read_file(need_input(o)));
    std::string m = o.method.empty() ? "coefficient" : o.method;
    PermMethod method;
    if (m == "coefficient")
      method = PermMethod::Coefficient;
    else if (m == "fraction")
      method = PermMethod::Fraction;
    else if (m == "bruteforce")
      method = PermMethod::Bruteforce;
    else
      throw UsageError("--method is coefficient, fraction or bruteforce");
    Nat v = permanent(A, method);
    r.value = v.get_str();
    if (o.oracle) {
      Nat b = oracle::permanent(A);
      check(r, b == v, "Laplace expansion " + b.get_str());
    }
    return r;
  }
  PbProblem p = load_problem(o);
  if (p.n > 24) throw SizeGuard("more than 24 variables");
  auto report = [&](const std::string& a, const Int& v) {
    r.value = a;
    r.stats.emplace_back("objective", v.get_str());
    r.stats.emplace_back("expectation", fmt_rat(cond_expectation(p, "")));
  };
  if (o.verb == "derand") {
    std::string a = derandomize(p);
    Int v = eval_circuit_bits(p.objective, a);
    report(a, v);
    if (o.oracle) {
      Rat e = oracle::expectation(p, "");
      bool ok = p.goal == Goal::Max ? Rat(v) >= e : Rat(v) <= e;
      check(r, ok && e == cond_expectation(p, ""), "brute expectation " + fmt_rat(e));
    }
  } else if (o.verb == "search") {
    std::string m = o.method.empty() ? "random" : o.method;
    if (m == "random") {
      auto rep = random_search(p, parse_rat(o.epsilon, "--epsilon"), parse_rat(o.delta, "--delta"), src);
      report(rep.assignment, rep.value);
      r.stats.emplace_back("draws", std::to_string(rep.draws));
      add_bits(r, src);
    } else if (m == "local" || m == "eg") {
      LocalSearchReport rep = m == "eg" ? eg_solve(p, o.radius) : local_search(p, o.radius, std::string(p.n, '0'));
      report(rep.assignment, rep.value);
      r.stats.emplace_back("moves", std::to_string(rep.trajectory.size() - 1));
    } else {
      throw UsageError("--method is random, local or eg");
    }
    if (o.oracle) {
      Int best = oracle::optimum(p);
      r.oracle = OracleStatus::Note;
      r.oracle_msg = "optimum " + best.get_str();
    }
  } else {
    throw UsageError("unknown verb " + o.verb + " for pb");
  }
  return r;
}

Result run_once(const Options& o, std::uint64_t seed) {
  CoinSource src(seed);
  if (o.family == "dfa") return run_dfa(o, src);
  if (o.family == "nfa") return run_nfa(o, src);
  if (o.family == "cfg") return run_cfg(o, src);
  if (o.family == "pda") return run_pda(o, src);
  if (o.family == "trace") return run_trace(o, src);
  if (o.family == "pb") return run_pb(o, src);
  if (o.family == "dnf") return run_dnf(o, src);
  throw UsageError("unknown family " + o.family);
}

std::string render(const Options& o, const Result& r, std::uint64_t seed) {
  std::ostringstream out;
  const char* oracle_names[] = {"", "ok", "mismatch", "note"};
  if (o.format == "json") {
    nlohmann::ordered_json j;
    j["family"] = o.family;
    j["command"] = o.verb;
    j["seed"] = seed;
    j["value"] = r.value ? nlohmann::ordered_json(*r.value) : nlohmann::ordered_json(nullptr);
    j["failed"] = !r.value.has_value();
    for (const auto& [k, v] : r.stats) j[k] = v;
    if (!r.extra.empty()) j["detail"] = r.extra;
    if (r.oracle != OracleStatus::None) {
      j["oracle"] = oracle_names[static_cast<int>(r.oracle)];
      j["oracle_detail"] = r.oracle_msg;
    }
    out << j.dump() << "\n";
    return out.str();
  }
  out << (r.value ? *r.value : std::string("FAIL (⊥)")) << "\n";
  for (const auto& line : r.extra) out << line << "\n";
  if (!r.stats.empty()) {
    bool first = true;
    for (const auto& [k, v] : r.stats) {
      out << (first ? "" : " ") << k << " " << v;
      first = false;
    }
    out << " seed " << seed << "\n";
  }
  if (r.oracle != OracleStatus::None) out << "oracle " << oracle_names[static_cast<int>(r.oracle)] << ": " << r.oracle_msg << "\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uniform generation, ranking and counting for automata, grammars and pseudo-boolean problems"};
  Options o;
  app.add_option("family", o.family, "dfa, nfa, cfg, pda, trace, pb or dnf")->required();
  app.add_option("command", o.verb, "count, sample, rank, unrank, estimate, exact, grammar, normal, derand, search, perm")
      ->required();
  app.add_option("-a,-g,-m,-c,--input", o.input, "automaton, grammar, matrix, circuit or formula file");
  app.add_option("--cnf", o.cnf_file, "CNF instance for pb (MAX-SAT)");
  app.add_option("--graph", o.graph_file, "graph instance for pb (MAX-CUT)");
  auto* nopt = app.add_option("-n,--length", o.n, "size of the slice");
  app.add_option("-w,--word", o.word, "input word");
  app.add_option("-k,--rank", o.rank, "rank to invert");
  app.add_option("--seed", o.seed, "coin source seed")->capture_default_str();
  app.add_option("--delta", o.delta, "failure probability")->capture_default_str();
  app.add_option("--epsilon", o.epsilon, "relative tolerance")->capture_default_str();
  app.add_option("--trials", o.trials, "override the trial budget");
  app.add_option("--ceiling", o.ceiling, "size ceiling for exact counting and Kronecker lifts")->capture_default_str();
  app.add_option("--format", o.format, "text or json")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
  app.add_flag("--oracle", o.oracle, "check the result against brute force");
  app.add_option("--repeat", o.repeat, "independent runs with seeds seed, seed+1, ...")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--bound", o.bound, "ambiguity bound k1,exp,k2 meaning k1*n^exp+k2")->capture_default_str();
  app.add_flag("--tree", o.tree, "cfg sample: draw a derivation tree");
  app.add_option("--method", o.method, "perm: coefficient|fraction|bruteforce; search: random|local|eg");
  app.add_option("--radius", o.radius, "local search neighbourhood radius")->capture_default_str();
  app.add_option("--goal", o.goal, "max or min")->capture_default_str();
  app.add_flag("--drop-epsilon", o.drop_epsilon, "cfg: drop the empty word instead of rejecting the grammar");
  app.add_option("--max-steps", o.max_steps, "pda: move limit for direct simulation (default 8(n+2))");
  app.add_option("--validate", o.validate, "check the ambiguity bound on all lengths up to this one");
  CLI11_PARSE(app, argc, argv);
  o.have_n = nopt->count() > 0;

  std::vector<std::string> outputs(o.repeat);
  std::vector<int> codes(o.repeat, 0);
  auto job = [&](std::size_t i) {
    std::uint64_t seed = o.seed + i;
    try {
      Result r = run_once(o, seed);
      outputs[i] = render(o, r, seed);
      codes[i] = !r.value ? 2 : r.oracle == OracleStatus::Mismatch ? 3 : 0;
    } catch (const UsageError& e) {
      outputs[i] = std::string("error: ") + e.what() + "\n";
      codes[i] = 1;
    } catch (const rgen::Error& e) {
      outputs[i] = std::string("error: ") + e.what() + "\n";
      codes[i] = 1;
    } catch (const std::exception& e) {
      outputs[i] = std::string("error: ") + e.what() + "\n";
      codes[i] = 1;
    }
  };
  std::size_t workers = std::min<std::size_t>(o.repeat, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < o.repeat; i += workers) job(i);
    });
  for (auto& t : pool) t.join();

  int status = 0;
  for (std::size_t i = 0; i < o.repeat; ++i) {
    (codes[i] == 1 ? std::cerr : std::cout) << outputs[i];
    status = std::max(status, codes[i]);
  }
  return status;
}
