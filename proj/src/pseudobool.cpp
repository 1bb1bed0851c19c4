#include "rgen/pseudobool.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>

#include "rgen/errors.hpp"
#include "rgen/textio.hpp"

namespace rgen {

std::size_t Circuit::input(std::size_t var) {
  Node v;
  v.kind = Kind::Input;
  v.var = var;
  inputs = std::max(inputs, var + 1);
  nodes.push_back(v);
  return output = nodes.size() - 1;
}

std::size_t Circuit::constant(int value) {
  if (value < -1 || value > 1) throw std::invalid_argument("circuit constants are -1, 0 and 1");
  Node v;
  v.value = value;
  nodes.push_back(v);
  return output = nodes.size() - 1;
}

std::size_t Circuit::add(std::vector<std::size_t> args) {
  if (args.empty()) throw std::invalid_argument("add needs at least one argument");
  nodes.push_back(Node{Kind::Add, 0, 0, std::move(args)});
  return output = nodes.size() - 1;
}

std::size_t Circuit::mul(std::vector<std::size_t> args) {
  if (args.empty()) throw std::invalid_argument("mul needs at least one argument");
  nodes.push_back(Node{Kind::Mul, 0, 0, std::move(args)});
  return output = nodes.size() - 1;
}

std::size_t Circuit::depth() const {
  std::vector<std::size_t> d(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t a : nodes[i].args) d[i] = std::max(d[i], d[a] + 1);
  return nodes.empty() ? 0 : d[output];
}

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::map<std::string, std::size_t> ids;
  bool have_out = false;
  for (const Line& ln : tokenize(text)) {
    if (have_out) throw ParseError("'out' must be the last line", ln.no);
    if (ln.tok[0] == "out") {
      if (ln.tok.size() != 2) throw ParseError("usage: out id", ln.no);
      auto it = ids.find(ln.tok[1]);
      if (it == ids.end()) throw ParseError("unknown node " + ln.tok[1], ln.no);
      c.output = it->second;
      have_out = true;
      continue;
    }
    if (ln.tok.size() < 2) throw ParseError("expected 'id kind args...'", ln.no);
    const std::string& id = ln.tok[0];
    const std::string& kind = ln.tok[1];
    if (ids.count(id)) throw ParseError("duplicate node id " + id, ln.no);
    if (kind == "in") {
      if (ln.tok.size() != 3) throw ParseError("usage: id in k", ln.no);
      std::size_t k = parse_count(ln.tok[2], ln.no);
      if (k == 0) throw ParseError("inputs are numbered from 1", ln.no);
      c.input(k - 1);
    } else if (kind == "const") {
      if (ln.tok.size() != 3) throw ParseError("usage: id const v", ln.no);
      long v = parse_long(ln.tok[2], ln.no);
      if (v < -1 || v > 1) throw ParseError("constant must be -1, 0 or 1", ln.no);
      c.constant(static_cast<int>(v));
    } else if (kind == "add" || kind == "mul") {
      std::vector<std::size_t> args;
      for (std::size_t i = 2; i < ln.tok.size(); ++i) {
        auto it = ids.find(ln.tok[i]);
        if (it == ids.end()) throw ParseError("node " + ln.tok[i] + " used before definition", ln.no);
        args.push_back(it->second);
      }
      if (args.empty()) throw ParseError(kind + " needs arguments", ln.no);
      if (kind == "add")
        c.add(std::move(args));
      else
        c.mul(std::move(args));
    } else {
      throw ParseError("unknown node kind '" + kind + "'", ln.no);
    }
    ids[id] = c.nodes.size() - 1;
  }
  if (!have_out) throw ParseError("missing 'out' line");
  return c;
}

std::string format_circuit(const Circuit& c) {
  std::string out;
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& v = c.nodes[i];
    out += "n" + std::to_string(i);
    switch (v.kind) {
      case Circuit::Kind::Input: out += " in " + std::to_string(v.var + 1); break;
      case Circuit::Kind::Const: out += " const " + std::to_string(v.value); break;
      case Circuit::Kind::Add: out += " add"; break;
      case Circuit::Kind::Mul: out += " mul"; break;
    }
    for (std::size_t a : v.args) out += " n" + std::to_string(a);
    out += "\n";
  }
  out += "out n" + std::to_string(c.output) + "\n";
  return out;
}

namespace {

template <class V, class Leaf>
V evaluate(const Circuit& c, Leaf leaf) {
  std::vector<V> val(c.nodes.size());
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& v = c.nodes[i];
    if (v.kind == Circuit::Kind::Input || v.kind == Circuit::Kind::Const) {
      val[i] = leaf(v);
      continue;
    }
    V acc = val[v.args[0]];
    for (std::size_t j = 1; j < v.args.size(); ++j) {
      if (v.kind == Circuit::Kind::Add)
        acc += val[v.args[j]];
      else
        acc *= val[v.args[j]];
    }
    val[i] = acc;
  }
  return val[c.output];
}

}  // namespace

Rat eval_circuit(const Circuit& c, const std::vector<Rat>& point) {
  if (point.size() < c.inputs) throw std::invalid_argument("point has fewer coordinates than circuit inputs");
  Rat r = evaluate<Rat>(c, [&](const Circuit::Node& v) {
    return v.kind == Circuit::Kind::Input ? point[v.var] : Rat(v.value);
  });
  r.canonicalize();
  return r;
}

Int eval_circuit_bits(const Circuit& c, std::string_view bits) {
  if (bits.size() < c.inputs) throw std::invalid_argument("assignment shorter than circuit inputs");
  return evaluate<Int>(c, [&](const Circuit::Node& v) {
    return v.kind == Circuit::Kind::Input ? Int(bits[v.var] == '1' ? 1 : 0) : Int(v.value);
  });
}

namespace {

using Poly = std::vector<Int>;  // truncated at degree d

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; i + j < r.size(); ++j)
      if (b[j] != 0) r[i + j] += a[i] * b[j];
  }
  return r;
}

}  // namespace

Int msf_coefficient(const Circuit& c, const std::vector<unsigned>& monomial) {
  std::size_t d = 0;
  for (unsigned e : monomial) {
    if (e > 1) return 0;
    d += e;
  }
  std::vector<Poly> val(c.nodes.size());
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& v = c.nodes[i];
    Poly p(d + 1, 0);
    switch (v.kind) {
      case Circuit::Kind::Input:
        if (v.var < monomial.size() && monomial[v.var] == 1) {
          if (d >= 1) p[1] = 1;
        }
        break;
      case Circuit::Kind::Const: p[0] = v.value; break;
      case Circuit::Kind::Add:
        for (std::size_t a : v.args)
          for (std::size_t k = 0; k <= d; ++k) p[k] += val[a][k];
        break;
      case Circuit::Kind::Mul:
        p = val[v.args[0]];
        for (std::size_t j = 1; j < v.args.size(); ++j) p = poly_mul(p, val[v.args[j]]);
        break;
    }
    val[i] = std::move(p);
  }
  return val[c.output][d];
}

Multilinear expand_msf(const Circuit& c, std::size_t max_terms) {
  if (c.inputs > 63) throw SizeGuard("multilinear expansion limited to 63 variables");
  auto prune = [](Multilinear& p) {
    for (auto it = p.begin(); it != p.end();) it = it->second == 0 ? p.erase(it) : std::next(it);
  };
  std::vector<Multilinear> val(c.nodes.size());
  for (std::size_t i = 0; i < c.nodes.size(); ++i) {
    const auto& v = c.nodes[i];
    Multilinear p;
    switch (v.kind) {
      case Circuit::Kind::Input: p[std::uint64_t(1) << v.var] = 1; break;
      case Circuit::Kind::Const:
        if (v.value != 0) p[0] = v.value;
        break;
      case Circuit::Kind::Add:
        for (std::size_t a : v.args)
          for (const auto& [m, k] : val[a]) p[m] += k;
        prune(p);
        break;
      case Circuit::Kind::Mul:
        p = val[v.args[0]];
        for (std::size_t j = 1; j < v.args.size(); ++j) {
          Multilinear q;
          for (const auto& [m1, k1] : p)
            for (const auto& [m2, k2] : val[v.args[j]]) q[m1 | m2] += k1 * k2;
          prune(q);
          p.swap(q);
        }
        break;
    }
    if (p.size() > max_terms) throw SizeGuard("multilinear expansion exceeds " + std::to_string(max_terms) + " terms");
    val[i] = std::move(p);
  }
  return val[c.output];
}

Circuit circuit_from_multilinear(const Multilinear& p, std::size_t vars) {
  Circuit c;
  std::vector<std::size_t> x;
  for (std::size_t i = 0; i < vars; ++i) x.push_back(c.input(i));
  std::size_t one = c.constant(1), minus = c.constant(-1);
  std::vector<std::size_t> terms;
  for (const auto& [m, k] : p) {
    if (k == 0) continue;
    std::vector<std::size_t> factors;
    for (std::size_t i = 0; i < vars; ++i)
      if (m >> i & 1) factors.push_back(x[i]);
    if (m >> vars) throw std::invalid_argument("monomial mentions a variable beyond vars");
    std::size_t mono = factors.empty() ? one : c.mul(factors);
    // |k| copies of the monomial, sign applied once.
    Int mag = abs(k);
    if (!mag.fits_ulong_p() || mag.get_ui() > (1u << 20)) throw SizeGuard("coefficient too large for a {-1,0,1} circuit");
    std::vector<std::size_t> copies(mag.get_ui(), mono);
    std::size_t sum = copies.size() == 1 ? mono : c.add(copies);
    terms.push_back(k < 0 ? c.mul({minus, sum}) : sum);
  }
  if (terms.empty())
    c.constant(0);
  else
    c.add(terms);
  return c;
}

Matrix01 parse_matrix(std::string_view text) {
  Matrix01 A;
  auto lines = tokenize(text);
  A.n = lines.size();
  for (const Line& ln : lines) {
    if (ln.tok.size() != A.n) throw ParseError("matrix must be square", ln.no);
    for (const auto& t : ln.tok) {
      if (t != "0" && t != "1") throw ParseError("matrix entries must be 0 or 1", ln.no);
      A.a.push_back(t == "1" ? 1 : 0);
    }
  }
  if (A.n == 0) throw ParseError("empty matrix");
  return A;
}

Circuit perm_circuit(const Matrix01& A) {
  Circuit c;
  std::vector<std::size_t> x;
  for (std::size_t j = 0; j < A.n; ++j) x.push_back(c.input(j));
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < A.n; ++i) {
    std::vector<std::size_t> row;
    for (std::size_t j = 0; j < A.n; ++j)
      if (A.at(i, j)) row.push_back(x[j]);
    rows.push_back(row.empty() ? c.constant(0) : c.add(row));
  }
  c.mul(rows);
  return c;
}

Nat permanent(const Matrix01& A, PermMethod method, std::size_t max_n) {
  std::size_t n = A.n;
  if (n > max_n) throw SizeGuard("matrix order " + std::to_string(n) + " above limit " + std::to_string(max_n));
  switch (method) {
    case PermMethod::Bruteforce: {
      std::vector<std::size_t> pi(n);
      std::iota(pi.begin(), pi.end(), 0);
      Nat total = 0;
      do {
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) ok = A.at(i, pi[i]);
        if (ok) ++total;
      } while (std::next_permutation(pi.begin(), pi.end()));
      return total;
    }
    case PermMethod::Coefficient: {
      Circuit msf = circuit_from_multilinear(expand_msf(perm_circuit(A)), n);
      return msf_coefficient(msf, std::vector<unsigned>(n, 1));
    }
    case PermMethod::Fraction: {
      Circuit msf = circuit_from_multilinear(expand_msf(perm_circuit(A)), n);
      std::size_t s = n * n;
      Nat two_s = Nat(1) << static_cast<mp_bitcnt_t>(s);
      Rat v = eval_circuit(msf, std::vector<Rat>(n, rat(Nat(1), two_s)));
      Rat scaled = v * Rat(Nat(1) << static_cast<mp_bitcnt_t>(s * (n - 1)));
      scaled.canonicalize();
      Rat frac = scaled - Rat(floor_of(scaled));
      Rat p = frac * Rat(two_s);
      p.canonicalize();
      if (p.get_den() != 1) throw std::logic_error("fractional part is not a multiple of 2^-s");
      return p.get_num();
    }
  }
  return 0;
}

Rat cond_expectation(const PbProblem& p, std::string_view prefix) {
  if (prefix.size() > p.n) throw std::invalid_argument("prefix longer than the variable count");
  std::vector<Rat> point(std::max(p.n, p.objective.inputs), rat(1, 2));
  for (std::size_t i = 0; i < prefix.size(); ++i) point[i] = prefix[i] == '1' ? 1 : 0;
  return eval_circuit(p.objective, point);
}

std::string derandomize(const PbProblem& p) {
  std::string a;
  for (std::size_t k = 0; k < p.n; ++k) {
    Rat e0 = cond_expectation(p, a + '0');
    Rat e1 = cond_expectation(p, a + '1');
    bool one = p.goal == Goal::Max ? e1 > e0 : e1 < e0;
    a.push_back(one ? '1' : '0');
  }
  return a;
}

namespace {

bool better(Goal g, const Int& a, const Int& b) { return g == Goal::Max ? a > b : a < b; }

}  // namespace

std::size_t random_search_draws(const Rat& epsilon, const Rat& delta) {
  if (epsilon <= 0 || delta <= 0 || delta >= 1) throw std::invalid_argument("need epsilon > 0 and 0 < delta < 1");
  Rat r = Rat(static_cast<unsigned long>(ceil_log2_inv(delta))) / (2 * epsilon * epsilon);
  return std::max<std::size_t>(1, to_size(ceil_of(r), "random search draws"));
}

SearchReport random_search(const PbProblem& p, const Rat& epsilon, const Rat& delta, CoinSource& src) {
  SearchReport rep;
  rep.draws = random_search_draws(epsilon, delta);
  for (std::size_t i = 0; i < rep.draws; ++i) {
    std::string a(p.n, '0');
    for (auto& ch : a) ch = src.draw_bit() ? '1' : '0';
    Int v = eval_circuit_bits(p.objective, a);
    if (i == 0 || better(p.goal, v, rep.value)) {
      rep.value = v;
      rep.assignment = a;
    }
  }
  return rep;
}

LocalSearchReport local_search(const PbProblem& p, std::size_t h, std::string start) {
  if (h < 1) throw std::invalid_argument("neighbourhood radius must be at least 1");
  if (start.size() != p.n) throw std::invalid_argument("start assignment has the wrong length");
  LocalSearchReport rep;
  rep.assignment = std::move(start);
  rep.value = eval_circuit_bits(p.objective, rep.assignment);
  rep.trajectory.push_back(rep.value);
  std::vector<std::size_t> flips;
  // Depth-first walk over sorted flip lists; returns true once an improving one was applied.
  std::function<bool(std::size_t)> scan = [&](std::size_t from) {
    for (std::size_t i = from; i < p.n; ++i) {
      flips.push_back(i);
      std::string y = rep.assignment;
      for (std::size_t f : flips) y[f] = y[f] == '1' ? '0' : '1';
      Int v = eval_circuit_bits(p.objective, y);
      if (better(p.goal, v, rep.value)) {
        rep.assignment = y;
        rep.value = v;
        rep.trajectory.push_back(v);
        flips.clear();
        return true;
      }
      if (flips.size() < h && scan(i + 1)) return true;
      flips.pop_back();
    }
    return false;
  };
  while (scan(0)) {
  }
  return rep;
}

LocalSearchReport eg_solve(const PbProblem& p, std::size_t h) { return local_search(p, h, derandomize(p)); }

std::vector<Clause> parse_cnf_instance(std::string_view text, std::size_t& vars) {
  auto lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty CNF file");
  const Line& head = lines[0];
  std::size_t off = 0;
  if (head.tok.size() == 4 && head.tok[0] == "p" && head.tok[1] == "cnf")
    off = 2;
  else if (head.tok.size() != 2)
    throw ParseError("expected 'p cnf n m' or 'n m' header", head.no);
  vars = parse_count(head.tok[off], head.no);
  std::size_t m = parse_count(head.tok[off + 1], head.no);
  std::vector<Clause> out;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& ln = lines[i];
    Clause cl;
    for (std::size_t j = 0; j < ln.tok.size(); ++j) {
      long v = parse_long(ln.tok[j], ln.no);
      if (v == 0) {
        if (j + 1 != ln.tok.size()) throw ParseError("0 may only end a clause", ln.no);
        break;
      }
      std::size_t var = static_cast<std::size_t>(v < 0 ? -v : v);
      if (var > vars) throw ParseError("variable " + std::to_string(var) + " out of range", ln.no);
      cl.lits.push_back({var - 1, v > 0});
    }
    if (cl.lits.empty()) throw ParseError("empty clause", ln.no);
    out.push_back(std::move(cl));
  }
  if (out.size() != m)
    throw ParseError("header announces " + std::to_string(m) + " clauses, found " + std::to_string(out.size()), head.no);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> parse_graph(std::string_view text, std::size_t& vertices) {
  auto lines = tokenize(text);
  if (lines.empty()) throw ParseError("empty graph file");
  const Line& head = lines[0];
  if (head.tok.size() != 2) throw ParseError("expected 'n m' header", head.no);
  vertices = parse_count(head.tok[0], head.no);
  std::size_t m = parse_count(head.tok[1], head.no);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& ln = lines[i];
    if (ln.tok.size() != 2) throw ParseError("expected 'u v'", ln.no);
    std::size_t u = parse_count(ln.tok[0], ln.no), v = parse_count(ln.tok[1], ln.no);
    if (u < 1 || v < 1 || u > vertices || v > vertices) throw ParseError("vertex out of range", ln.no);
    if (u == v) throw ParseError("self-loop", ln.no);
    edges.emplace_back(u - 1, v - 1);
  }
  if (edges.size() != m)
    throw ParseError("header announces " + std::to_string(m) + " edges, found " + std::to_string(edges.size()), head.no);
  return edges;
}

PbProblem max_sat_problem(std::size_t vars, const std::vector<Clause>& clauses) {
  PbProblem p;
  p.n = vars;
  Circuit& c = p.objective;
  std::vector<std::size_t> x;
  for (std::size_t i = 0; i < vars; ++i) x.push_back(c.input(i));
  std::size_t one = c.constant(1), minus = c.constant(-1);
  std::vector<std::size_t> terms;
  for (const auto& cl : clauses) {
    std::map<std::size_t, bool> lits;
    bool tautology = false;
    for (const auto& l : cl.lits) {
      if (l.var >= vars) throw std::invalid_argument("literal variable out of range");
      auto [it, fresh] = lits.emplace(l.var, l.positive);
      if (!fresh && it->second != l.positive) tautology = true;
    }
    if (tautology) {
      terms.push_back(one);
      continue;
    }
    // 1 - prod(1 - lit), where 1 - x is the negative literal and 1 - (1 - x) = x.
    std::vector<std::size_t> falsified;
    for (auto [v, pos] : lits) falsified.push_back(pos ? c.add({one, c.mul({minus, x[v]})}) : x[v]);
    terms.push_back(c.add({one, c.mul({minus, c.mul(falsified)})}));
  }
  if (terms.empty())
    c.constant(0);
  else
    c.add(terms);
  return p;
}

PbProblem max_cut_problem(std::size_t vertices, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  PbProblem p;
  p.n = vertices;
  Circuit& c = p.objective;
  std::vector<std::size_t> x;
  for (std::size_t i = 0; i < vertices; ++i) x.push_back(c.input(i));
  std::size_t minus = c.constant(-1);
  std::vector<std::size_t> terms;
  for (auto [u, v] : edges) {
    if (u >= vertices || v >= vertices || u == v) throw std::invalid_argument("bad edge");
    std::size_t both = c.mul({minus, x[u], x[v]});
    terms.push_back(c.add({x[u], x[v], both, both}));
  }
  if (terms.empty())
    c.constant(0);
  else
    c.add(terms);
  return p;
}

}  // namespace rgen
