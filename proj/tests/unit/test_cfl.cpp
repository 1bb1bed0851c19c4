#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "rgen/cfl.hpp"
#include "testdata.hpp"

using namespace rgen;

namespace {

CnfGrammar load(const char* name, CnfOptions opt = {}) { return to_cnf(parse_grammar(test_data(name)), opt); }

std::vector<CnfGrammar> corpus() {
  std::vector<CnfGrammar> out;
  for (const char* f : {"catalan.cfg", "anbn.cfg", "dyck.cfg", "expr.cfg", "palin.cfg"}) out.push_back(load(f));
  out.push_back(load("dyck_eps.cfg", {true}));
  out.push_back(load("l2.cfg", {true}));
  return out;
}

bool is_palindrome(const std::string& w) { return std::string(w.rbegin(), w.rend()) == w; }

bool in_l2(const std::string& w) {
  for (std::size_t k = 0; k <= w.size(); ++k)
    if (is_palindrome(w.substr(0, k)) && is_palindrome(w.substr(k))) return true;
  return false;
}

bool valid_tree(const CnfGrammar& g, const DerivationTree& t) {
  if (t.leaf()) {
    for (auto a : g.unary[t.var])
      if (a == t.terminal) return true;
    return false;
  }
  std::pair<std::size_t, std::size_t> p{t.kids[0].var, t.kids[1].var};
  bool ok = false;
  for (auto q : g.binary[t.var]) ok = ok || q == p;
  return ok && valid_tree(g, t.kids[0]) && valid_tree(g, t.kids[1]);
}

}  // namespace

TEST_CASE("grammar parsing") {
  auto g = parse_grammar("var S\nterm a b\nstart S\nS -> a b\n");
  CHECK(g.prods.size() == 1);
  CHECK_THROWS_AS(parse_grammar("var S\nterm a\nstart S\nS -> a X\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("var S\nterm a\nstart T\nS -> a\n"), ParseError);
  CHECK_THROWS_AS(parse_grammar("var S\nterm a\nstart S\nS a\n"), ParseError);
}

TEST_CASE("normal form") {
  SUBCASE("forced shape") {
    auto g = to_cnf(parse_grammar("var S\nterm a b\nstart S\nS -> a b\n"));
    CHECK(g.binary[g.start].size() == 1);
    auto [X, Y] = g.binary[g.start][0];
    CHECK(g.unary[X] == std::vector<std::size_t>{0});
    CHECK(g.unary[Y] == std::vector<std::size_t>{1});
    CHECK(earley_count(g, "ab") == 1);
  }
  SUBCASE("a^n b^n preserved") {
    auto g = load("anbn.cfg");
    for (std::size_t n = 1; n <= 8; ++n)
      for (const auto& w : oracle::words(g.terminals, n)) {
        bool member = n % 2 == 0 && w == std::string(n / 2, 'a') + std::string(n / 2, 'b');
        CHECK((earley_count(g, w) > 0) == member);
      }
  }
  SUBCASE("empty word") {
    CHECK_THROWS_AS(load("dyck_eps.cfg"), EpsilonInLanguage);
    CHECK_THROWS_AS(load("l2.cfg"), EpsilonInLanguage);
    auto g = load("l2.cfg", {true});
    for (std::size_t n = 1; n <= 7; ++n)
      for (const auto& w : oracle::words(g.terminals, n)) CHECK((earley_count(g, w) > 0) == in_l2(w));
  }
  SUBCASE("roundtrip through text") {
    for (const auto& g : corpus()) {
      auto h = parse_cnf(format_cnf(g));
      CHECK(h.binary == g.binary);
      CHECK(h.unary == g.unary);
      CHECK(h.production_count() == g.production_count());
    }
  }
  SUBCASE("productions sorted") {
    for (const auto& g : corpus())
      for (std::size_t A = 0; A < g.vars.size(); ++A) {
        CHECK(std::is_sorted(g.binary[A].begin(), g.binary[A].end()));
        CHECK(std::is_sorted(g.unary[A].begin(), g.unary[A].end()));
      }
  }
}

TEST_CASE("tree census") {
  auto cat = load("catalan.cfg");
  std::vector<unsigned> expect{1, 1, 2, 5, 14};
  for (std::size_t n = 1; n <= 5; ++n) CHECK(tree_census(cat, cat.start, n) == expect[n - 1]);
  auto ab = to_cnf(parse_grammar("var S\nterm a b\nstart S\nS -> a b\n"));
  CHECK(tree_census(ab, ab.start, 2) == 1);
  CHECK(tree_census(ab, ab.start, 3) == 0);
  CHECK(tree_census(ab, ab.start, 1) == 0);
  for (const auto& g : corpus()) {
    auto t = tree_census_table(g, 6);
    for (std::size_t A = 0; A < g.vars.size(); ++A)
      for (std::size_t l = 1; l <= 6; ++l) {
        CHECK(t.at(A, l) == oracle::trees(g, A, l).size());
        if (t.at(A, l) > 0) CHECK(t.b[l][A] == bit_size(t.at(A, l)));
      }
  }
}

TEST_CASE("earley count") {
  auto cat = load("catalan.cfg");
  CHECK(earley_count(cat, "aaa") == 2);
  CHECK(earley_count(cat, "aaaa") == 5);
  CHECK(earley_count(cat, "aaaa") == tree_census(cat, cat.start, 4));
  auto ab = load("anbn.cfg");
  CHECK(earley_count(ab, "ba") == 0);
  CHECK(earley_count(load("expr.cfg"), "x+x*x") == 2);
  for (const auto& g : corpus()) {
    std::size_t top = g.terminals.size() > 2 ? 5 : 6;
    for (std::size_t n = 1; n <= top; ++n)
      for (const auto& w : oracle::words(g.terminals, n)) CHECK(earley_count(g, w) == oracle::leftmost_derivations(g, w));
  }
}

TEST_CASE("earley sums to tree census") {
  for (const auto& g : corpus()) {
    std::size_t top = g.terminals.size() > 2 ? 6 : 8;
    auto t = tree_census_table(g, top);
    for (std::size_t n = 1; n <= top; ++n) {
      Nat sum = 0;
      for (const auto& w : oracle::words(g.terminals, n)) sum += earley_count(g, w);
      CHECK(sum == t.at(g.start, n));
    }
  }
}

TEST_CASE("earley chart holds one state per dotted production") {
  for (const auto& g : corpus()) {
    auto chart = earley_chart(g, g.terminals.size() > 2 ? "x+x*x" : "abba");
    for (const auto& cell : chart.cells) {
      std::set<std::size_t> seen;
      for (const auto& s : cell) CHECK(seen.insert(s.dotted).second);
    }
  }
}

TEST_CASE("split searches agree") {
  for (const auto& g : corpus()) {
    auto t = tree_census_table(g, 7);
    for (std::size_t A = 0; A < g.vars.size(); ++A)
      for (std::size_t l = 2; l <= 7; ++l) {
        const Nat& total = t.at(A, l);
        for (Nat r = 1; r <= total && r <= 300; ++r)
          CHECK(find_split_linear(g, t, A, l, r) == find_split_boustrophedon(g, t, A, l, r));
      }
  }
}

TEST_CASE("random tree law") {
  auto cat = load("catalan.cfg");
  auto law3 = oracle::enumerate_tapes<DerivationTree>([&](CoinSource& s) {
    return random_tree(cat, tree_census_table(cat, 3), 3, s, 2);
  });
  CHECK(law3.prob.size() == 2);
  for (const auto& [t, p] : law3.prob) CHECK(p / (1 - law3.fail) == rat(1, 2));
  for (const auto& g : corpus()) {
    auto t = tree_census_table(g, 3);
    for (std::size_t n = 1; n <= 3; ++n) {
      if (t.at(g.start, n) == 0) continue;
      for (std::size_t kappa : {1u, 3u}) {
        auto law = oracle::enumerate_tapes<DerivationTree>([&](CoinSource& s) { return random_tree(g, t, n, s, kappa); });
        CHECK(law.prob.size() == t.at(g.start, n));
        CHECK(law.fail <= rat(Nat(2 * n - 1), Nat(1) << static_cast<mp_bitcnt_t>(kappa)));
        Rat first = law.prob.begin()->second;
        for (const auto& [tr, p] : law.prob) {
          CHECK(p == first);
          CHECK(valid_tree(g, tr));
          CHECK(tr.size() == n);
        }
      }
    }
  }
}

TEST_CASE("random tree basics") {
  auto g = load("palin.cfg");
  auto law = oracle::enumerate_tapes<DerivationTree>([&](CoinSource& s) { return random_tree(g, 1, s); });
  std::set<std::string> ys;
  for (const auto& [t, p] : law.prob) ys.insert(tree_yield(g, t));
  CHECK(ys == std::set<std::string>{"a", "b"});
  auto ab = load("anbn.cfg");
  CoinSource s(3);
  auto t = random_tree(ab, 6, s);
  REQUIRE(t);
  CHECK(tree_yield(ab, *t) == "aaabbb");
  CHECK_THROWS_AS(random_tree(ab, 5, s), EmptySlice);
  auto cat = load("catalan.cfg");
  DerivationTree leaf{cat.start, 0, {}};
  CHECK(tree_yield(cat, leaf) == "a");
  DerivationTree node{cat.start, 0, {leaf, leaf}};
  CHECK(tree_yield(cat, node) == "aa");
  CHECK(format_tree(cat, node) == "(S (S a) (S a))");
  CHECK(tree_kappa(8) == 6);
}

TEST_CASE("description over words") {
  SUBCASE("unambiguous") {
    auto g = load("anbn.cfg");
    auto d = cfl_description(g, PolyBound{0, 0, 1});
    auto law = oracle::enumerate_tapes<std::string>([&](CoinSource& s) { return sample_described(d, 4, s, 1).value; });
    CHECK(law.prob.size() == 1);
    CHECK(law.prob.count("aabb") == 1);
  }
  SUBCASE("expression grammar is uniform over words") {
    auto g = load("expr.cfg");
    auto d = cfl_description(g, PolyBound{0, 0, 2});
    auto law = oracle::enumerate_tapes<std::string>([&](CoinSource& s) { return sample_described(d, 3, s, 1).value; });
    CHECK(law.prob.size() == 2);
    for (const auto& [w, p] : law.prob) CHECK(p / (1 - law.fail) == rat(1, 2));
  }
  SUBCASE("catalan ambiguity exceeds a constant bound") {
    auto g = load("catalan.cfg");
    CHECK_NOTHROW(validate_cfl_ambiguity(g, PolyBound{0, 0, 2}, 3));
    CHECK_THROWS_AS(validate_cfl_ambiguity(g, PolyBound{0, 0, 2}, 4), AmbiguityExceeded);
    auto d = cfl_description(g, PolyBound{0, 0, 2});
    CoinSource s(1);
    CHECK_THROWS_AS(sample_described(d, 5, s), AmbiguityExceeded);
  }
  SUBCASE("two palindromes, estimate close to the word count") {
    auto g = load("l2.cfg", {true});
    PolyBound D{1, 1, 1};
    validate_cfl_ambiguity(g, D, 8);
    auto d = cfl_description(g, D);
    for (std::size_t n = 3; n <= 8; n += 5) {
      std::size_t brute = 0;
      for (const auto& w : oracle::words(g.terminals, n)) brute += in_l2(w);
      std::size_t inside = 0;
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CoinSource s(seed);
        auto rep = estimate_census(d, n, rat(1, 4), s);
        if (rep.value && *rep.value >= rat(3, 4) * brute && *rep.value <= rat(5, 4) * brute) ++inside;
      }
      CHECK(inside >= 15);
    }
  }
}
