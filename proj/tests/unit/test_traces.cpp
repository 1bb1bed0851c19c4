#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "rgen/traces.hpp"
#include "testdata.hpp"

using namespace rgen;

namespace {

IndepAlphabet indep(const std::string& sigma, const std::vector<std::pair<char, char>>& pairs) {
  Alphabet s(sigma);
  std::vector<std::pair<std::size_t, std::size_t>> p;
  for (auto [a, b] : pairs) p.emplace_back(s.index(a), s.index(b));
  return IndepAlphabet(s, p);
}

const char* kAll3 = "states 1\nalphabet a b c\nstart 0\nfinals 0\ntrans 0 a 0\ntrans 0 b 0\ntrans 0 c 0\n";
// {ab, ba}
const char* kAbBa = "states 5\nalphabet a b\nstart 0\nfinals 3\ntrans 0 a 1\ntrans 0 b 2\ntrans 1 a 4\ntrans 1 b 3\n"
                    "trans 2 a 3\ntrans 2 b 4\ntrans 3 a 4\ntrans 3 b 4\ntrans 4 a 4\ntrans 4 b 4\n";
// words over a b c without the factor ba
const char* kNoBa = "states 3\nalphabet a b c\nstart 0\nfinals 0 1\ntrans 0 a 0\ntrans 0 b 1\ntrans 0 c 0\n"
                    "trans 1 a 2\ntrans 1 b 1\ntrans 1 c 0\ntrans 2 a 2\ntrans 2 b 2\ntrans 2 c 2\n";

std::vector<IndepAlphabet> relations() {
  return {indep("abc", {}), indep("abc", {{'a', 'b'}}), indep("abc", {{'a', 'b'}, {'b', 'c'}}),
          indep("abc", {{'a', 'b'}, {'b', 'c'}, {'a', 'c'}}), indep("abc", {{'a', 'c'}})};
}

}  // namespace

TEST_CASE("independence alphabet") {
  auto A = indep("abc", {{'a', 'b'}});
  CHECK(A.independent(0, 1));
  CHECK(A.independent(1, 0));
  CHECK_FALSE(A.independent(0, 2));
  CHECK(A.transitive());
  CHECK_FALSE(indep("abc", {{'a', 'b'}, {'b', 'c'}}).transitive());
  CHECK(indep("abc", {{'a', 'b'}, {'b', 'c'}, {'a', 'c'}}).transitive());
  CHECK_THROWS_AS(indep("ab", {{'a', 'a'}}), std::invalid_argument);
  auto L = parse_dfa(test_data("trace.dfa"));
  auto T = IndepAlphabet::of(L);
  CHECK(T.independent(0, 1));
  CHECK(T.independent(1, 2));
  CHECK_FALSE(T.independent(0, 2));
}

TEST_CASE("normal form") {
  CHECK(normal_form("ba", indep("ab", {{'a', 'b'}})) == "ab");
  CHECK(normal_form("ba", indep("ab", {})) == "ba");
  auto A = indep("abc", {{'a', 'b'}, {'b', 'c'}});
  CHECK(oracle::trace_class("abc", A) == std::set<std::string>{"abc", "bac", "acb"});
  CHECK(normal_form("acb", A) == "abc");
  CHECK(normal_form("bac", A) == "abc");
  for (const auto& I : relations())
    for (std::size_t n = 0; n <= 6; ++n)
      for (const auto& x : oracle::words(I.sigma(), n)) {
        auto cls = oracle::trace_class(x, I);
        std::string nf = normal_form(x, I);
        CHECK(nf == *cls.begin());
        CHECK(normal_form(nf, I) == nf);
        if (n == 6) CHECK(normal_form(*cls.rbegin(), I) == nf);
      }
}

TEST_CASE("class size") {
  CHECK(class_size("abc", indep("abc", {})) == 1);
  CHECK(class_size("ab", indep("ab", {{'a', 'b'}})) == 2);
  CHECK(class_size("abc", indep("abc", {{'a', 'b'}, {'b', 'c'}})) == 3);
  CHECK(class_size("abcabc", indep("abc", {{'a', 'b'}, {'b', 'c'}, {'a', 'c'}})) == 90);
  for (const auto& I : relations())
    for (std::size_t n = 0; n <= 7; ++n)
      for (const auto& x : oracle::words(I.sigma(), n)) CHECK(class_size(x, I) == oracle::trace_class(x, I).size());
  CHECK_THROWS_AS(class_size(std::string(10, 'a'), indep("ab", {}), 8), SizeGuard);
}

TEST_CASE("representatives") {
  auto all = parse_dfa(kAll3);
  auto I = indep("abc", {{'a', 'b'}, {'b', 'c'}});
  for (const auto& x : oracle::words(I.sigma(), 5)) CHECK(count_representatives(all, x, I) == class_size(x, I));
  CHECK(count_representatives(parse_dfa(test_data("ab.dfa")), "ba", indep("ab", {{'a', 'b'}})) == 1);
  auto L = parse_dfa(test_data("trace.dfa"));
  auto T = IndepAlphabet::of(L);
  for (std::size_t n = 1; n <= 7; ++n)
    for (const auto& x : oracle::words(T.sigma(), n)) CHECK(count_representatives(L, x, T) == oracle::representatives(L, x, T));
  CHECK_THROWS_AS(count_representatives(L, std::string(12, 'c'), T, 10), SizeGuard);
}

TEST_CASE("partition identity and exact census") {
  for (const char* f : {"trace.dfa", "commute.dfa"}) {
    auto L = parse_dfa(test_data(f));
    auto T = IndepAlphabet::of(L);
    for (std::size_t n = 1; n <= 7; ++n) {
      std::set<std::string> traces;
      Nat members = 0;
      for (const auto& x : oracle::words(T.sigma(), n))
        if (L.accepts(x)) {
          ++members;
          traces.insert(normal_form(x, T));
        }
      Nat sum = 0;
      for (const auto& t : traces) sum += count_representatives(L, t, T);
      CHECK(sum == members);
      CHECK(trace_census_exact(L, T, n, 1u << 16) == traces.size());
    }
  }
  auto L = parse_dfa(test_data("trace.dfa"));
  CHECK_THROWS_AS(trace_census_exact(L, IndepAlphabet::of(L), 7, 3), CeilingExceeded);
}

TEST_CASE("lexicographic normal forms are unambiguous representatives") {
  auto L = parse_dfa(kNoBa);
  auto I = indep("abc", {{'a', 'b'}});
  REQUIRE(I.transitive());
  for (std::size_t n = 1; n <= 6; ++n)
    for (const auto& x : oracle::words(I.sigma(), n)) {
      CHECK(count_representatives(L, x, I) == 1);
      CHECK(L.accepts(normal_form(x, I)));
    }
}

TEST_CASE("trace description") {
  SUBCASE("empty independence is the regular sampler") {
    auto L = parse_dfa(test_data("no_bb.dfa"));
    IndepAlphabet I(L.alphabet, {});
    auto d = trace_description(L, I, PolyBound{0, 0, 1});
    auto law = oracle::enumerate_tapes<std::string>([&](CoinSource& s) { return sample_described(d, 3, s, 1).value; });
    CHECK(law.prob.size() == 5);
    for (const auto& [w, p] : law.prob) CHECK(p / (1 - law.fail) == rat(1, 5));
  }
  SUBCASE("two words, one trace") {
    auto L = parse_dfa(kAbBa);
    auto I = indep("ab", {{'a', 'b'}});
    auto d = trace_description(L, I, PolyBound{0, 0, 2});
    CHECK(d.ambiguity("ab") == 2);
    auto law = oracle::enumerate_tapes<std::string>([&](CoinSource& s) { return sample_described(d, 2, s, 1).value; });
    CHECK(law.prob.size() == 1);
    CHECK(law.prob.count("ab") == 1);
  }
  SUBCASE("sampler over the reference language is uniform on traces") {
    auto L = parse_dfa(test_data("trace.dfa"));
    auto T = IndepAlphabet::of(L);
    PolyBound D{1, 1, 1};
    validate_trace_ambiguity(L, T, D, 8);
    auto d = trace_description(L, T, D);
    auto law = oracle::enumerate_tapes<std::string>([&](CoinSource& s) { return sample_described(d, 3, s, 1).value; });
    CHECK(law.prob.size() == trace_census_exact(L, T, 3, 1000));
    Rat first = law.prob.begin()->second;
    for (const auto& [w, p] : law.prob) {
      CHECK(p == first);
      CHECK(normal_form(w, T) == w);
    }
  }
  SUBCASE("census estimate at size four") {
    auto L = parse_dfa(test_data("trace.dfa"));
    auto T = IndepAlphabet::of(L);
    auto d = trace_description(L, T, PolyBound{1, 1, 1});
    Nat exact = trace_census_exact(L, T, 4, 1000);
    std::size_t inside = 0;
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      CoinSource s(seed);
      auto rep = estimate_census(d, 4, rat(1, 4), s);
      if (rep.value && *rep.value >= rat(3, 4) * Rat(exact) && *rep.value <= rat(5, 4) * Rat(exact)) ++inside;
    }
    CHECK(inside >= 30);
  }
  SUBCASE("bound violations") {
    auto L = parse_dfa(test_data("trace.dfa"));
    CHECK_THROWS_AS(validate_trace_ambiguity(L, IndepAlphabet::of(L), PolyBound{0, 0, 1}, 6), AmbiguityExceeded);
  }
}
