#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "beamlattice/logmath.hpp"
#include "beamlattice/scorer.hpp"

using namespace beamlattice;

namespace {

double lse(const std::vector<double>& v) {
  double acc = kLogZero;
  for (double x : v) acc = log_add(acc, x);
  return acc;
}

}  // namespace

TEST_CASE("uniform scorer") {
  UniformScorer s(3);
  auto v = s.score("u", {});
  REQUIRE(v.size() == 4);
  for (double x : v) CHECK(x == doctest::Approx(std::log(0.25)));
  CHECK(s.score("u", {0, 1}) == s.score("u", {1, 0}));
  CHECK(lse(v) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("table scorer: lookup and fallback") {
  TableScorer s(2, 2);  // bigram over {a=0, b=1}
  s.add_entry({0}, {std::log(0.1), std::log(0.7), std::log(0.2)});
  auto hit = s.score("u", {1, 0});  // context is the last token
  CHECK(hit[0] == doctest::Approx(std::log(0.1)));
  CHECK(hit[1] == doctest::Approx(std::log(0.7)));
  CHECK(hit[2] == doctest::Approx(std::log(0.2)));
  auto miss = s.score("u", {1, 1});
  for (double x : miss) CHECK(x == doctest::Approx(std::log(1.0 / 3)));
}

TEST_CASE("unigram table is prefix-independent") {
  TableScorer s(2, 1);
  s.add_entry({}, {std::log(0.5), std::log(0.3), std::log(0.2)});
  CHECK(s.score("u", {}) == s.score("u", {0, 1, 1}));
}

TEST_CASE("table scorer rejects unnormalized rows") {
  TableScorer s(2, 1);
  CHECK_THROWS(s.add_entry({}, {std::log(0.5), std::log(0.5), std::log(0.5)}));
  CHECK_THROWS(s.add_entry({}, {std::log(0.5), std::log(0.5)}));  // short
}

TEST_CASE("loop scorer") {
  LoopScorer s(2, 0, 0.9);
  auto v = s.score("u", {});
  CHECK(v[0] == doctest::Approx(std::log(0.9)));
  CHECK(v[1] == doctest::Approx(std::log(0.05)));
  CHECK(v[2] == doctest::Approx(std::log(0.05)));
  CHECK(lse(v) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS(LoopScorer(2, 0, 0.5));   // must dominate
  CHECK_THROWS(LoopScorer(2, 0, 1.0));
  CHECK_THROWS(LoopScorer(2, 5, 0.9));   // token out of range
}

TEST_CASE("every scorer output normalizes on random probes") {
  UniformScorer u(4);
  LoopScorer l(4, 2, 0.8);
  TableScorer t(4, 2);
  t.add_entry({1}, {std::log(0.4), std::log(0.3), std::log(0.1),
                    std::log(0.1), std::log(0.1)});
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> tok(0, 3);
  std::uniform_int_distribution<int> len(0, 6);
  for (int i = 0; i < 1000; ++i) {
    std::vector<int> prefix(len(rng));
    for (auto& x : prefix) x = tok(rng);
    for (const Scorer* s : {(const Scorer*)&u, (const Scorer*)&l,
                            (const Scorer*)&t}) {
      auto v = s->score("probe", prefix);
      REQUIRE(v.size() == 5);
      CHECK(std::abs(lse(v)) <= 1e-6);
      CHECK(v == s->score("probe", prefix));  // deterministic
    }
  }
}

TEST_CASE("table scorer file round-trip") {
  TableScorer s(2, 2);
  s.add_entry({0}, {std::log(0.1), std::log(0.7), std::log(0.2)});
  s.add_entry({1}, {std::log(0.6), std::log(0.3), std::log(0.1)});
  const std::string path = "test_table.json";
  save_table_scorer(path, s);
  auto r = load_table_scorer(path);
  CHECK(r->order() == 2);
  CHECK(r->num_tokens() == 2);
  for (const auto& prefix :
       {std::vector<int>{0}, {1}, {0, 1}, {1, 1, 0}, {}}) {
    auto a = s.score("u", prefix);
    auto b = r->score("u", prefix);
    for (size_t k = 0; k < a.size(); ++k)
      CHECK(a[k] == doctest::Approx(b[k]).epsilon(1e-12));
  }
  std::remove(path.c_str());
}

TEST_CASE("make_scorer parses specs") {
  CHECK(make_scorer("uniform", 3)->num_tokens() == 3);
  auto loop = make_scorer("loop:1:0.8", 3);
  CHECK(loop->score("u", {})[1] == doctest::Approx(std::log(0.8)));
  CHECK_THROWS(make_scorer("nonsense", 3));
  CHECK_THROWS(make_scorer("loop:1", 3));
  CHECK_THROWS(make_scorer("table:/no/such/file.json", 3));
}

TEST_CASE("check_normalized") {
  CHECK_NOTHROW(check_normalized({std::log(0.5), std::log(0.5)}, 2, "v"));
  CHECK_THROWS(check_normalized({std::log(0.5), std::log(0.6)}, 2, "v"));
  CHECK_THROWS(check_normalized({0.0}, 2, "v"));
}
