#include <doctest.h>

#include <algorithm>
#include <random>

#include "beamlattice/batched.hpp"
#include "beamlattice/synth.hpp"

using namespace beamlattice;

namespace {

std::vector<Utterance> mixed_corpus(uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<Utterance> utts;
  for (int i = 0; i < n; ++i) {
    Utterance u;
    u.id = "m" + std::to_string(i);
    const int t = std::uniform_int_distribution<int>(10, 60)(rng);
    u.grid = random_grid(rng, t, 3);
    u.true_frames = u.grid.num_frames;
    utts.push_back(std::move(u));
  }
  return utts;
}

bool same_result(const DecodeResult& a, const DecodeResult& b) {
  return a.id == b.id && a.tokens == b.tokens &&
         a.joint_logp == b.joint_logp && a.label_times == b.label_times &&
         a.steps_taken == b.steps_taken && a.eos_trigger == b.eos_trigger;
}

}  // namespace

TEST_CASE("make_batches sorts and chunks") {
  std::vector<Utterance> utts(4);
  const int lens[] = {100, 50, 200, 60};
  for (int i = 0; i < 4; ++i) {
    utts[i].id = "u" + std::to_string(i);
    utts[i].true_frames = lens[i];
  }
  auto batches = make_batches(utts, 2);
  REQUIRE(batches.size() == 2);
  CHECK(batches[0].utterances[0].true_frames == 50);
  CHECK(batches[0].utterances[1].true_frames == 60);
  CHECK(batches[0].padded_frames == 60);
  CHECK(batches[1].utterances[0].true_frames == 100);
  CHECK(batches[1].utterances[1].true_frames == 200);
  CHECK(batches[1].padded_frames == 200);

  CHECK(make_batches(utts, 16).size() == 1);
  CHECK(make_batches({}, 4).empty());
  CHECK_THROWS_AS(make_batches(utts, 0), std::invalid_argument);
}

TEST_CASE("topb_per_utterance") {
  SUBCASE("B=1 is the argmax") {
    auto sel = topb_per_utterance({{0.1, 0.9, 0.4}}, 1);
    CHECK(sel[0] == std::vector<int>{1});
  }
  SUBCASE("ties fall back to flat-index order") {
    auto sel = topb_per_utterance({{0.5, 0.5, 0.5, 0.5}}, 2);
    CHECK(sel[0] == std::vector<int>{0, 1});
  }
  SUBCASE("per-utterance constant shifts do not move the selection") {
    std::vector<double> row{0.3, -1.0, 0.7, 0.1};
    auto base = topb_per_utterance({row}, 2);
    for (auto& x : row) x += 5.5;
    CHECK(topb_per_utterance({row}, 2) == base);
  }
}

TEST_CASE("batched equals sequential on mixed lengths") {
  auto utts = mixed_corpus(101, 20);
  UniformScorer scorer(3);
  DecoderConfig cfg;

  std::vector<DecodeResult> seq;
  for (const auto& u : utts) seq.push_back(beam_search(u, scorer, cfg));

  for (int bs : {4, 16}) {
    std::vector<DecodeResult> bat;
    for (const auto& b : make_batches(utts, bs)) {
      auto rs = batched_beam_search(b, scorer, cfg);
      bat.insert(bat.end(), rs.begin(), rs.end());
    }
    REQUIRE(bat.size() == seq.size());
    for (const auto& s : seq) {
      auto it = std::find_if(bat.begin(), bat.end(),
                             [&](const DecodeResult& r) { return r.id == s.id; });
      REQUIRE(it != bat.end());
      CHECK(same_result(s, *it));
    }
  }
}

TEST_CASE("a one-utterance batch is exactly beam_search") {
  auto utts = mixed_corpus(55, 3);
  UniformScorer scorer(3);
  DecoderConfig cfg;
  for (const auto& u : utts) {
    Batch b;
    b.utterances = {u};
    b.padded_frames = u.true_frames;
    auto rs = batched_beam_search(b, scorer, cfg);
    REQUIRE(rs.size() == 1);
    CHECK(same_result(rs[0], beam_search(u, scorer, cfg)));
  }
}

TEST_CASE("permuting a batch permutes the results") {
  auto utts = mixed_corpus(7, 8);
  UniformScorer scorer(3);
  DecoderConfig cfg;
  Batch b;
  b.utterances = utts;
  auto base = batched_beam_search(b, scorer, cfg);

  std::mt19937_64 rng(3);
  std::shuffle(b.utterances.begin(), b.utterances.end(), rng);
  auto shuffled = batched_beam_search(b, scorer, cfg);
  for (size_t i = 0; i < b.utterances.size(); ++i) {
    CHECK(shuffled[i].id == b.utterances[i].id);
    auto it = std::find_if(base.begin(), base.end(), [&](const DecodeResult& r) {
      return r.id == shuffled[i].id;
    });
    REQUIRE(it != base.end());
    CHECK(same_result(shuffled[i], *it));
  }
}

TEST_CASE("work bound: at most steps * B scorer queries") {
  auto utts = mixed_corpus(23, 10);
  UniformScorer scorer(3);
  DecoderConfig cfg;
  cfg.beam_width = 3;
  Batch b;
  b.utterances = utts;
  DecodeCounters counters;
  batched_beam_search(b, scorer, cfg, &counters);
  CHECK(counters.scorer_queries <=
        counters.steps * static_cast<uint64_t>(cfg.beam_width));
}

TEST_CASE("vocabulary mismatch names the utterance") {
  auto utts = mixed_corpus(2, 2);
  UniformScorer scorer(5);  // grids have |C|=3
  Batch b;
  b.utterances = utts;
  DecoderConfig cfg;
  CHECK_THROWS_WITH_AS(batched_beam_search(b, scorer, cfg),
                       doctest::Contains("m0"), std::invalid_argument);
}
