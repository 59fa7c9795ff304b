#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "beamlattice/segmentation.hpp"

using namespace beamlattice;

namespace {

NodeMap nm(std::vector<int> speech, std::vector<int> noise) {
  NodeMap m;
  m.speech_nodes = std::move(speech);
  m.noise_nodes = std::move(noise);
  return m;
}

void check_partition(const std::vector<Segment>& segs, int num_frames) {
  REQUIRE(!segs.empty());
  CHECK(segs.front().start == 0);
  CHECK(segs.back().end == num_frames);
  for (size_t i = 1; i < segs.size(); ++i)
    CHECK(segs[i].start == segs[i - 1].end);
}

}  // namespace

TEST_CASE("frame_llr") {
  auto m = nm({0, 1}, {2});
  CHECK(frame_llr({-1.0, -2.0, -0.5}, m) == doctest::Approx(0.5));

  SUBCASE("shift invariance") {
    const double base = frame_llr({0.3, -1.2, 0.9}, nm({0}, {1, 2}));
    std::vector<double> shifted{0.3 + 7.0, -1.2 + 7.0, 0.9 + 7.0};
    CHECK(frame_llr(shifted, nm({0}, {1, 2})) == doctest::Approx(base));
  }
  SUBCASE("equal outputs give zero") {
    CHECK(frame_llr({1.5, 1.5}, nm({0}, {1})) == doctest::Approx(0.0));
  }
}

TEST_CASE("nodemap validation") {
  CHECK_NOTHROW(nm({0}, {1}).validate(2));
  CHECK_THROWS_AS(nm({}, {1}).validate(2), std::invalid_argument);  // empty
  CHECK_THROWS_AS(nm({0}, {0}).validate(2), std::invalid_argument);  // overlap
  CHECK_THROWS_AS(nm({0}, {2}).validate(2), std::invalid_argument);  // range
  CHECK_THROWS_AS(nm({-1}, {0}).validate(2), std::invalid_argument);
}

TEST_CASE("smooth_and_decide") {
  SUBCASE("W=1 is a raw threshold: speech iff llr <= theta") {
    auto f = smooth_and_decide({-1.0, 1.0, -1.0}, 0.0, 1);
    CHECK(f == std::vector<bool>{true, false, true});
  }
  SUBCASE("W=3 averages out a lone spike") {
    auto f = smooth_and_decide({-1.0, 1.0, -1.0}, 0.0, 3);
    CHECK(f == std::vector<bool>{true, true, true});
  }
  SUBCASE("frames exactly at the threshold count as speech") {
    auto f = smooth_and_decide({0.0, 0.0}, 0.0, 5);
    CHECK(f == std::vector<bool>{true, true});
  }
  SUBCASE("edges use the truncated window") {
    // W=3 at frame 0 averages frames {0,1} only
    auto f = smooth_and_decide({-3.0, 2.0, 2.0, 2.0}, 0.0, 3);
    CHECK(f[0] == true);   // (-3+2)/2 = -0.5
    CHECK(f[1] == false);  // (-3+2+2)/3 = 1/3
  }
}

TEST_CASE("vad_segments") {
  SUBCASE("short runs merge across the gap") {
    std::vector<bool> flags(900, false);
    for (int t = 0; t < 500; ++t) flags[t] = true;
    for (int t = 520; t < 900; ++t) flags[t] = true;
    auto segs = vad_segments(flags, 600, 2000, "u");
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].start == 0);
    CHECK(segs[0].end == 900);
    CHECK(segs[0].source == "vad");
    CHECK(segs[0].utterance_id == "u");
  }
  SUBCASE("overlong runs split near-uniformly") {
    std::vector<bool> flags(4500, true);
    auto segs = vad_segments(flags, 600, 2000, "u");
    REQUIRE(segs.size() == 3);
    for (const auto& s : segs) CHECK(s.end - s.start == 1500);
    check_partition(segs, 4500);
  }
  SUBCASE("no speech, no segments") {
    CHECK(vad_segments(std::vector<bool>(200, false), 10, 50, "u").empty());
  }
  SUBCASE("empty input") {
    CHECK(vad_segments({}, 10, 50, "u").empty());
  }
}

TEST_CASE("hard_segments") {
  SUBCASE("even split") {
    auto segs = hard_segments(4000, 1900, 2000, "u");
    REQUIRE(segs.size() == 2);
    CHECK(segs[0].end - segs[0].start == 2000);
    CHECK(segs[1].end - segs[1].start == 2000);
    CHECK(segs[0].source == "hard");
    check_partition(segs, 4000);
  }
  SUBCASE("uneven length spreads evenly") {
    auto segs = hard_segments(6500, 1900, 2000, "u");
    REQUIRE(segs.size() == 4);
    for (const auto& s : segs) CHECK(s.end - s.start == 1625);
    check_partition(segs, 6500);
  }
  SUBCASE("short inputs stay whole") {
    auto segs = hard_segments(700, 1900, 2000, "u");
    REQUIRE(segs.size() == 1);
    CHECK(segs[0].start == 0);
    CHECK(segs[0].end == 700);
  }
}

TEST_CASE("segment partitions: randomized properties") {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> frames(1, 9000);
  for (int trial = 0; trial < 50; ++trial) {
    const int t = frames(rng);
    auto segs = hard_segments(t, 1500, 2000, "u");
    check_partition(segs, t);
    int lo = t, hi = 0;
    for (const auto& s : segs) {
      const int len = s.end - s.start;
      if (t >= 1500) CHECK(len <= 2000);
      lo = std::min(lo, len);
      hi = std::max(hi, len);
    }
    CHECK(hi - lo <= 1);
  }
}

TEST_CASE("vad segments: randomized invariants") {
  std::mt19937_64 rng(62);
  std::uniform_real_distribution<double> llr(-2.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> values(800);
    for (auto& v : values) v = llr(rng);
    auto flags = smooth_and_decide(values, 0.0, 7);
    auto segs = vad_segments(flags, 50, 120, "u");
    for (size_t i = 0; i < segs.size(); ++i) {
      CHECK(segs[i].start < segs[i].end);
      CHECK(segs[i].end - segs[i].start <= 120);
      CHECK(segs[i].start >= 0);
      CHECK(segs[i].end <= 800);
      if (i > 0) CHECK(segs[i].start >= segs[i - 1].end);  // disjoint
    }
    // every speech frame outside a segment would be a dropped frame;
    // segments must cover all speech
    std::vector<bool> covered(800, false);
    for (const auto& s : segs)
      for (int f = s.start; f < s.end; ++f) covered[f] = true;
    for (int f = 0; f < 800; ++f)
      if (flags[f]) CHECK(covered[f]);
  }
}

TEST_CASE("vad config validation") {
  VadConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.min_len = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = VadConfig{};
  cfg.max_len = cfg.min_len - 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = VadConfig{};
  cfg.smooth_window = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("vad outputs round-trip") {
  VadOutputs v;
  v.num_frames = 3;
  v.num_nodes = 2;
  v.frame_shift_ms = 25;
  v.values = {1.0f, -2.0f, 0.5f, 0.25f, -1.5f, 3.0f};
  const std::string path = "test_vad.vadg";
  write_vad_outputs(path, v);
  auto r = read_vad_outputs(path);
  CHECK(r.num_frames == v.num_frames);
  CHECK(r.num_nodes == v.num_nodes);
  CHECK(r.frame_shift_ms == v.frame_shift_ms);
  CHECK(r.values == v.values);
  std::remove(path.c_str());
}

TEST_CASE("read_vad_outputs rejects garbage") {
  const std::string path = "test_vad_garbage.vadg";
  {
    std::ofstream f(path, std::ios::binary);
    f << "GARBAGE";
  }
  CHECK_THROWS(read_vad_outputs(path));
  std::remove(path.c_str());
}

TEST_CASE("load_nodemap") {
  const std::string path = "test_nodemap.json";
  {
    std::ofstream f(path);
    f << R"({"speech": [0, 1], "noise": [2]})";
  }
  auto m = load_nodemap(path);
  CHECK(m.speech_nodes == std::vector<int>{0, 1});
  CHECK(m.noise_nodes == std::vector<int>{2});
  std::remove(path.c_str());

  {
    std::ofstream f(path);
    f << R"({"speech": [0]})";  // missing noise
  }
  CHECK_THROWS(load_nodemap(path));
  std::remove(path.c_str());
}
