#ifndef BEAMLATTICE_SYNTH_HPP
#define BEAMLATTICE_SYNTH_HPP

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "beamlattice/grid.hpp"
#include "beamlattice/segmentation.hpp"

namespace beamlattice {

struct SynthConfig {
  uint64_t seed = 1;
  int num_utts = 4;
  int t_min = 50;
  int t_max = 100;
  int num_tokens = 5;         // |C|
  std::string style = "random";  // random | planted | blank_heavy
  double blank_mass = 0.9;    // blank_heavy: per-frame blank probability
  uint32_t frame_shift_ms = 10;

  void validate() const;  // throws std::invalid_argument
};

struct SynthUtterance {
  std::string id;
  PosteriorGrid grid;
  std::vector<int> reference;  // planted token sequence (may be empty)
  std::vector<std::pair<int, int>> silences;  // 0-based half-open, planted
  VadOutputs vad;  // blank_heavy only; num_nodes == 0 otherwise
};

// Fully random normalized grid (Dirichlet-ish rows via normalized
// exponentials).
PosteriorGrid random_grid(std::mt19937_64& rng, int num_frames,
                          int num_tokens, uint32_t frame_shift_ms = 10);

// One utterance of the given style. Deterministic in (cfg.seed, index):
// each utterance draws from its own seeded generator, so regenerating any
// subset reproduces identical bytes.
SynthUtterance synth_utterance(const SynthConfig& cfg, int index);

std::vector<SynthUtterance> synth_corpus(const SynthConfig& cfg);

}  // namespace beamlattice

#endif
