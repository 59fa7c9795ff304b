#ifndef BEAMLATTICE_BEAM_SEARCH_HPP
#define BEAMLATTICE_BEAM_SEARCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "beamlattice/ctc_prefix.hpp"
#include "beamlattice/grid.hpp"
#include "beamlattice/scorer.hpp"

namespace beamlattice {

enum class EosMode { kBaseline, kCtc, kBoth };
enum class EosTrigger { kBaseline, kCtc, kMaxLen };

const char* to_string(EosMode m);
const char* to_string(EosTrigger t);
EosMode eos_mode_from_string(const std::string& s);

struct DecoderConfig {
  int beam_width = 3;
  double ctc_weight = 0.3;       // lambda
  int eos_m = 3;                 // window of the score-based detector
  double eos_dend = -10.0;       // nats
  int eos_c = 2;                 // tau-saturation count threshold
  int margin_m1 = 5;             // kNoMargin disables
  int margin_m2 = kNoMargin;
  EosMode eos_mode = EosMode::kBoth;
  double max_steps_ratio = 1.0;

  void validate() const;  // throws std::invalid_argument
};

struct DecodeResult {
  std::string id;
  std::vector<int> tokens;       // over C, eos stripped
  double joint_logp = 0.0;
  std::vector<int> label_times;  // per-label tau, non-decreasing
  int steps_taken = 0;
  EosTrigger eos_trigger = EosTrigger::kMaxLen;
};

struct Hypothesis {
  std::vector<int> tokens;
  double att_logp = 0.0;
  double ctc_logp = 0.0;
  double joint = 0.0;
  CtcForwardState fwd;
  std::vector<int> label_times;
};

// Completed (eos-ended) hypotheses of one utterance. `length` counts the
// eos symbol, matching the decoding step at which the entry was added.
struct FinishedEntry {
  std::vector<int> tokens;
  double joint = 0.0;
  int tau_last = 1;
  int length = 0;
  std::vector<int> label_times;
};

struct FinishedSet {
  std::vector<FinishedEntry> entries;
  bool empty() const { return entries.empty(); }
};

struct DecodeCounters {
  uint64_t steps = 0;
  uint64_t scorer_queries = 0;
  uint64_t ctc_frames_evaluated = 0;

  DecodeCounters& operator+=(const DecodeCounters& o) {
    steps += o.steps;
    scorer_queries += o.scorer_queries;
    ctc_frames_evaluated += o.ctc_frames_evaluated;
    return *this;
  }
};

// Joint scores of every one-token continuation of `hyp` plus the eos-ended
// score, CTC restricted to `window`. Exposed for tests; the engines use it.
struct StepScores {
  std::vector<double> token_joint;           // |C|
  std::vector<double> token_psi;             // |C|
  std::vector<CtcForwardState> token_state;  // |C|
  std::vector<double> att;                   // |C|+1, raw scorer output
  double eos_joint = 0.0;
};

StepScores joint_step_scores(const Hypothesis& hyp, const PosteriorGrid& grid,
                             const Scorer& scorer, const DecoderConfig& cfg,
                             const Window& window, const std::string& id,
                             DecodeCounters* counters);

// Score-based end detection: true iff every one of the M most recent entry
// lengths exists and its best score trails the overall best by more than
// |D_end| nats (a missing length never counts).
bool end_detect_baseline(const FinishedSet& finished, int step, int eos_m,
                         double eos_dend);

// Tau-saturation detection: score-based detection, or strictly more than
// `eos_c` finished entries whose last label sits on the final frame.
bool end_detect_ctc(const FinishedSet& finished, int step, int len_h,
                    int eos_c, int eos_m, double eos_dend);

// Serial single-utterance B-width beam search; the reference the batched
// engine is tested against.
DecodeResult beam_search(const Utterance& utt, const Scorer& scorer,
                         const DecoderConfig& cfg,
                         DecodeCounters* counters = nullptr);

}  // namespace beamlattice

#endif
