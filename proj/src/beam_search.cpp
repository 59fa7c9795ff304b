#include "beamlattice/beam_search.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamlattice/logmath.hpp"

namespace beamlattice {

const char* to_string(EosMode m) {
  switch (m) {
    case EosMode::kBaseline: return "baseline";
    case EosMode::kCtc: return "ctc";
    case EosMode::kBoth: return "both";
  }
  return "?";
}

const char* to_string(EosTrigger t) {
  switch (t) {
    case EosTrigger::kBaseline: return "baseline";
    case EosTrigger::kCtc: return "ctc";
    case EosTrigger::kMaxLen: return "max_len";
  }
  return "?";
}

EosMode eos_mode_from_string(const std::string& s) {
  if (s == "baseline") return EosMode::kBaseline;
  if (s == "ctc") return EosMode::kCtc;
  if (s == "both") return EosMode::kBoth;
  throw std::invalid_argument("unknown eos mode: " + s);
}

void DecoderConfig::validate() const {
  if (beam_width < 1) throw std::invalid_argument("beam width must be >= 1");
  if (ctc_weight < 0.0 || ctc_weight > 1.0)
    throw std::invalid_argument("ctc weight must be in [0, 1]");
  if (eos_m < 1) throw std::invalid_argument("eos M must be >= 1");
  if (eos_c < 0) throw std::invalid_argument("eos C must be >= 0");
  if (margin_m1 < 0 || margin_m2 < 0)
    throw std::invalid_argument("margins must be >= 0");
  if (!(max_steps_ratio > 0.0 && max_steps_ratio <= 1.0))
    throw std::invalid_argument("max steps ratio must be in (0, 1]");
}

StepScores joint_step_scores(const Hypothesis& hyp, const PosteriorGrid& grid,
                             const Scorer& scorer, const DecoderConfig& cfg,
                             const Window& window, const std::string& id,
                             DecodeCounters* counters) {
  const int num_tokens = grid.num_tokens();
  StepScores out;
  out.att = scorer.score(id, hyp.tokens);
  check_normalized(out.att, static_cast<size_t>(num_tokens) + 1,
                   "scorer output");
  out.token_joint.resize(num_tokens);
  out.token_psi.resize(num_tokens);
  out.token_state.resize(num_tokens);
  for (int c = 0; c < num_tokens; ++c) {
    auto [psi, state] = prefix_score_step(hyp.fwd, c, grid, window);
    out.token_psi[c] = psi;
    out.token_state[c] = std::move(state);
    out.token_joint[c] =
        mix_joint(cfg.ctc_weight, psi, hyp.att_logp + out.att[c]);
  }
  double eos_ctc = eos_score_extended(hyp.fwd, grid);
  out.eos_joint = mix_joint(cfg.ctc_weight, eos_ctc,
                            hyp.att_logp + out.att[num_tokens]);
  if (counters) {
    counters->scorer_queries += 1;
    counters->ctc_frames_evaluated +=
        static_cast<uint64_t>(num_tokens) * (window.e - window.s + 1);
    if (hyp.fwd.covered < static_cast<int>(grid.num_frames))
      counters->ctc_frames_evaluated +=
          static_cast<uint64_t>(grid.num_frames) - hyp.fwd.covered;
  }
  return out;
}

bool end_detect_baseline(const FinishedSet& finished, int step, int eos_m,
                         double eos_dend) {
  if (finished.empty()) return false;
  double best = -HUGE_VAL;
  for (const auto& e : finished.entries) best = std::max(best, e.joint);
  for (int m = 0; m < eos_m; ++m) {
    int len = step - m;
    double len_best = -HUGE_VAL;
    bool seen = false;
    for (const auto& e : finished.entries) {
      if (e.length == len) {
        seen = true;
        len_best = std::max(len_best, e.joint);
      }
    }
    if (!seen || !(len_best - best < eos_dend)) return false;
  }
  return true;
}

bool end_detect_ctc(const FinishedSet& finished, int step, int len_h,
                    int eos_c, int eos_m, double eos_dend) {
  if (end_detect_baseline(finished, step, eos_m, eos_dend)) return true;
  int count_long = 0;
  for (const auto& e : finished.entries)
    if (e.tau_last == len_h) ++count_long;
  return count_long > eos_c;
}

namespace {

// One scored continuation in the pooled per-step ranking. eos carries
// token == |C| so ties order it after the real tokens of the same parent.
struct Candidate {
  double score;
  int parent;
  int token;
  bool is_eos;
};

bool candidate_order(const Candidate& a, const Candidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.parent != b.parent) return a.parent < b.parent;
  return a.token < b.token;
}

DecodeResult finalize(const std::string& id, const FinishedSet& finished,
                      const std::vector<Hypothesis>& beam, int steps,
                      EosTrigger trigger) {
  DecodeResult res;
  res.id = id;
  res.steps_taken = steps;
  res.eos_trigger = trigger;
  if (!finished.empty()) {
    const FinishedEntry* best = &finished.entries.front();
    for (const auto& e : finished.entries)
      if (e.joint > best->joint) best = &e;
    res.tokens = best->tokens;
    res.joint_logp = best->joint;
    res.label_times = best->label_times;
  } else {
    const Hypothesis* best = &beam.front();
    for (const auto& h : beam)
      if (h.joint > best->joint) best = &h;
    res.tokens = best->tokens;
    res.joint_logp = best->joint;
    res.label_times = best->label_times;
    res.eos_trigger = EosTrigger::kMaxLen;
  }
  return res;
}

}  // namespace

DecodeResult beam_search(const Utterance& utt, const Scorer& scorer,
                         const DecoderConfig& cfg, DecodeCounters* counters) {
  cfg.validate();
  const PosteriorGrid& grid = utt.grid;
  if (grid.num_frames < 1) throw std::invalid_argument("empty grid");
  if (scorer.num_tokens() != grid.num_tokens())
    throw std::invalid_argument("scorer vocabulary does not match grid");
  const int t_max = static_cast<int>(grid.num_frames);
  const int num_tokens = grid.num_tokens();
  const int max_steps =
      static_cast<int>(std::ceil(cfg.max_steps_ratio * t_max));

  std::vector<Hypothesis> beam(1);
  beam[0].fwd = init_state(grid);
  FinishedSet finished;
  DecodeCounters local;
  int steps = 0;
  EosTrigger trigger = EosTrigger::kMaxLen;

  for (int l = 1; l <= max_steps; ++l) {
    steps = l;
    local.steps += 1;

    std::vector<Window> windows;
    windows.reserve(beam.size());
    for (const auto& h : beam)
      windows.push_back(window_for(h.fwd.tau, h.fwd.tau_tilde, cfg.margin_m1,
                                   cfg.margin_m2, l, t_max));
    const Window shared = batch_window(windows);

    std::vector<StepScores> scores(beam.size());
    for (size_t j = 0; j < beam.size(); ++j)
      scores[j] = joint_step_scores(beam[j], grid, scorer, cfg, shared,
                                    utt.id, &local);

    std::vector<Candidate> candidates;
    candidates.reserve(beam.size() * (num_tokens + 1));
    for (size_t j = 0; j < beam.size(); ++j) {
      for (int c = 0; c < num_tokens; ++c)
        candidates.push_back(
            {scores[j].token_joint[c], static_cast<int>(j), c, false});
      candidates.push_back(
          {scores[j].eos_joint, static_cast<int>(j), num_tokens, true});
    }
    std::sort(candidates.begin(), candidates.end(), candidate_order);

    // eos-ended hypotheses are confident while they outrank the B-th
    // surviving continuation; everything after the beam fills is pruned.
    std::vector<Hypothesis> next_beam;
    next_beam.reserve(cfg.beam_width);
    for (const Candidate& cand : candidates) {
      if (cand.is_eos) {
        const Hypothesis& h = beam[cand.parent];
        finished.entries.push_back({h.tokens, cand.score, h.fwd.tau,
                                    static_cast<int>(h.tokens.size()) + 1,
                                    h.label_times});
        continue;
      }
      const Hypothesis& h = beam[cand.parent];
      StepScores& ss = scores[cand.parent];
      Hypothesis child;
      child.tokens = h.tokens;
      child.tokens.push_back(cand.token);
      child.att_logp = h.att_logp + ss.att[cand.token];
      child.ctc_logp = ss.token_psi[cand.token];
      child.joint = cand.score;
      child.fwd = std::move(ss.token_state[cand.token]);
      child.label_times = h.label_times;
      child.label_times.push_back(child.fwd.tau);
      next_beam.push_back(std::move(child));
      if (static_cast<int>(next_beam.size()) >= cfg.beam_width) break;
    }
    beam = std::move(next_beam);

    bool stop = false;
    if (cfg.eos_mode != EosMode::kCtc &&
        end_detect_baseline(finished, l, cfg.eos_m, cfg.eos_dend)) {
      trigger = EosTrigger::kBaseline;
      stop = true;
    } else if (cfg.eos_mode != EosMode::kBaseline) {
      int count_long = 0;
      for (const auto& e : finished.entries)
        if (e.tau_last == t_max) ++count_long;
      if (count_long > cfg.eos_c) {
        trigger = EosTrigger::kCtc;
        stop = true;
      }
    }
    if (stop || beam.empty()) break;
  }

  if (counters) *counters += local;
  return finalize(utt.id, finished, beam, steps, trigger);
}

}  // namespace beamlattice
