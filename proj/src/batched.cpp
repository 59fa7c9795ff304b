#include "beamlattice/batched.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "beamlattice/logmath.hpp"

namespace beamlattice {

std::vector<Batch> make_batches(std::vector<Utterance> utterances,
                                int batch_size) {
  if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
  std::stable_sort(utterances.begin(), utterances.end(),
                   [](const Utterance& a, const Utterance& b) {
                     return a.true_frames < b.true_frames;
                   });
  std::vector<Batch> batches;
  for (size_t i = 0; i < utterances.size(); i += batch_size) {
    Batch b;
    size_t end = std::min(utterances.size(), i + batch_size);
    b.utterances.assign(std::make_move_iterator(utterances.begin() + i),
                        std::make_move_iterator(utterances.begin() + end));
    for (const auto& u : b.utterances)
      b.padded_frames = std::max(b.padded_frames, u.true_frames);
    batches.push_back(std::move(b));
  }
  return batches;
}

std::vector<std::vector<int>> topb_per_utterance(
    const std::vector<std::vector<double>>& scores, int beam_width) {
  std::vector<std::vector<int>> out;
  out.reserve(scores.size());
  for (const auto& row : scores) {
    std::vector<int> idx(row.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      if (row[a] != row[b]) return row[a] > row[b];
      return a < b;
    });
    idx.resize(std::min<size_t>(idx.size(), beam_width));
    out.push_back(std::move(idx));
  }
  return out;
}

namespace {

struct Candidate {
  double score;
  int parent;
  int token;
  bool is_eos;
};

struct UttSearch {
  const Utterance* utt = nullptr;
  std::vector<Hypothesis> beam;
  FinishedSet finished;
  bool done = false;
  int steps = 0;
  int max_steps = 0;
  EosTrigger trigger = EosTrigger::kMaxLen;
  Window shared{1, 1};
  std::vector<StepScores> scores;
};

void finalize_result(UttSearch& s, DecodeResult& res) {
  res.id = s.utt->id;
  res.steps_taken = s.steps;
  res.eos_trigger = s.trigger;
  if (!s.finished.empty()) {
    const FinishedEntry* best = &s.finished.entries.front();
    for (const auto& e : s.finished.entries)
      if (e.joint > best->joint) best = &e;
    res.tokens = best->tokens;
    res.joint_logp = best->joint;
    res.label_times = best->label_times;
  } else {
    const Hypothesis* best = &s.beam.front();
    for (const auto& h : s.beam)
      if (h.joint > best->joint) best = &h;
    res.tokens = best->tokens;
    res.joint_logp = best->joint;
    res.label_times = best->label_times;
    res.eos_trigger = EosTrigger::kMaxLen;
  }
}

}  // namespace

std::vector<DecodeResult> batched_beam_search(const Batch& batch,
                                              const Scorer& scorer,
                                              const DecoderConfig& cfg,
                                              DecodeCounters* counters) {
  cfg.validate();
  const size_t num_utts = batch.utterances.size();
  if (num_utts == 0) return {};

  std::vector<UttSearch> searches(num_utts);
  for (size_t i = 0; i < num_utts; ++i) {
    UttSearch& s = searches[i];
    s.utt = &batch.utterances[i];
    const PosteriorGrid& grid = s.utt->grid;
    if (grid.num_frames < 1)
      throw std::invalid_argument("empty grid in utterance " + s.utt->id);
    if (scorer.num_tokens() != grid.num_tokens())
      throw std::invalid_argument("scorer vocabulary mismatch in utterance " +
                                  s.utt->id);
    s.max_steps = static_cast<int>(
        std::ceil(cfg.max_steps_ratio * grid.num_frames));
    s.beam.resize(1);
    s.beam[0].fwd = init_state(grid);
  }

  DecodeCounters total;
  for (int l = 1;; ++l) {
    // Per-utterance shared restriction window over its live hypotheses.
    std::vector<std::pair<int, int>> tasks;  // (utterance, hypothesis slot)
    for (size_t i = 0; i < num_utts; ++i) {
      UttSearch& s = searches[i];
      if (s.done) continue;
      if (l > s.max_steps) {  // own true-length bound, not the batch max
        s.done = true;
        continue;
      }
      const int t_max = static_cast<int>(s.utt->grid.num_frames);
      std::vector<Window> windows;
      windows.reserve(s.beam.size());
      for (const auto& h : s.beam)
        windows.push_back(window_for(h.fwd.tau, h.fwd.tau_tilde,
                                     cfg.margin_m1, cfg.margin_m2, l, t_max));
      s.shared = batch_window(windows);
      s.scores.assign(s.beam.size(), StepScores{});
      for (size_t j = 0; j < s.beam.size(); ++j)
        tasks.emplace_back(static_cast<int>(i), static_cast<int>(j));
    }
    if (tasks.empty()) break;

    // Fan the U x B scoring work out to workers; every task is independent
    // and deterministic, so scheduling cannot change the results.
    std::vector<DecodeCounters> task_counters(tasks.size());
    std::exception_ptr task_error;
#pragma omp parallel for schedule(dynamic)
    for (size_t t = 0; t < tasks.size(); ++t) {
      try {
        auto [i, j] = tasks[t];
        UttSearch& s = searches[i];
        s.scores[j] = joint_step_scores(s.beam[j], s.utt->grid, scorer, cfg,
                                        s.shared, s.utt->id,
                                        &task_counters[t]);
      } catch (...) {
#pragma omp critical
        if (!task_error) task_error = std::current_exception();
      }
    }
    if (task_error) std::rethrow_exception(task_error);
    for (const auto& c : task_counters) total += c;

    // Serial per-utterance reduction: pooled ranking, finished update,
    // beam refill, end detection.
    for (size_t i = 0; i < num_utts; ++i) {
      UttSearch& s = searches[i];
      if (s.done || s.scores.empty()) continue;
      s.steps = l;
      total.steps += 1;
      const int t_max = static_cast<int>(s.utt->grid.num_frames);
      const int num_tokens = s.utt->grid.num_tokens();

      std::vector<Candidate> candidates;
      candidates.reserve(s.beam.size() * (num_tokens + 1));
      for (size_t j = 0; j < s.beam.size(); ++j) {
        for (int c = 0; c < num_tokens; ++c)
          candidates.push_back({s.scores[j].token_joint[c],
                                static_cast<int>(j), c, false});
        candidates.push_back(
            {s.scores[j].eos_joint, static_cast<int>(j), num_tokens, true});
      }
      std::sort(candidates.begin(), candidates.end(),
                [](const Candidate& a, const Candidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  if (a.parent != b.parent) return a.parent < b.parent;
                  return a.token < b.token;
                });

      std::vector<Hypothesis> next_beam;
      next_beam.reserve(cfg.beam_width);
      for (const Candidate& cand : candidates) {
        if (cand.is_eos) {
          const Hypothesis& h = s.beam[cand.parent];
          s.finished.entries.push_back(
              {h.tokens, cand.score, h.fwd.tau,
               static_cast<int>(h.tokens.size()) + 1, h.label_times});
          continue;
        }
        const Hypothesis& h = s.beam[cand.parent];
        StepScores& ss = s.scores[cand.parent];
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
      s.beam = std::move(next_beam);
      s.scores.clear();

      if (cfg.eos_mode != EosMode::kCtc &&
          end_detect_baseline(s.finished, l, cfg.eos_m, cfg.eos_dend)) {
        s.trigger = EosTrigger::kBaseline;
        s.done = true;
      } else if (cfg.eos_mode != EosMode::kBaseline) {
        int count_long = 0;
        for (const auto& e : s.finished.entries)
          if (e.tau_last == t_max) ++count_long;
        if (count_long > cfg.eos_c) {
          s.trigger = EosTrigger::kCtc;
          s.done = true;
        }
      }
      if (s.beam.empty()) s.done = true;
    }
  }

  std::vector<DecodeResult> results(num_utts);
  for (size_t i = 0; i < num_utts; ++i)
    finalize_result(searches[i], results[i]);
  if (counters) *counters += total;
  return results;
}

}  // namespace beamlattice
