#include "beamlattice/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "beamlattice/logmath.hpp"

namespace beamlattice {

void SynthConfig::validate() const {
  if (num_utts < 1) throw std::invalid_argument("gen: num_utts must be >= 1");
  if (t_min < 1 || t_min > t_max)
    throw std::invalid_argument("gen: need 1 <= t_min <= t_max");
  if (num_tokens < 1)
    throw std::invalid_argument("gen: vocab must have >= 1 token");
  if (!(blank_mass > 0.0 && blank_mass < 1.0))
    throw std::invalid_argument("gen: blank_mass must be in (0, 1)");
  if (style != "random" && style != "planted" && style != "blank_heavy")
    throw std::invalid_argument("gen: unknown style " + style);
}

namespace {

// Normalizes `probs` and appends the row as float log-probs, with one
// correction pass so the float row still normalizes within 1e-6 nats.
void append_row(std::vector<float>& logp, std::vector<double> probs) {
  double sum = 0.0;
  for (double p : probs) sum += p;
  const size_t base = logp.size();
  for (double p : probs)
    logp.push_back(p <= 0.0 ? -1e30f
                            : static_cast<float>(std::log(p / sum)));
  double lse = kLogZero;
  for (size_t i = base; i < logp.size(); ++i)
    lse = log_add(lse, logp[i] <= kLogZeroGuard ? kLogZero
                                                : static_cast<double>(logp[i]));
  for (size_t i = base; i < logp.size(); ++i)
    if (logp[i] > kLogZeroGuard)
      logp[i] = static_cast<float>(logp[i] - lse);
}

std::vector<double> peaked_row(std::mt19937_64& rng, int vocab, int peak,
                               double mass) {
  std::vector<double> probs(vocab, (1.0 - mass) / (vocab - 1));
  probs[peak] = mass;
  // tiny jitter keeps rows distinct without moving the argmax
  std::uniform_real_distribution<double> eps(0.9, 1.1);
  for (int k = 0; k < vocab; ++k)
    if (k != peak) probs[k] *= eps(rng);
  return probs;
}

}  // namespace

PosteriorGrid random_grid(std::mt19937_64& rng, int num_frames,
                          int num_tokens, uint32_t frame_shift_ms) {
  PosteriorGrid g;
  g.num_frames = static_cast<uint32_t>(num_frames);
  g.vocab = static_cast<uint32_t>(num_tokens) + 1;
  g.frame_shift_ms = frame_shift_ms;
  g.logp.reserve(static_cast<size_t>(num_frames) * g.vocab);
  std::exponential_distribution<double> exp1(1.0);
  for (int t = 0; t < num_frames; ++t) {
    std::vector<double> probs(g.vocab);
    for (auto& p : probs) p = exp1(rng);  // normalized Exp(1) = flat Dirichlet
    append_row(g.logp, std::move(probs));
  }
  return g;
}

SynthUtterance synth_utterance(const SynthConfig& cfg, int index) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed ^ (0x9e3779b97f4a7c15ULL * (index + 1)));
  std::uniform_int_distribution<int> t_dist(cfg.t_min, cfg.t_max);
  const int t = t_dist(rng);
  const int vocab = cfg.num_tokens + 1;
  const int blank = cfg.num_tokens;

  SynthUtterance u;
  char idbuf[32];
  std::snprintf(idbuf, sizeof(idbuf), "utt%04d", index);
  u.id = idbuf;

  if (cfg.style == "random") {
    u.grid = random_grid(rng, t, cfg.num_tokens, cfg.frame_shift_ms);
    return u;
  }

  u.grid.num_frames = static_cast<uint32_t>(t);
  u.grid.vocab = static_cast<uint32_t>(vocab);
  u.grid.frame_shift_ms = cfg.frame_shift_ms;
  u.grid.logp.reserve(static_cast<size_t>(t) * vocab);

  if (cfg.style == "planted") {
    // Alternating multi-frame label runs and short blank gaps, sharply
    // peaked. The argmax path collapses to exactly the planted sequence,
    // and long blank stretches (which would let low-probability label
    // insertions accumulate mass and mislead narrow beams) never occur.
    std::uniform_int_distribution<int> tok_dist(0, cfg.num_tokens - 1);
    std::uniform_int_distribution<int> run_dist(2, 4);
    std::uniform_int_distribution<int> gap_dist(1, 3);
    std::uniform_real_distribution<double> mass_dist(0.96, 0.99);
    std::vector<int> label_at(t, -1);
    int f = std::min(t - 1, gap_dist(rng));
    while (f < t) {
      const int tok = tok_dist(rng);
      u.reference.push_back(tok);
      for (int k = 0; k < run_dist(rng) && f < t; ++k) label_at[f++] = tok;
      f += gap_dist(rng);
    }
    for (int frame = 0; frame < t; ++frame) {
      int peak = label_at[frame] >= 0 ? label_at[frame] : blank;
      append_row(u.grid.logp, peaked_row(rng, vocab, peak, mass_dist(rng)));
    }
    return u;
  }

  // blank_heavy: mostly blank frames plus one or two blank-certain silence
  // stretches, with a paired two-node VAD track (node 0 speech, node 1
  // noise) marking the silences.
  std::uniform_int_distribution<int> nsil_dist(1, 2);
  const int nsil = nsil_dist(rng);
  std::vector<bool> silent(t, false);
  for (int k = 0; k < nsil; ++k) {
    int span = std::max(2, t / (4 * nsil));
    std::uniform_int_distribution<int> start_dist(
        k * t / nsil, std::max(k * t / nsil, (k + 1) * t / nsil - span));
    int s = start_dist(rng);
    int e = std::min(t, s + span);
    if (s >= e) continue;
    u.silences.emplace_back(s, e);
    for (int f = s; f < e; ++f) silent[f] = true;
  }
  std::uniform_real_distribution<double> jitter(-0.3, 0.3);
  u.vad.num_frames = static_cast<uint32_t>(t);
  u.vad.num_nodes = 2;
  u.vad.frame_shift_ms = cfg.frame_shift_ms;
  u.vad.values.reserve(static_cast<size_t>(t) * 2);
  for (int f = 0; f < t; ++f) {
    double mass = silent[f] ? 0.999 : cfg.blank_mass;
    append_row(u.grid.logp, peaked_row(rng, vocab, blank, mass));
    double speech_o = (silent[f] ? -2.0 : 2.0) + jitter(rng);
    double noise_o = (silent[f] ? 2.0 : -2.0) + jitter(rng);
    u.vad.values.push_back(static_cast<float>(speech_o));
    u.vad.values.push_back(static_cast<float>(noise_o));
  }
  return u;
}

std::vector<SynthUtterance> synth_corpus(const SynthConfig& cfg) {
  std::vector<SynthUtterance> out;
  out.reserve(cfg.num_utts);
  for (int i = 0; i < cfg.num_utts; ++i)
    out.push_back(synth_utterance(cfg, i));
  return out;
}

}  // namespace beamlattice
