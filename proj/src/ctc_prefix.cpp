#include "beamlattice/ctc_prefix.hpp"

#include <algorithm>
#include <stdexcept>

#include "beamlattice/logmath.hpp"

namespace beamlattice {

CtcForwardState init_state(const PosteriorGrid& grid) {
  const int t_max = static_cast<int>(grid.num_frames);
  if (t_max < 1) throw std::invalid_argument("init_state: empty grid");
  CtcForwardState st;
  st.gamma_n.assign(t_max + 1, kLogZero);
  st.gamma_b.assign(t_max + 1, kLogZero);
  st.gamma_b[0] = 0.0;  // log 1: zero frames emit the empty prefix
  const int blank = grid.blank_id();
  for (int t = 1; t <= t_max; ++t)
    st.gamma_b[t] = log_mul(st.gamma_b[t - 1], grid.at(t, blank));
  st.covered = t_max;
  st.tau = 1;
  st.tau_tilde = 1;
  st.prefix_len = 0;
  st.last_label = -1;
  return st;
}

std::pair<double, CtcForwardState> prefix_score_step(
    const CtcForwardState& state, int c, const PosteriorGrid& grid,
    const Window& window) {
  const int t_max = static_cast<int>(grid.num_frames);
  const int blank = grid.blank_id();
  if (c < 0 || c >= grid.num_tokens())
    throw std::invalid_argument("prefix_score_step: not a CTC label");
  if (window.s < 1 || window.e > t_max || window.s > window.e)
    throw std::invalid_argument("prefix_score_step: window out of range");

  CtcForwardState next;
  next.gamma_n.assign(t_max + 1, kLogZero);
  next.gamma_b.assign(t_max + 1, kLogZero);
  next.prefix_len = state.prefix_len + 1;
  next.last_label = c;
  next.covered = window.e;

  const bool repeat = state.last_label == c;
  double psi = kLogZero;
  for (int t = window.s; t <= window.e; ++t) {
    // Transition mass from the parent prefix: end-in-blank always allows a
    // new label; end-in-non-blank only when the label changes.
    double phi = repeat ? state.gamma_b[t - 1]
                        : log_add(state.gamma_b[t - 1], state.gamma_n[t - 1]);
    const double p_c = grid.at(t, c);
    next.gamma_n[t] =
        log_mul(log_add(next.gamma_n[t - 1], phi), p_c);
    next.gamma_b[t] =
        log_mul(log_add(next.gamma_b[t - 1], next.gamma_n[t - 1]),
                grid.at(t, blank));
    psi = log_add(psi, log_mul(phi, p_c));
  }

  // Last-label time estimates: argmax of the forward variables from the
  // parent's tau onward. Ties break toward the smallest t.
  const int lo = std::max(1, state.tau);
  int best_n = lo, best_b = lo;
  double val_n = kLogZero, val_b = kLogZero;
  for (int t = lo; t <= window.e; ++t) {
    if (next.gamma_n[t] > val_n) {
      val_n = next.gamma_n[t];
      best_n = t;
    }
    if (next.gamma_b[t] > val_b) {
      val_b = next.gamma_b[t];
      best_b = t;
    }
  }
  next.tau = best_n;
  next.tau_tilde = best_b;
  return {psi, std::move(next)};
}

double eos_score(const CtcForwardState& state, const PosteriorGrid& grid) {
  const int t_max = static_cast<int>(grid.num_frames);
  if (state.covered != t_max)
    throw std::logic_error("eos_score: state not advanced to the last frame");
  return log_add(state.gamma_n[t_max], state.gamma_b[t_max]);
}

double eos_score_extended(const CtcForwardState& state,
                          const PosteriorGrid& grid) {
  const int t_max = static_cast<int>(grid.num_frames);
  const int blank = grid.blank_id();
  double gn = state.gamma_n[state.covered];
  double gb = state.gamma_b[state.covered];
  for (int t = state.covered + 1; t <= t_max; ++t) {
    // Only the self-loop on the last label and the blank transitions are
    // available past the computed range; new-label mass there was pruned.
    double gn_next = state.last_label >= 0
                         ? log_mul(gn, grid.at(t, state.last_label))
                         : kLogZero;
    gb = log_mul(log_add(gb, gn), grid.at(t, blank));
    gn = gn_next;
  }
  return log_add(gn, gb);
}

Window window_for(int tau_prev, int tau_tilde_prev, int margin_m1,
                  int margin_m2, int step, int num_frames) {
  long s = std::max<long>({static_cast<long>(tau_prev) - margin_m1,
                           static_cast<long>(step), 1L});
  long e = std::min<long>(static_cast<long>(tau_tilde_prev) + margin_m2,
                          static_cast<long>(num_frames));
  if (s > e) s = e;  // degenerate range: keep a single frame
  return Window{static_cast<int>(s), static_cast<int>(e)};
}

Window batch_window(const std::vector<Window>& windows) {
  if (windows.empty())
    throw std::invalid_argument("batch_window: empty window list");
  Window out = windows.front();
  for (const Window& w : windows) {
    out.s = std::min(out.s, w.s);
    out.e = std::max(out.e, w.e);
  }
  return out;
}

}  // namespace beamlattice
