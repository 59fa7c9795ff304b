#ifndef BEAMLATTICE_CTC_PREFIX_HPP
#define BEAMLATTICE_CTC_PREFIX_HPP

#include <utility>
#include <vector>

#include "beamlattice/grid.hpp"

namespace beamlattice {

// Margin sentinel: a disabled (infinite) restriction margin.
inline constexpr int kNoMargin = 1 << 29;

// Inclusive 1-based frame range over which a prefix-score sum is evaluated.
struct Window {
  int s = 1;
  int e = 1;
};

// Blank/non-blank CTC forward variables for one hypothesis prefix.
//
// gamma_n[t] / gamma_b[t] hold the log probability that the first t frames
// emit exactly this prefix with the alignment ending in the last label /
// in blank. Index 0 is the empty-frame base case; frames above `covered`
// have not been computed yet (restricted windows only ever extend).
struct CtcForwardState {
  std::vector<double> gamma_n;  // size T+1
  std::vector<double> gamma_b;  // size T+1
  int covered = 0;              // highest computed frame
  int tau = 1;                  // estimated frame of the last label
  int tau_tilde = 1;            // estimated frame of the trailing blank
  int prefix_len = 0;
  int last_label = -1;          // -1 for the empty prefix
};

// Forward-recursion base for the empty prefix; covers all T frames.
CtcForwardState init_state(const PosteriorGrid& grid);

// Extends `state`'s prefix with token c over the given window, returning the
// prefix score psi (log prob of all complete sequences starting with the
// extended prefix, frames restricted to the window) and the child state.
// Throws std::invalid_argument if c is the blank or out of range.
std::pair<double, CtcForwardState> prefix_score_step(
    const CtcForwardState& state, int c, const PosteriorGrid& grid,
    const Window& window);

// Log probability that the grid emits exactly the state's prefix.
// Requires state.covered == T; throws std::logic_error otherwise.
double eos_score(const CtcForwardState& state, const PosteriorGrid& grid);

// Same, but tolerates covered < T by running the self-contained blank /
// last-label tail recursion up to T (out-of-window contributions stay -inf).
double eos_score_extended(const CtcForwardState& state,
                          const PosteriorGrid& grid);

// Restriction window for decoding step l (Window(max(tau-M1, l, 1),
// min(tau_tilde+M2, T)), degenerate ranges clamped to a single frame).
Window window_for(int tau_prev, int tau_tilde_prev, int margin_m1,
                  int margin_m2, int step, int num_frames);

// Envelope of the per-hypothesis windows of one batch step.
// Throws std::invalid_argument on an empty list.
Window batch_window(const std::vector<Window>& windows);

}  // namespace beamlattice

#endif
