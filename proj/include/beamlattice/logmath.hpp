#ifndef BEAMLATTICE_LOGMATH_HPP
#define BEAMLATTICE_LOGMATH_HPP

#include <algorithm>
#include <cmath>

namespace beamlattice {

// Finite stand-in for log(0). Any log-domain product touching it saturates
// back to kLogZero, so -inf never mixes with finite scores as NaN would.
inline constexpr double kLogZero = -1e30;

// Values at or below this are treated as zero-probability.
inline constexpr double kLogZeroGuard = -1e29;

inline bool is_log_zero(double x) { return x <= kLogZeroGuard; }

// log(exp(a) + exp(b)), saturating.
inline double log_add(double a, double b) {
  if (a < b) std::swap(a, b);
  if (is_log_zero(b)) return is_log_zero(a) ? kLogZero : a;
  return a + std::log1p(std::exp(b - a));
}

// log(exp(a) * exp(b)), saturating.
inline double log_mul(double a, double b) {
  if (is_log_zero(a) || is_log_zero(b)) return kLogZero;
  return a + b;
}

// Joint hybrid score: lambda * ctc + (1 - lambda) * att in the log domain.
// Endpoint weights drop the other term entirely so that a saturated CTC
// score cannot leak into a pure-attention configuration (and vice versa).
inline double mix_joint(double lambda, double ctc, double att) {
  if (lambda <= 0.0) return att;
  if (lambda >= 1.0) return ctc;
  if (is_log_zero(ctc) || is_log_zero(att)) return kLogZero;
  return lambda * ctc + (1.0 - lambda) * att;
}

}  // namespace beamlattice

#endif
