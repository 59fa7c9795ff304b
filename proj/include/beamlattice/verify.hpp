#ifndef BEAMLATTICE_VERIFY_HPP
#define BEAMLATTICE_VERIFY_HPP

#include <cstdint>
#include <string>

namespace beamlattice {

struct SuiteResult {
  std::string name;
  int trials = 0;
  int failures = 0;
  std::string first_failure;  // seed + defect of the first failing trial

  bool ok() const { return failures == 0; }
};

// Recursion-vs-enumeration prefix scores: every prefix of length <= 4 over
// random grids (T <= max_frames, |C| <= max_vocab) must agree within 1e-6
// nats with the brute-force oracle.
SuiteResult verify_oracle_equivalence(int trials, int max_frames,
                                      int max_vocab, uint64_t seed);

// Prob-domain identity P_prefix(g) = P_exact(g) + sum_c P_prefix(g c)
// within 1e-9 on the same instance family.
SuiteResult verify_partition_identity(int trials, int max_frames,
                                      int max_vocab, uint64_t seed);

// Beam search with B >= |C|^(T-1) and saturated step bound must return the
// exhaustive joint maximum over all decodable complete sequences within
// 1e-9, for lambda in {0, 0.5, 1}.
SuiteResult verify_exhaustive_beam(int trials, uint64_t seed);

}  // namespace beamlattice

#endif
