#ifndef BEAMLATTICE_ORACLE_HPP
#define BEAMLATTICE_ORACLE_HPP

#include <vector>

#include "beamlattice/grid.hpp"

namespace beamlattice {

// Brute-force scoring by full alignment enumeration. Deliberately
// independent of the forward-recursion path; used only for verification.
// Both throw std::invalid_argument when (|C|+1)^T would exceed 2^24.

// Log prob of all complete sequences having `prefix` as a prefix.
double oracle_prefix_score(const std::vector<int>& prefix,
                           const PosteriorGrid& grid);

// Log prob of all alignments collapsing to exactly `seq`.
double oracle_exact_score(const std::vector<int>& seq,
                          const PosteriorGrid& grid);

// CTC collapse of an alignment: merge adjacent repeats, drop blanks.
std::vector<int> collapse_alignment(const std::vector<int>& alignment,
                                    int blank_id);

}  // namespace beamlattice

#endif
