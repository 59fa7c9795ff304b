#ifndef BEAMLATTICE_EVAL_HPP
#define BEAMLATTICE_EVAL_HPP

#include <vector>

namespace beamlattice {

struct CerResult {
  int distance = 0;
  double rate = 0.0;
};

// Unit-cost Levenshtein distance and distance / len(reference). Tokens are
// opaque ids. An empty reference with a non-empty hypothesis has no defined
// rate and throws std::invalid_argument; two empty sequences give (0, 0.0).
CerResult cer(const std::vector<int>& reference,
              const std::vector<int>& hypothesis);

}  // namespace beamlattice

#endif
