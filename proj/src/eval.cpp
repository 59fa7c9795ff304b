#include "beamlattice/eval.hpp"

#include <algorithm>
#include <stdexcept>

namespace beamlattice {

CerResult cer(const std::vector<int>& reference,
              const std::vector<int>& hypothesis) {
  const size_t n = reference.size();
  const size_t m = hypothesis.size();
  if (n == 0 && m > 0)
    throw std::invalid_argument("undefined rate: empty reference");

  // Two-row Levenshtein, unit costs.
  std::vector<int> prev(m + 1), cur(m + 1);
  for (size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= n; ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= m; ++j) {
      int sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  CerResult r;
  r.distance = prev[m];
  r.rate = n == 0 ? 0.0 : static_cast<double>(r.distance) / n;
  return r;
}

}  // namespace beamlattice
