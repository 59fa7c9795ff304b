#include "beamlattice/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "beamlattice/logmath.hpp"

namespace beamlattice {

std::vector<int> collapse_alignment(const std::vector<int>& alignment,
                                    int blank_id) {
  std::vector<int> out;
  int prev = -1;
  for (int z : alignment) {
    if (z != prev && z != blank_id) out.push_back(z);
    prev = z;
  }
  return out;
}

namespace {

void check_enumerable(const PosteriorGrid& grid) {
  double combos = std::pow(static_cast<double>(grid.vocab),
                           static_cast<double>(grid.num_frames));
  if (combos > static_cast<double>(1 << 24))
    throw std::invalid_argument("oracle: instance too large to enumerate");
}

bool is_prefix_of(const std::vector<int>& prefix, const std::vector<int>& seq) {
  if (prefix.size() > seq.size()) return false;
  return std::equal(prefix.begin(), prefix.end(), seq.begin());
}

// Sums, in the probability domain, all alignments whose collapse satisfies
// the predicate. Walks an odometer over the alignment space.
template <typename Pred>
double enumerate_mass(const PosteriorGrid& grid, Pred&& accept) {
  const int t_max = static_cast<int>(grid.num_frames);
  const int vocab = static_cast<int>(grid.vocab);
  const int blank = grid.blank_id();
  std::vector<int> alignment(t_max, 0);
  double total = 0.0;
  for (;;) {
    double p = 1.0;
    for (int t = 0; t < t_max; ++t)
      p *= std::exp(static_cast<double>(grid.at(t + 1, alignment[t])));
    if (p > 0.0 && accept(collapse_alignment(alignment, blank))) total += p;
    int pos = t_max - 1;
    while (pos >= 0 && ++alignment[pos] == vocab) alignment[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

}  // namespace

double oracle_prefix_score(const std::vector<int>& prefix,
                           const PosteriorGrid& grid) {
  check_enumerable(grid);
  double mass = enumerate_mass(grid, [&](const std::vector<int>& seq) {
    return is_prefix_of(prefix, seq);
  });
  return mass > 0.0 ? std::log(mass) : kLogZero;
}

double oracle_exact_score(const std::vector<int>& seq,
                          const PosteriorGrid& grid) {
  check_enumerable(grid);
  double mass = enumerate_mass(
      grid, [&](const std::vector<int>& s) { return s == seq; });
  return mass > 0.0 ? std::log(mass) : kLogZero;
}

}  // namespace beamlattice
