#ifndef BEAMLATTICE_BATCHED_HPP
#define BEAMLATTICE_BATCHED_HPP

#include <vector>

#include "beamlattice/beam_search.hpp"

namespace beamlattice {

// Length-sorted group of utterances decoded jointly. Beams are laid out as
// U x B slots (flat index i*B + j); per-utterance finished sets and done
// flags live in the engine.
struct Batch {
  std::vector<Utterance> utterances;
  uint32_t padded_frames = 0;  // max true_frames across the batch
};

// Sorts ascending by true_frames (stable) and chunks into groups of
// batch_size. Empty input yields an empty list.
std::vector<Batch> make_batches(std::vector<Utterance> utterances,
                                int batch_size);

// Top-B selection per utterance over its flattened B x |C| expansion
// scores. Returns, per utterance, the B highest flat indices with stable
// tie-break (score desc, then flat index asc). Exposed for tests; the
// engine applies the same ordering in its pooled candidate scan.
std::vector<std::vector<int>> topb_per_utterance(
    const std::vector<std::vector<double>>& scores, int beam_width);

// Multiple-utterance multiple-hypothesis batched beam search. Scoring of
// the live U x B hypotheses fans out to OpenMP workers each step; the
// per-utterance reductions are serial, so results are independent of the
// worker count and exactly equal to sequential beam_search per utterance.
std::vector<DecodeResult> batched_beam_search(const Batch& batch,
                                              const Scorer& scorer,
                                              const DecoderConfig& cfg,
                                              DecodeCounters* counters =
                                                  nullptr);

}  // namespace beamlattice

#endif
