#ifndef BEAMLATTICE_GRID_HPP
#define BEAMLATTICE_GRID_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace beamlattice {

// CTC symbol inventory. The blank is always the last CTC symbol, and the
// attention-side eos reuses the same index (it is never a CTC symbol).
struct TokenSet {
  int size_c = 0;  // |C|, real tokens 0..size_c-1
  std::vector<std::string> names;  // optional, size_c entries when present

  int blank_id() const { return size_c; }
  int eos_id() const { return size_c; }
  int ctc_vocab() const { return size_c + 1; }

  void validate() const;  // throws std::invalid_argument
};

// Per-frame natural-log posterior matrix over C + blank. The decoder's sole
// acoustic input; immutable after construction.
struct PosteriorGrid {
  uint32_t num_frames = 0;  // T
  uint32_t vocab = 0;       // |C| + 1, blank last
  uint32_t frame_shift_ms = 10;
  std::vector<float> logp;  // T * vocab, row-major

  int num_tokens() const { return static_cast<int>(vocab) - 1; }
  int blank_id() const { return static_cast<int>(vocab) - 1; }

  // frame is 1-based (matches the scoring recursions), symbol 0-based.
  double at(int frame, int symbol) const {
    return logp[static_cast<size_t>(frame - 1) * vocab + symbol];
  }

  double audio_seconds() const {
    return num_frames * frame_shift_ms / 1000.0;
  }
};

struct Utterance {
  std::string id;
  PosteriorGrid grid;
  uint32_t true_frames = 0;  // frames before any padding
};

// Returns std::nullopt when the grid is well formed, otherwise a short
// description of the first violated invariant ("row 3 logsumexp=+0.095").
std::optional<std::string> validate_grid(const PosteriorGrid& grid);

// Appends blank-certain frames until the grid has target_frames rows.
// Throws std::invalid_argument if target_frames < grid.num_frames.
PosteriorGrid pad_to_length(const PosteriorGrid& grid, uint32_t target_frames);

// Binary container: magic "CTCG", u32 version=1, u32 T, u32 vocab,
// u32 frame_shift_ms, then T*vocab f32 log-probs row-major, little-endian.
void write_grid(const std::string& path, const PosteriorGrid& grid);
PosteriorGrid read_grid(const std::string& path);

}  // namespace beamlattice

#endif
