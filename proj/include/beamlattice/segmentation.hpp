#ifndef BEAMLATTICE_SEGMENTATION_HPP
#define BEAMLATTICE_SEGMENTATION_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace beamlattice {

// Output nodes of the VAD model corresponding to speech and noise states.
struct NodeMap {
  std::vector<int> speech_nodes;
  std::vector<int> noise_nodes;

  void validate(int output_width) const;  // throws std::invalid_argument
};

struct VadConfig {
  double threshold = 0.0;   // LLR cut, nats
  int smooth_window = 5;    // frames
  int min_len = 1500;       // frames
  int max_len = 2000;       // frames

  void validate() const;
};

// Half-open frame interval of a long utterance.
struct Segment {
  std::string utterance_id;
  int start = 0;  // inclusive
  int end = 0;    // exclusive
  std::string source;  // "vad" | "hard"
};

// Raw per-frame VAD model outputs: T x num_nodes values (not normalized).
struct VadOutputs {
  uint32_t num_frames = 0;
  uint32_t num_nodes = 0;
  uint32_t frame_shift_ms = 10;
  std::vector<float> values;  // row-major

  double at(int frame, int node) const {  // frame 0-based here
    return values[static_cast<size_t>(frame) * num_nodes + node];
  }
};

// log P_noise - log P_speech, each approximated by the max output value
// over the corresponding node set. Shift-invariant.
double frame_llr(const std::vector<double>& outputs, const NodeMap& nodemap);

// Centered W-frame moving average of the LLR (truncated at the edges),
// then threshold: a frame is speech iff the smoothed LLR <= theta.
std::vector<bool> smooth_and_decide(const std::vector<double>& llr,
                                    double threshold, int smooth_window);

// Maximal speech runs, greedily merged across gaps until >= min_len, then
// overlong segments split into near-uniform pieces (spread <= 1 frame).
std::vector<Segment> vad_segments(const std::vector<bool>& speech_flags,
                                  int min_len, int max_len,
                                  const std::string& utterance_id);

// Near-uniform hard split of [0, T): ceil(T/max_len) pieces, spread <= 1;
// inputs shorter than min_len stay whole.
std::vector<Segment> hard_segments(int num_frames, int min_len, int max_len,
                                   const std::string& utterance_id);

// Binary container: magic "VADG", u32 version=1, u32 T, u32 num_nodes,
// u32 frame_shift_ms, then T*num_nodes f32 values, little-endian.
void write_vad_outputs(const std::string& path, const VadOutputs& v);
VadOutputs read_vad_outputs(const std::string& path);

// NodeMap JSON file: {"speech": [int], "noise": [int]}.
NodeMap load_nodemap(const std::string& path);

}  // namespace beamlattice

#endif
