#include "beamlattice/segmentation.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

namespace beamlattice {

void NodeMap::validate(int output_width) const {
  if (speech_nodes.empty() || noise_nodes.empty())
    throw std::invalid_argument("nodemap: speech and noise sets must be non-empty");
  std::set<int> speech(speech_nodes.begin(), speech_nodes.end());
  for (int n : noise_nodes)
    if (speech.count(n))
      throw std::invalid_argument("nodemap: speech and noise sets overlap");
  for (int n : speech_nodes)
    if (n < 0 || n >= output_width)
      throw std::invalid_argument("nodemap: speech node out of range");
  for (int n : noise_nodes)
    if (n < 0 || n >= output_width)
      throw std::invalid_argument("nodemap: noise node out of range");
}

void VadConfig::validate() const {
  if (smooth_window < 1)
    throw std::invalid_argument("vad: smoothing window must be >= 1");
  if (!(min_len > 0 && min_len <= max_len))
    throw std::invalid_argument("vad: need 0 < min_len <= max_len");
}

double frame_llr(const std::vector<double>& outputs, const NodeMap& nodemap) {
  nodemap.validate(static_cast<int>(outputs.size()));
  double speech = -HUGE_VAL, noise = -HUGE_VAL;
  for (int k : nodemap.speech_nodes) speech = std::max(speech, outputs[k]);
  for (int k : nodemap.noise_nodes) noise = std::max(noise, outputs[k]);
  return noise - speech;
}

std::vector<bool> smooth_and_decide(const std::vector<double>& llr,
                                    double threshold, int smooth_window) {
  if (smooth_window < 1)
    throw std::invalid_argument("smoothing window must be >= 1");
  const int n = static_cast<int>(llr.size());
  std::vector<double> prefix(n + 1, 0.0);
  for (int t = 0; t < n; ++t) prefix[t + 1] = prefix[t] + llr[t];
  const int half_lo = (smooth_window - 1) / 2;
  const int half_hi = smooth_window / 2;
  std::vector<bool> speech(n);
  for (int t = 0; t < n; ++t) {
    int lo = std::max(0, t - half_lo);
    int hi = std::min(n - 1, t + half_hi);
    double mean = (prefix[hi + 1] - prefix[lo]) / (hi - lo + 1);
    speech[t] = mean <= threshold;  // ties count as speech
  }
  return speech;
}

namespace {

// Splits [start, end) into ceil(len/max_len) pieces with spread <= 1 frame.
void split_uniform(int start, int end, int max_len, const std::string& id,
                   const std::string& source, std::vector<Segment>* out) {
  const int len = end - start;
  const int pieces = (len + max_len - 1) / max_len;
  int offset = start;
  for (int k = 0; k < pieces; ++k) {
    int piece = len / pieces + (k < len % pieces ? 1 : 0);
    out->push_back({id, offset, offset + piece, source});
    offset += piece;
  }
}

}  // namespace

std::vector<Segment> vad_segments(const std::vector<bool>& speech_flags,
                                  int min_len, int max_len,
                                  const std::string& utterance_id) {
  if (!(min_len > 0 && min_len <= max_len))
    throw std::invalid_argument("vad_segments: need 0 < min_len <= max_len");
  const int n = static_cast<int>(speech_flags.size());

  // Maximal speech runs.
  std::vector<std::pair<int, int>> runs;
  int t = 0;
  while (t < n) {
    if (!speech_flags[t]) {
      ++t;
      continue;
    }
    int start = t;
    while (t < n && speech_flags[t]) ++t;
    runs.emplace_back(start, t);
  }

  // Greedy left-to-right merge across gaps until each piece reaches
  // min_len or runs out of right neighbors. Merged segments span the gap
  // so they stay contiguous intervals.
  std::vector<std::pair<int, int>> merged;
  size_t r = 0;
  while (r < runs.size()) {
    int start = runs[r].first;
    int end = runs[r].second;
    ++r;
    while (end - start < min_len && r < runs.size()) {
      end = runs[r].second;
      ++r;
    }
    merged.emplace_back(start, end);
  }

  std::vector<Segment> out;
  for (auto [start, end] : merged)
    split_uniform(start, end, max_len, utterance_id, "vad", &out);
  return out;
}

std::vector<Segment> hard_segments(int num_frames, int min_len, int max_len,
                                   const std::string& utterance_id) {
  if (num_frames < 1) throw std::invalid_argument("hard_segments: T < 1");
  if (!(min_len > 0 && min_len <= max_len))
    throw std::invalid_argument("hard_segments: need 0 < min_len <= max_len");
  std::vector<Segment> out;
  if (num_frames < min_len) {
    out.push_back({utterance_id, 0, num_frames, "hard"});
    return out;
  }
  split_uniform(0, num_frames, max_len, utterance_id, "hard", &out);
  return out;
}

namespace {
void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v),
                        static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) |
         (static_cast<uint32_t>(b[3]) << 24);
}
}  // namespace

void write_vad_outputs(const std::string& path, const VadOutputs& v) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write VAD file: " + path);
  os.write("VADG", 4);
  put_u32(os, 1);
  put_u32(os, v.num_frames);
  put_u32(os, v.num_nodes);
  put_u32(os, v.frame_shift_ms);
  os.write(reinterpret_cast<const char*>(v.values.data()),
           static_cast<std::streamsize>(v.values.size() * sizeof(float)));
  if (!os) throw std::runtime_error("short write: " + path);
}

VadOutputs read_vad_outputs(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open VAD file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "VADG", 4) != 0)
    throw std::runtime_error("bad magic in VAD file: " + path);
  if (get_u32(is) != 1)
    throw std::runtime_error("unsupported VAD file version in " + path);
  VadOutputs v;
  v.num_frames = get_u32(is);
  v.num_nodes = get_u32(is);
  v.frame_shift_ms = get_u32(is);
  v.values.resize(static_cast<size_t>(v.num_frames) * v.num_nodes);
  is.read(reinterpret_cast<char*>(v.values.data()),
          static_cast<std::streamsize>(v.values.size() * sizeof(float)));
  if (!is) throw std::runtime_error("truncated VAD file: " + path);
  return v;
}

NodeMap load_nodemap(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open nodemap: " + path);
  nlohmann::json j;
  is >> j;
  NodeMap nm;
  nm.speech_nodes = j.at("speech").get<std::vector<int>>();
  nm.noise_nodes = j.at("noise").get<std::vector<int>>();
  return nm;
}

}  // namespace beamlattice
