#include "beamlattice/grid.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "beamlattice/logmath.hpp"

namespace beamlattice {

void TokenSet::validate() const {
  if (size_c < 1) throw std::invalid_argument("TokenSet: size_c must be >= 1");
  if (!names.empty() && names.size() != static_cast<size_t>(size_c))
    throw std::invalid_argument("TokenSet: names size mismatch");
}

namespace {
constexpr double kRowTol = 1e-6;

double row_logsumexp(const PosteriorGrid& g, uint32_t row) {
  double m = -HUGE_VAL;
  for (uint32_t k = 0; k < g.vocab; ++k)
    m = std::max(m, static_cast<double>(g.logp[row * g.vocab + k]));
  if (m <= kLogZeroGuard) return kLogZero;
  double s = 0.0;
  for (uint32_t k = 0; k < g.vocab; ++k)
    s += std::exp(g.logp[row * g.vocab + k] - m);
  return m + std::log(s);
}
}  // namespace

std::optional<std::string> validate_grid(const PosteriorGrid& grid) {
  if (grid.num_frames < 1) return "empty grid";
  if (grid.vocab < 2) return "vocab must be >= 2 (one token plus blank)";
  if (grid.logp.size() != static_cast<size_t>(grid.num_frames) * grid.vocab)
    return "logp size does not match T*vocab";
  for (uint32_t t = 0; t < grid.num_frames; ++t) {
    for (uint32_t k = 0; k < grid.vocab; ++k) {
      float v = grid.logp[t * grid.vocab + k];
      if (std::isnan(v)) {
        std::ostringstream os;
        os << "row " << t << " has NaN";
        return os.str();
      }
      if (v > kRowTol) {
        std::ostringstream os;
        os << "row " << t << " entry " << k << " is a positive log-prob";
        return os.str();
      }
    }
    double lse = row_logsumexp(grid, t);
    if (std::abs(lse) > kRowTol) {
      std::ostringstream os;
      os.setf(std::ios::showpos);
      os << "row " << t << " logsumexp=" << lse;
      return os.str();
    }
  }
  return std::nullopt;
}

PosteriorGrid pad_to_length(const PosteriorGrid& grid, uint32_t target_frames) {
  if (target_frames < grid.num_frames)
    throw std::invalid_argument("pad_to_length: target shorter than grid");
  PosteriorGrid out = grid;
  out.num_frames = target_frames;
  out.logp.resize(static_cast<size_t>(target_frames) * grid.vocab,
                  static_cast<float>(kLogZero));
  for (uint32_t t = grid.num_frames; t < target_frames; ++t)
    out.logp[static_cast<size_t>(t) * grid.vocab + grid.vocab - 1] = 0.0f;
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

void write_grid(const std::string& path, const PosteriorGrid& grid) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write grid file: " + path);
  os.write("CTCG", 4);
  put_u32(os, 1);
  put_u32(os, grid.num_frames);
  put_u32(os, grid.vocab);
  put_u32(os, grid.frame_shift_ms);
  static_assert(sizeof(float) == 4);
  os.write(reinterpret_cast<const char*>(grid.logp.data()),
           static_cast<std::streamsize>(grid.logp.size() * sizeof(float)));
  if (!os) throw std::runtime_error("short write: " + path);
}

PosteriorGrid read_grid(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open grid file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "CTCG", 4) != 0)
    throw std::runtime_error("bad magic in grid file: " + path);
  uint32_t version = get_u32(is);
  if (version != 1)
    throw std::runtime_error("unsupported grid version in " + path);
  PosteriorGrid g;
  g.num_frames = get_u32(is);
  g.vocab = get_u32(is);
  g.frame_shift_ms = get_u32(is);
  g.logp.resize(static_cast<size_t>(g.num_frames) * g.vocab);
  is.read(reinterpret_cast<char*>(g.logp.data()),
          static_cast<std::streamsize>(g.logp.size() * sizeof(float)));
  if (!is) throw std::runtime_error("truncated grid file: " + path);
  return g;
}

}  // namespace beamlattice
