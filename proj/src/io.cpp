#include "beamlattice/io.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace beamlattice {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Applies `fn` to each non-blank line of a JSON-lines file.
template <typename Fn>
void for_each_line(const std::string& path, Fn fn) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      fn(json::parse(line));
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " +
                               e.what());
    }
  }
}

}  // namespace

std::vector<ManifestEntry> read_manifest(const std::string& path) {
  const fs::path base = fs::path(path).parent_path();
  std::vector<ManifestEntry> entries;
  for_each_line(path, [&](const json& j) {
    ManifestEntry e;
    e.id = j.at("id").get<std::string>();
    fs::path grid = j.at("grid").get<std::string>();
    e.grid_path = grid.is_absolute() ? grid.string() : (base / grid).string();
    e.frames = j.at("frames").get<uint32_t>();
    entries.push_back(std::move(e));
  });
  return entries;
}

void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  for (const auto& e : entries) {
    json j{{"id", e.id}, {"grid", e.grid_path}, {"frames", e.frames}};
    os << j.dump() << '\n';
  }
}

std::vector<Utterance> load_utterances(const std::string& manifest_path) {
  std::vector<Utterance> utts;
  for (const auto& e : read_manifest(manifest_path)) {
    Utterance u;
    u.id = e.id;
    u.grid = read_grid(e.grid_path);
    if (u.grid.num_frames != e.frames)
      throw std::runtime_error(e.id + ": manifest says " +
                               std::to_string(e.frames) + " frames, grid has " +
                               std::to_string(u.grid.num_frames));
    if (auto defect = validate_grid(u.grid))
      throw std::runtime_error(e.id + ": " + *defect);
    u.true_frames = u.grid.num_frames;
    utts.push_back(std::move(u));
  }
  return utts;
}

void write_results(std::ostream& os,
                   const std::vector<DecodeResult>& results) {
  for (const auto& r : results) {
    json j{{"id", r.id},
           {"tokens", r.tokens},
           {"joint_logp", r.joint_logp},
           {"label_times", r.label_times},
           {"steps", r.steps_taken},
           {"eos_trigger", to_string(r.eos_trigger)}};
    os << j.dump() << '\n';
  }
}

std::vector<DecodeResult> read_results(const std::string& path) {
  std::vector<DecodeResult> out;
  for_each_line(path, [&](const json& j) {
    DecodeResult r;
    r.id = j.at("id").get<std::string>();
    r.tokens = j.at("tokens").get<std::vector<int>>();
    r.joint_logp = j.at("joint_logp").get<double>();
    r.label_times = j.at("label_times").get<std::vector<int>>();
    r.steps_taken = j.at("steps").get<int>();
    const std::string trig = j.at("eos_trigger").get<std::string>();
    r.eos_trigger = trig == "baseline" ? EosTrigger::kBaseline
                    : trig == "ctc"    ? EosTrigger::kCtc
                                       : EosTrigger::kMaxLen;
    out.push_back(std::move(r));
  });
  return out;
}

void write_segments(std::ostream& os, const std::vector<Segment>& segments) {
  for (const auto& s : segments) {
    json j{{"id", s.utterance_id},
           {"start_frame", s.start},
           {"end_frame", s.end},
           {"source", s.source}};
    os << j.dump() << '\n';
  }
}

std::vector<Segment> read_segments(const std::string& path) {
  std::vector<Segment> out;
  for_each_line(path, [&](const json& j) {
    Segment s;
    s.utterance_id = j.at("id").get<std::string>();
    s.start = j.at("start_frame").get<int>();
    s.end = j.at("end_frame").get<int>();
    s.source = j.at("source").get<std::string>();
    out.push_back(std::move(s));
  });
  return out;
}

void write_refs(const std::string& path,
                const std::map<std::string, std::vector<int>>& refs) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  for (const auto& [id, tokens] : refs) {
    json j{{"id", id}, {"tokens", tokens}};
    os << j.dump() << '\n';
  }
}

std::map<std::string, std::vector<int>> read_refs(const std::string& path) {
  std::map<std::string, std::vector<int>> refs;
  for_each_line(path, [&](const json& j) {
    refs[j.at("id").get<std::string>()] =
        j.at("tokens").get<std::vector<int>>();
  });
  return refs;
}

}  // namespace beamlattice
