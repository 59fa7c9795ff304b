#ifndef BEAMLATTICE_IO_HPP
#define BEAMLATTICE_IO_HPP

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "beamlattice/beam_search.hpp"
#include "beamlattice/grid.hpp"
#include "beamlattice/segmentation.hpp"

namespace beamlattice {

// One line of an utterance manifest: {"id", "grid": path, "frames": int}.
// Relative grid paths resolve against the manifest's directory on read.
struct ManifestEntry {
  std::string id;
  std::string grid_path;
  uint32_t frames = 0;
};

std::vector<ManifestEntry> read_manifest(const std::string& path);
void write_manifest(const std::string& path,
                    const std::vector<ManifestEntry>& entries);

// Reads the manifest and every grid it names; checks frames and validity.
std::vector<Utterance> load_utterances(const std::string& manifest_path);

// Result lines: {"id", "tokens", "joint_logp", "label_times", "steps",
// "eos_trigger"}.
void write_results(std::ostream& os, const std::vector<DecodeResult>& results);
std::vector<DecodeResult> read_results(const std::string& path);

// Segment lines: {"id", "start_frame", "end_frame", "source"}.
void write_segments(std::ostream& os, const std::vector<Segment>& segments);
std::vector<Segment> read_segments(const std::string& path);

// Reference transcripts: {"id", "tokens": [int]} per line.
void write_refs(const std::string& path,
                const std::map<std::string, std::vector<int>>& refs);
std::map<std::string, std::vector<int>> read_refs(const std::string& path);

}  // namespace beamlattice

#endif
