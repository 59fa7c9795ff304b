// beamlattice command-line driver: synthetic grid generation, decoding,
// segmentation, oracle verification, benchmarking, CER evaluation.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "beamlattice/batched.hpp"
#include "beamlattice/beam_search.hpp"
#include "beamlattice/eval.hpp"
#include "beamlattice/grid.hpp"
#include "beamlattice/io.hpp"
#include "beamlattice/log.hpp"
#include "beamlattice/scorer.hpp"
#include "beamlattice/segmentation.hpp"
#include "beamlattice/synth.hpp"
#include "beamlattice/verify.hpp"

namespace fs = std::filesystem;
using namespace beamlattice;

namespace {

int parse_margin(const std::string& s) {
  if (s == "inf") return kNoMargin;
  int v = std::stoi(s);
  if (v < 0) throw CLI::ValidationError("margin must be >= 0 or 'inf'");
  return v;
}

struct DecodeFlags {
  std::string scorer = "uniform";
  int beam = 3;
  double ctc_weight = 0.3;
  int eos_m = 3;
  double eos_dend = -10.0;
  int eos_c = 2;
  std::string m1 = "5";
  std::string m2 = "inf";
  std::string eos_mode = "both";
  int batch_size = 16;
  int jobs = 0;
  double max_steps_ratio = 1.0;

  void attach(CLI::App* app) {
    app->add_option("--scorer", scorer,
                    "uniform | table:PATH | loop:TOKEN:P");
    app->add_option("--beam", beam, "beam width B");
    app->add_option("--ctc-weight", ctc_weight, "lambda in [0,1]");
    app->add_option("--eos-m", eos_m, "score-detector window M");
    app->add_option("--eos-dend", eos_dend, "score-detector threshold, nats");
    app->add_option("--eos-c", eos_c, "tau-saturation count threshold C");
    app->add_option("--m1", m1, "left margin M1 (frames or 'inf')");
    app->add_option("--m2", m2, "right margin M2 (frames or 'inf')");
    app->add_option("--eos-mode", eos_mode, "baseline | ctc | both");
    app->add_option("--batch-size", batch_size, "1 = sequential decoding");
    app->add_option("--jobs", jobs, "worker threads (0 = runtime default)");
    app->add_option("--max-steps-ratio", max_steps_ratio,
                    "step bound as a fraction of T");
  }

  DecoderConfig config() const {
    DecoderConfig cfg;
    cfg.beam_width = beam;
    cfg.ctc_weight = ctc_weight;
    cfg.eos_m = eos_m;
    cfg.eos_dend = eos_dend;
    cfg.eos_c = eos_c;
    cfg.margin_m1 = parse_margin(m1);
    cfg.margin_m2 = parse_margin(m2);
    cfg.eos_mode = eos_mode_from_string(eos_mode);
    cfg.max_steps_ratio = max_steps_ratio;
    cfg.validate();
    return cfg;
  }
};

void apply_jobs(int jobs) {
#ifdef _OPENMP
  if (jobs > 0) omp_set_num_threads(jobs);
#else
  (void)jobs;
#endif
}

int grid_num_tokens(const std::vector<Utterance>& utts) {
  if (utts.empty()) throw std::runtime_error("empty manifest");
  int n = utts.front().grid.num_tokens();
  for (const auto& u : utts)
    if (u.grid.num_tokens() != n)
      throw std::runtime_error("mixed vocabularies in manifest (" + u.id +
                               ")");
  return n;
}

struct TimedDecode {
  std::vector<DecodeResult> results;  // input order
  double wall_seconds = 0.0;
  double audio_seconds = 0.0;
  DecodeCounters counters;
};

TimedDecode run_decode(const std::vector<Utterance>& utts,
                       const Scorer& scorer, const DecoderConfig& cfg,
                       int batch_size) {
  TimedDecode out;
  for (const auto& u : utts) out.audio_seconds += u.grid.audio_seconds();
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<DecodeResult> raw;
  if (batch_size <= 1) {
    for (const auto& u : utts)
      raw.push_back(beam_search(u, scorer, cfg, &out.counters));
  } else {
    for (const auto& b : make_batches(utts, batch_size)) {
      auto rs = batched_beam_search(b, scorer, cfg, &out.counters);
      raw.insert(raw.end(), std::make_move_iterator(rs.begin()),
                 std::make_move_iterator(rs.end()));
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  out.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

  // back to input order regardless of length sorting
  out.results.reserve(raw.size());
  for (const auto& u : utts)
    for (auto& r : raw)
      if (r.id == u.id) {
        out.results.push_back(std::move(r));
        break;
      }
  return out;
}

std::unique_ptr<std::ofstream> open_out(const std::string& path,
                                        std::ostream** os) {
  if (path.empty() || path == "-") {
    *os = &std::cout;
    return nullptr;
  }
  auto f = std::make_unique<std::ofstream>(path);
  if (!*f) throw std::runtime_error("cannot write " + path);
  *os = f.get();
  return f;
}

// ---------------------------------------------------------------- gen

int cmd_gen(const SynthConfig& synth, const std::string& out_dir) {
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  std::vector<ManifestEntry> manifest;
  std::map<std::string, std::vector<int>> refs;
  std::vector<Segment> silences;
  bool have_vad = false;
  for (const auto& u : synth_corpus(synth)) {
    const std::string grid_name = u.id + ".ctcg";
    write_grid((dir / grid_name).string(), u.grid);
    manifest.push_back({u.id, grid_name, u.grid.num_frames});
    if (!u.reference.empty() || synth.style == "planted")
      refs[u.id] = u.reference;
    if (u.vad.num_nodes > 0) {
      write_vad_outputs((dir / (u.id + ".vadg")).string(), u.vad);
      have_vad = true;
    }
    for (auto [s, e] : u.silences)
      silences.push_back({u.id, s, e, "silence"});
  }
  write_manifest((dir / "manifest.jsonl").string(), manifest);
  if (!refs.empty()) write_refs((dir / "refs.jsonl").string(), refs);
  if (have_vad) {
    std::ofstream nm(dir / "nodemap.json");
    nm << "{\"speech\": [0], \"noise\": [1]}\n";
    std::ofstream sil(dir / "silences.jsonl");
    write_segments(sil, silences);
  }
  log_at(LogLevel::kInfo, "wrote %zu utterances to %s", manifest.size(),
         out_dir.c_str());
  return 0;
}

// ------------------------------------------------------------- decode

int cmd_decode(const std::string& manifest, const DecodeFlags& flags,
               const std::string& out_path) {
  apply_jobs(flags.jobs);
  const auto utts = load_utterances(manifest);
  const auto scorer = make_scorer(flags.scorer, grid_num_tokens(utts));
  const auto timed = run_decode(utts, *scorer, flags.config(),
                                flags.batch_size);
  std::ostream* os = nullptr;
  auto file = open_out(out_path, &os);
  write_results(*os, timed.results);
  std::fprintf(stderr,
               "decoded %zu utts: wall=%.3fs audio=%.1fs xrt=%.3g "
               "steps=%llu queries=%llu ctc_frames=%llu\n",
               utts.size(), timed.wall_seconds, timed.audio_seconds,
               timed.wall_seconds / timed.audio_seconds,
               static_cast<unsigned long long>(timed.counters.steps),
               static_cast<unsigned long long>(timed.counters.scorer_queries),
               static_cast<unsigned long long>(
                   timed.counters.ctc_frames_evaluated));
  return 0;
}

// ------------------------------------------------------------ segment

void print_segment_stats(const std::vector<Segment>& segs) {
  double mean = 0.0, var = 0.0;
  for (const auto& s : segs) mean += s.end - s.start;
  if (!segs.empty()) mean /= segs.size();
  for (const auto& s : segs) {
    double d = (s.end - s.start) - mean;
    var += d * d;
  }
  if (!segs.empty()) var /= segs.size();
  std::fprintf(stderr, "segments=%zu mean=%.2f std=%.2f\n", segs.size(), mean,
               std::sqrt(var));
}

int cmd_segment(const std::string& mode, const std::vector<std::string>& vads,
                const std::string& nodemap_path, const std::vector<int>& frames,
                const VadConfig& vcfg, const std::string& out_path) {
  vcfg.validate();
  std::vector<Segment> segs;
  if (mode == "vad") {
    if (nodemap_path.empty())
      throw std::runtime_error("vad mode needs --nodemap");
    if (vads.empty()) throw std::runtime_error("vad mode needs input files");
    const NodeMap nm = load_nodemap(nodemap_path);
    for (const auto& path : vads) {
      const VadOutputs v = read_vad_outputs(path);
      std::vector<double> llr(v.num_frames);
      std::vector<double> row(v.num_nodes);
      for (uint32_t t = 0; t < v.num_frames; ++t) {
        for (uint32_t k = 0; k < v.num_nodes; ++k) row[k] = v.at(t, k);
        llr[t] = frame_llr(row, nm);
      }
      const auto flags =
          smooth_and_decide(llr, vcfg.threshold, vcfg.smooth_window);
      const std::string id = fs::path(path).stem().string();
      auto one = vad_segments(flags, vcfg.min_len, vcfg.max_len, id);
      segs.insert(segs.end(), one.begin(), one.end());
    }
  } else if (mode == "hard") {
    if (frames.empty()) throw std::runtime_error("hard mode needs --frames");
    for (size_t i = 0; i < frames.size(); ++i) {
      auto one = hard_segments(frames[i], vcfg.min_len, vcfg.max_len,
                               "input" + std::to_string(i));
      segs.insert(segs.end(), one.begin(), one.end());
    }
  } else {
    throw std::runtime_error("unknown segment mode: " + mode);
  }
  std::ostream* os = nullptr;
  auto file = open_out(out_path, &os);
  write_segments(*os, segs);
  print_segment_stats(segs);
  return 0;
}

// ------------------------------------------------------------- oracle

int cmd_oracle(int max_frames, int max_vocab, int trials, uint64_t seed) {
  if (trials == 0) {
    std::fprintf(stderr, "warning: --trials 0, nothing verified\n");
    std::printf("oracle: vacuous pass\n");
    return 0;
  }
  const SuiteResult suites[] = {
      verify_oracle_equivalence(trials, max_frames, max_vocab, seed),
      verify_partition_identity(trials, max_frames, max_vocab, seed + 1000003),
      verify_exhaustive_beam(trials, seed + 2000003),
  };
  bool ok = true;
  for (const auto& s : suites) {
    if (s.ok()) {
      std::printf("%-20s pass (%d trials)\n", s.name.c_str(), s.trials);
    } else {
      std::printf("%-20s FAIL (%d/%d trials): %s\n", s.name.c_str(),
                  s.failures, s.trials, s.first_failure.c_str());
      ok = false;
    }
  }
  return ok ? 0 : 1;
}

// -------------------------------------------------------------- bench

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_bench(const std::string& manifest, DecodeFlags flags,
              const std::string& batch_sizes, const std::string& m2_list,
              const std::string& eos_modes, int repeat) {
  apply_jobs(flags.jobs);
  const auto utts = load_utterances(manifest);
  const auto scorer = make_scorer(flags.scorer, grid_num_tokens(utts));
  std::printf("%6s %6s %9s %10s %9s %10s %10s %12s\n", "batch", "m2", "eos",
              "wall_s", "xrt", "steps", "queries", "ctc_frames");
  for (const auto& bs : split_csv(batch_sizes)) {
    for (const auto& m2 : split_csv(m2_list)) {
      for (const auto& mode : split_csv(eos_modes)) {
        flags.batch_size = std::stoi(bs);
        flags.m2 = m2;
        flags.eos_mode = mode;
        const DecoderConfig cfg = flags.config();
        double wall = 0.0;
        TimedDecode timed;
        for (int rep = 0; rep < repeat; ++rep) {
          timed = run_decode(utts, *scorer, cfg, flags.batch_size);
          wall += timed.wall_seconds;
        }
        wall /= repeat;
        std::printf("%6s %6s %9s %10.4f %9.3g %10llu %10llu %12llu\n",
                    bs.c_str(), m2.c_str(), mode.c_str(), wall,
                    wall / timed.audio_seconds,
                    static_cast<unsigned long long>(timed.counters.steps),
                    static_cast<unsigned long long>(
                        timed.counters.scorer_queries),
                    static_cast<unsigned long long>(
                        timed.counters.ctc_frames_evaluated));
      }
    }
  }
  return 0;
}

// --------------------------------------------------------------- eval

int cmd_eval(const std::string& refs_path, const std::string& hyps_path) {
  const auto refs = read_refs(refs_path);
  const auto hyps = read_results(hyps_path);
  long long total_dist = 0, total_ref = 0;
  for (const auto& h : hyps) {
    auto it = refs.find(h.id);
    if (it == refs.end())
      throw std::runtime_error("no reference for " + h.id);
    const CerResult r = cer(it->second, h.tokens);
    log_at(LogLevel::kInfo, "%s dist=%d ref_len=%zu", h.id.c_str(),
           r.distance, it->second.size());
    total_dist += r.distance;
    total_ref += static_cast<long long>(it->second.size());
  }
  if (total_ref == 0) throw std::runtime_error("undefined rate: empty refs");
  std::printf("utts=%zu distance=%lld ref_tokens=%lld CER=%.4f\n",
              hyps.size(), total_dist, total_ref,
              static_cast<double>(total_dist) / total_ref);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"joint CTC/attention beam-search decoding over posterior grids"};
  app.require_subcommand(1);

  // gen
  SynthConfig synth;
  std::string gen_out = "data";
  auto* gen = app.add_subcommand("gen", "generate synthetic grids");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_option("--seed", synth.seed);
  gen->add_option("--num", synth.num_utts);
  gen->add_option("--t-min", synth.t_min);
  gen->add_option("--t-max", synth.t_max);
  gen->add_option("--vocab", synth.num_tokens, "|C|, excluding blank");
  gen->add_option("--style", synth.style, "random | planted | blank_heavy");
  gen->add_option("--blank-mass", synth.blank_mass);
  gen->add_option("--frame-shift", synth.frame_shift_ms, "milliseconds");

  // decode
  DecodeFlags dflags;
  std::string manifest, decode_out;
  auto* decode = app.add_subcommand("decode", "decode a manifest");
  decode->add_option("--manifest", manifest)->required();
  decode->add_option("--out", decode_out, "results path (default stdout)");
  dflags.attach(decode);

  // segment
  std::string seg_mode = "hard", nodemap_path, seg_out;
  std::vector<std::string> vad_files;
  std::vector<int> hard_frames;
  VadConfig vcfg;
  auto* segment = app.add_subcommand("segment", "split long inputs");
  segment->add_option("--mode", seg_mode, "vad | hard");
  segment->add_option("inputs", vad_files, "VADG files (vad mode)");
  segment->add_option("--nodemap", nodemap_path, "node map JSON (vad mode)");
  segment->add_option("--frames", hard_frames, "input lengths (hard mode)");
  segment->add_option("--min", vcfg.min_len, "minimum segment frames");
  segment->add_option("--max", vcfg.max_len, "maximum segment frames");
  segment->add_option("--threshold", vcfg.threshold, "LLR cut, nats");
  segment->add_option("--window", vcfg.smooth_window, "smoothing frames");
  segment->add_option("--out", seg_out, "segment manifest (default stdout)");

  // oracle
  int o_frames = 6, o_vocab = 3, o_trials = 200;
  uint64_t o_seed = 1;
  auto* oracle = app.add_subcommand("oracle", "brute-force verification");
  oracle->add_option("--max-frames", o_frames);
  oracle->add_option("--max-vocab", o_vocab);
  oracle->add_option("--trials", o_trials);
  oracle->add_option("--seed", o_seed);

  // bench
  DecodeFlags bflags;
  std::string bench_manifest, batch_sizes = "1,16", m2_list = "inf",
              eos_modes = "both";
  int repeat = 3;
  auto* bench = app.add_subcommand("bench", "sweep decoding configurations");
  bench->add_option("--manifest", bench_manifest)->required();
  bench->add_option("--batch-sizes", batch_sizes, "comma-separated");
  bench->add_option("--m2-list", m2_list, "comma-separated, 'inf' allowed");
  bench->add_option("--eos-modes", eos_modes, "comma-separated");
  bench->add_option("--repeat", repeat, "trials to average");
  bflags.attach(bench);

  // eval
  std::string refs_path, hyps_path;
  auto* eval = app.add_subcommand("eval", "token-level CER");
  eval->add_option("--refs", refs_path)->required();
  eval->add_option("--hyps", hyps_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(synth, gen_out);
    if (decode->parsed()) return cmd_decode(manifest, dflags, decode_out);
    if (segment->parsed())
      return cmd_segment(seg_mode, vad_files, nodemap_path, hard_frames, vcfg,
                         seg_out);
    if (oracle->parsed())
      return cmd_oracle(o_frames, o_vocab, o_trials, o_seed);
    if (bench->parsed())
      return cmd_bench(bench_manifest, bflags, batch_sizes, m2_list,
                       eos_modes, repeat);
    if (eval->parsed()) return cmd_eval(refs_path, hyps_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
