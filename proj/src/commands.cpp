#include "morf/commands.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <set>

#include "morf/dataset.hpp"
#include "morf/descriptor_io.hpp"
#include "morf/errors.hpp"
#include "morf/image_io.hpp"
#include "morf/parallel.hpp"
#include "morf/plane_io.hpp"
#include "morf/pyramid.hpp"

namespace morf {

namespace fs = std::filesystem;
using nlohmann::json;

ParamSweep parse_param_sweep(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw ConfigError("param sweep '" + std::string(text) + "' lacks '='");
  ParamSweep sweep{std::string(text.substr(0, eq)), {}};
  if (sweep.name != "o" && sweep.name != "gx" && sweep.name != "gy") {
    throw ConfigError("param sweep supports o, gx or gy, not '" + sweep.name + "'");
  }
  const std::string body(text.substr(eq + 1));
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("param sweep value '" + s + "' is not an integer");
    }
  };
  if (const auto dots = body.find(".."); dots != std::string::npos) {
    const int lo = to_int(body.substr(0, dots));
    const int hi = to_int(body.substr(dots + 2));
    if (lo > hi) throw ConfigError("param sweep range " + body + " is empty");
    for (int v = lo; v <= hi; ++v) sweep.values.push_back(v);
  } else {
    std::size_t start = 0;
    while (start <= body.size()) {
      const auto comma = body.find(',', start);
      sweep.values.push_back(to_int(body.substr(start, comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  for (int v : sweep.values) {
    if (v < 1) throw ConfigError("param sweep values must be >= 1");
  }
  return sweep;
}

void RunConfig::validate() const {
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  morf.validate();
  filter.validate();
  const bool needs_manifest = command == "extract" || command == "eval";
  if (needs_manifest) {
    if (manifest.empty()) throw ConfigError(command + " needs --manifest");
    if (!fs::is_regular_file(manifest)) {
      throw ConfigError("manifest '" + manifest.string() + "' does not exist");
    }
  }
  if (command == "pyramid-dump" || command == "phase-dump") {
    if (input.empty()) throw ConfigError(command + " needs --input");
    if (!fs::exists(input)) throw ConfigError("input '" + input.string() + "' does not exist");
  }
  if (command != "eval" && sweep) throw ConfigError("--param-sweep applies to eval only");
  if (command == "synth") synth.validate();
  if (out.empty()) throw ConfigError(command + " needs --out");
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "manifest", "input", "out", "levels", "gx", "gy", "o", "alpha", "normalize",
      "amplify", "low_hz", "high_hz", "spatial_sigma", "fps", "grid", "param_sweep",
      "jobs", "seed", "subjects", "reps", "noise"};
  return keys;
}

void apply(RunConfig& cfg, const json& src, const std::string& origin) {
  if (src.is_null()) return;
  if (!src.is_object()) throw ConfigError(origin + " must be a JSON object");
  try {
    for (const auto& [key, value] : src.items()) {
      if (!known_keys().contains(key)) throw ConfigError("unknown " + origin + " key '" + key + "'");
      if (key == "manifest") cfg.manifest = value.get<std::string>();
      else if (key == "input") cfg.input = value.get<std::string>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "levels") cfg.morf.levels = value.get<std::vector<int>>();
      else if (key == "gx") cfg.morf.gx = value.get<int>();
      else if (key == "gy") cfg.morf.gy = value.get<int>();
      else if (key == "o") cfg.morf.o = value.get<int>();
      else if (key == "alpha") cfg.morf.alpha = value.get<double>();
      else if (key == "normalize") cfg.morf.normalize = value.get<bool>();
      else if (key == "amplify") {
        const auto mode = value.get<std::string>();
        if (mode == "sine") cfg.morf.amplify_mode = AmplifyMode::sine;
        else if (mode == "log") cfg.morf.amplify_mode = AmplifyMode::logarithm;
        else throw ConfigError("amplify must be 'sine' or 'log', not '" + mode + "'");
      }
      else if (key == "low_hz") cfg.filter.low_hz = value.get<double>();
      else if (key == "high_hz") cfg.filter.high_hz = value.get<double>();
      else if (key == "spatial_sigma") cfg.filter.spatial_sigma = value.get<double>();
      else if (key == "fps") cfg.filter.fps = cfg.synth.fps = value.get<double>();
      else if (key == "grid") cfg.grid = parse_grid_spec(value.get<std::string>());
      else if (key == "param_sweep") cfg.sweep = parse_param_sweep(value.get<std::string>());
      else if (key == "jobs") cfg.jobs = value.get<int>();
      else if (key == "seed") cfg.seed = cfg.synth.seed = value.get<std::uint64_t>();
      else if (key == "subjects") cfg.synth.subjects = value.get<int>();
      else if (key == "reps") cfg.synth.reps = value.get<int>();
      else if (key == "noise") cfg.synth.noise_sigma = value.get<double>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw IoError("cannot write '" + path.string() + "'");
}

}  // namespace

RunConfig resolve_config(const std::string& command, const json& file_config,
                         const json& flags) {
  RunConfig cfg;
  cfg.command = command;
  apply(cfg, file_config, "config file");
  apply(cfg, flags, "flag");
  return cfg;
}

int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const DatasetManifest manifest = load_manifest(cfg.manifest);
  manifest.validate();
  const ExtractionResult result = extract_all(manifest, cfg.morf, cfg.filter, cfg.jobs);
  DescriptorSet set{cfg.morf, {}};
  int failures = 0;
  for (std::size_t i = 0; i < manifest.sequences.size(); ++i) {
    const SequenceAnnotation& seq = manifest.sequences[i];
    if (!result.errors[i].empty()) {
      ++failures;
      err << "error: sequence '" << seq.id << "': " << result.errors[i] << "\n";
      continue;
    }
    set.records.push_back({seq.id, seq.label, result.descriptors[i]});
  }
  write_descriptors(cfg.out, set);
  out << "wrote " << set.records.size() << " descriptors of length " << cfg.morf.length()
      << " to " << cfg.out.string() << "\n";
  if (failures > 0) err << failures << " sequence(s) failed\n";
  return failures == 0 ? 0 : 1;
}

namespace {

void print_summary(std::ostream& out, const std::string& prefix, const Metrics& m) {
  out << prefix << "accuracy " << format_double(m.accuracy) << " macro-F1 "
      << format_double(m.f_measure) << "\n";
}

int eval_sweep(const RunConfig& cfg, const DatasetManifest& manifest, std::ostream& out,
               std::ostream& err) {
  const ParamSweep& sweep = *cfg.sweep;
  // MOR pairs do not depend on grid or binning, so they are computed once.
  const std::size_t n = manifest.sequences.size();
  std::vector<std::vector<MorPair>> pairs(n);
  std::vector<std::string> errors(n);
  parallel_for(n, cfg.jobs, [&](std::size_t i) {
    const SequenceAnnotation& seq = manifest.sequences[i];
    try {
      TemporalFilterConfig fc = cfg.filter;
      fc.fps = seq.fps;
      pairs[i] = compute_mor_pairs(load_sequence(seq, manifest.base_dir), {seq.onset, seq.apex},
                                   cfg.morf, fc);
    } catch (const std::exception& e) {
      errors[i] = e.what();
      if (errors[i].empty()) errors[i] = "unknown error";
    }
  });

  int failures = 0;
  std::vector<std::string> failed;
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i].empty()) continue;
    ++failures;
    failed.push_back(manifest.sequences[i].id);
    err << "error: sequence '" << manifest.sequences[i].id << "': " << errors[i] << "\n";
  }

  json records = json::array();
  for (int value : sweep.values) {
    MorfParams params = cfg.morf;
    (sweep.name == "o" ? params.o : sweep.name == "gx" ? params.gx : params.gy) = value;
    params.validate();
    LabeledSamples samples;
    samples.classes = manifest.classes;
    for (std::size_t i = 0; i < n; ++i) {
      if (!errors[i].empty()) continue;
      const SequenceAnnotation& seq = manifest.sequences[i];
      samples.ids.push_back(seq.id);
      samples.subjects.push_back(seq.subject_id);
      samples.labels.push_back(manifest.class_index(seq.label));
      samples.features.push_back(assemble_descriptor(pairs[i], params).values);
    }
    Metrics m = evaluate_samples(samples, cfg.grid, cfg.jobs);
    m.failed_ids = failed;
    json rec = metrics_to_json(m, samples);
    rec[sweep.name] = value;
    records.push_back(std::move(rec));
    write_text(cfg.out / ("predictions_" + sweep.name + std::to_string(value) + ".csv"),
               predictions_csv(m, samples));
    print_summary(out, sweep.name + "=" + std::to_string(value) + ": ", m);
  }
  json doc{{"sweep", sweep.name}, {"records", std::move(records)}};
  write_text(cfg.out / "metrics.json", doc.dump(2) + "\n");
  return failures == 0 ? 0 : 1;
}

}  // namespace

int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  cfg.validate();
  const DatasetManifest manifest = load_manifest(cfg.manifest);
  manifest.validate();
  if (cfg.sweep) return eval_sweep(cfg, manifest, out, err);

  EvalOptions options{cfg.morf, cfg.filter, cfg.grid, cfg.jobs};
  const LosoReport report = evaluate_loso(manifest, options, &err);
  write_text(cfg.out / "metrics.json", metrics_to_json(report.metrics, report.samples).dump(2) + "\n");
  write_text(cfg.out / "predictions.csv", predictions_csv(report.metrics, report.samples));
  print_summary(out, "", report.metrics);
  return report.metrics.failed_ids.empty() ? 0 : 1;
}

int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  cfg.validate();
  MotionDatasetSpec spec = cfg.synth;
  spec.seed = cfg.seed;
  make_motion_dataset(spec, cfg.out);
  out << (cfg.out / "manifest.json").string() << "\n";
  return 0;
}

namespace {

int max_level(const MorfParams& p) { return *std::max_element(p.levels.begin(), p.levels.end()); }

}  // namespace

// level_<k>.f32 per band and residual.f32 (level = band count + 1).
int cmd_pyramid_dump(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  cfg.validate();
  const ImagePyramid pyr = build_pyramid(read_frame(cfg.input), max_level(cfg.morf));
  fs::create_directories(cfg.out);
  for (int k = 1; k <= pyr.num_levels(); ++k) {
    write_float_plane(cfg.out / ("level_" + std::to_string(k) + ".f32"), pyr.level(k), k, 0);
  }
  write_float_plane(cfg.out / "residual.f32", pyr.residual, pyr.num_levels() + 1, 0);
  out << "wrote " << pyr.num_levels() + 1 << " planes to " << cfg.out.string() << "\n";
  return 0;
}

// Input is a frame directory processed from its first to its last frame;
// writes mor_L<k>_pc.f32 (channel 0) and mor_L<k>_ps.f32 (channel 1).
int cmd_phase_dump(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  cfg.validate();
  std::vector<GrayFrame> frames;
  for (const fs::path& p : list_frame_files(cfg.input)) frames.push_back(read_frame(p));
  if (frames.size() < 2) throw SequenceError("phase-dump needs at least 2 frames");
  const std::vector<MorPair> pairs = compute_mor_pairs(
      frames, {0, static_cast<int>(frames.size()) - 1}, cfg.morf, cfg.filter);
  fs::create_directories(cfg.out);
  for (const MorPair& p : pairs) {
    const std::string stem = "mor_L" + std::to_string(p.level);
    write_float_plane(cfg.out / (stem + "_pc.f32"), p.mean_pc, p.level, 0);
    write_float_plane(cfg.out / (stem + "_ps.f32"), p.mean_ps, p.level, 1);
  }
  out << "wrote " << 2 * pairs.size() << " planes to " << cfg.out.string() << "\n";
  return 0;
}

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.command == "extract") return cmd_extract(cfg, out, err);
  if (cfg.command == "eval") return cmd_eval(cfg, out, err);
  if (cfg.command == "synth") return cmd_synth(cfg, out, err);
  if (cfg.command == "pyramid-dump") return cmd_pyramid_dump(cfg, out, err);
  if (cfg.command == "phase-dump") return cmd_phase_dump(cfg, out, err);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace morf
