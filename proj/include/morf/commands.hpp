#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "morf/descriptor.hpp"
#include "morf/evaluation.hpp"
#include "morf/synth.hpp"
#include "morf/temporal_filter.hpp"

namespace morf {

/// A sweep of one integer descriptor parameter ("o", "gx" or "gy").
struct ParamSweep {
  std::string name;
  std::vector<int> values;
};

/// "o=4..10" or "gx=4,6,8". Throws ConfigError.
ParamSweep parse_param_sweep(std::string_view text);

struct RunConfig {
  std::string command;
  std::filesystem::path manifest;
  std::filesystem::path input;
  std::filesystem::path out;
  MorfParams morf;
  TemporalFilterConfig filter;
  GridSpec grid = default_grid();
  std::optional<ParamSweep> sweep;
  int jobs = 1;
  std::uint64_t seed = 7;
  MotionDatasetSpec synth;

  /// Checks parameters and that input paths exist. Throws ConfigError.
  void validate() const;
};

/// Builds a RunConfig from defaults, then the optional config file object,
/// then the flag object; later sources win key by key. Keys: manifest,
/// input, out, levels, gx, gy, o, alpha, normalize, amplify ("sine" or
/// "log"), low_hz, high_hz, spatial_sigma, fps, grid, param_sweep, jobs,
/// seed, subjects, reps, noise. Unknown keys throw ConfigError.
RunConfig resolve_config(const std::string& command, const nlohmann::json& file_config,
                         const nlohmann::json& flags);

/// Each returns the process exit status and writes progress to `out`,
/// per-sequence warnings to `err`.
int cmd_extract(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_pyramid_dump(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_phase_dump(const RunConfig& cfg, std::ostream& out, std::ostream& err);

int run_command(const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace morf
