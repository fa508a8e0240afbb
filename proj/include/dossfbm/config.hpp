#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dossfbm/bench.hpp"
#include "dossfbm/constants.hpp"
#include "dossfbm/scheme.hpp"

namespace dossfbm {

struct BenchGrid {
  std::vector<double> hurst_list{0.3, 0.35, 0.45};
  std::vector<int> n_list{32, 64, 128, 256, 512};
  std::vector<std::uint64_t> seeds = seed_range(0, 20);
  int n_ref = 0;
  double slope_safety = 0.9;
  std::vector<int> lemma_levels{16, 64, 256};
  std::vector<int> lemma_ns{64, 256};
  int lemma_seeds = 20;
  int samples = 1000;
  int taylor_samples = 1000;
  int taylor_level = 16;

  static std::vector<std::uint64_t> seed_range(std::uint64_t first, int count);
  bool operator==(const BenchGrid&) const = default;
};

struct OutputOptions {
  std::string dir = "out";
  bool path_csv = true;
  bool trajectories = true;
  /// Adds a wall_ms column to convergence.csv (breaks byte-identical reruns).
  bool wall_ms_column = false;
  bool operator==(const OutputOptions&) const = default;
};

/// Everything a CLI run needs. Serialized with every default materialized.
struct RunConfig {
  SchemeConfig scheme;
  BenchGrid bench;
  OutputOptions output;
  unsigned workers = 0;
  bool operator==(const RunConfig&) const = default;
};

/// Parses a JSON document. `hurst` is the only required key; unknown keys are
/// rejected. Errors are ConfigError with field() set and the message carrying
/// the line of the offending text.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::string& path);

nlohmann::json to_json(const RunConfig& cfg);
/// Pretty-printed JSON; parse_run_config(serialize(c)) == c.
std::string serialize(const RunConfig& cfg);

ConvergenceConfig convergence_config(const RunConfig& cfg);
LemmaConfig lemma_config(const RunConfig& cfg);

nlohmann::json to_json(const PathStats& stats);
nlohmann::json to_json(const ConstantSet& constants);
nlohmann::json to_json(const ConvergenceReport& report);
nlohmann::json to_json(const LemmaResult& result);
nlohmann::json to_json(const TaylorReport& report);

}  // namespace dossfbm
