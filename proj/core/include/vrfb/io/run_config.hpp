#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vrfb/model/cell_parameters.hpp"
#include "vrfb/solver/reference_solver.hpp"
#include "vrfb/train/trainer.hpp"

namespace vrfb::io {

struct GridSettings {
  int nx = 40;  // intervals per half cell
  int ny = 100;
};

struct DataSettings {
  int points_per_line = 40;  // on the membrane and on the negative collector each
  std::uint64_t seed = 7;
  std::filesystem::path labeled_path;  // empty: <output_dir>/<stage>/labeled.csv
};

/// Everything a command needs. Parsed from JSON; absent keys keep defaults.
struct RunConfig {
  model::CellParameters params;
  GridSettings grid;
  solver::SolverOptions solver;
  bool warm_start = true;
  std::vector<double> soc_grid;  // strictly increasing inside [soc_min, soc_max]
  train::TrainConfig train;
  DataSettings data;
  std::filesystem::path output_dir = "out";

  static RunConfig defaults();
  /// Throws ConfigError with a dotted field path.
  void validate() const;
  solver::Grid make_grid() const { return solver::Grid(grid.nx, grid.ny, params); }
  std::filesystem::path stage_dir(model::Stage s) const;
  std::filesystem::path labeled_path(model::Stage s) const;
};

/// Unknown keys are errors. The optional base supplies values for absent keys.
RunConfig parse_run_config(const std::string& json_text, const RunConfig& base = RunConfig::defaults());
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json_string(const RunConfig& c);

}  // namespace vrfb::io
