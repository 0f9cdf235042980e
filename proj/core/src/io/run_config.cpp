#include "vrfb/io/run_config.hpp"

#include <fstream>
#include <sstream>

#include "json_codec.hpp"
#include "vrfb/error.hpp"

namespace vrfb::io {

RunConfig RunConfig::defaults() {
  RunConfig c;
  for (int i = 0; i <= 14; ++i) c.soc_grid.push_back(0.1 + 0.05 * i);
  return c;
}

void RunConfig::validate() const {
  params.validate();
  if (grid.nx < 8) throw ConfigError("grid.nx must be >= 8");
  if (grid.ny < 16) throw ConfigError("grid.ny must be >= 16");
  if (!(solver.tolerance > 0.0)) throw ConfigError("solver.tolerance must be > 0");
  if (solver.max_iterations < 1) throw ConfigError("solver.max_iterations must be >= 1");
  if (soc_grid.empty()) throw ConfigError("soc_grid must not be empty");
  for (std::size_t i = 0; i < soc_grid.size(); ++i) {
    const double s = soc_grid[i];
    if (s < params.soc_min || s > params.soc_max) {
      throw ConfigError("soc_grid[" + std::to_string(i) + "] = " + std::to_string(s) +
                        " is outside [soc_min, soc_max]");
    }
    if (i > 0 && !(s > soc_grid[i - 1])) {
      throw ConfigError("soc_grid must be strictly increasing at index " + std::to_string(i));
    }
  }
  train.validate();
  if (data.points_per_line < 1) throw ConfigError("data.points_per_line must be >= 1");
  if (output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

std::filesystem::path RunConfig::stage_dir(model::Stage s) const {
  return output_dir / std::string(model::to_string(s));
}

std::filesystem::path RunConfig::labeled_path(model::Stage s) const {
  return data.labeled_path.empty() ? stage_dir(s) / "labeled.csv" : data.labeled_path;
}

RunConfig parse_run_config(const std::string& text, const RunConfig& base) {
  using codec::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  codec::require_object(j, "");
  RunConfig c = base;
  for (const auto& [key, value] : j.items()) {
    if (key == "params") {
      codec::read(value, "params", c.params);
    } else if (key == "grid") {
      codec::require_object(value, "grid");
      for (const auto& [k, v] : value.items()) {
        if (k == "nx") c.grid.nx = static_cast<int>(codec::read_integer(v, "grid.nx"));
        else if (k == "ny") c.grid.ny = static_cast<int>(codec::read_integer(v, "grid.ny"));
        else throw ConfigError("grid." + k + ": unknown key");
      }
    } else if (key == "solver") {
      codec::require_object(value, "solver");
      for (const auto& [k, v] : value.items()) {
        if (k == "tolerance") c.solver.tolerance = codec::read_number(v, "solver.tolerance");
        else if (k == "max_iterations") c.solver.max_iterations = static_cast<int>(codec::read_integer(v, "solver.max_iterations"));
        else if (k == "warm_start") c.warm_start = codec::read_bool(v, "solver.warm_start");
        else throw ConfigError("solver." + k + ": unknown key");
      }
    } else if (key == "soc_grid") {
      if (!value.is_array()) throw ConfigError("soc_grid: expected an array of numbers");
      c.soc_grid.clear();
      for (std::size_t i = 0; i < value.size(); ++i) {
        c.soc_grid.push_back(codec::read_number(value[i], "soc_grid[" + std::to_string(i) + "]"));
      }
    } else if (key == "train") {
      codec::read(value, "train", c.train);
    } else if (key == "data") {
      codec::require_object(value, "data");
      for (const auto& [k, v] : value.items()) {
        if (k == "points_per_line") c.data.points_per_line = static_cast<int>(codec::read_integer(v, "data.points_per_line"));
        else if (k == "seed") {
          const long long s = codec::read_integer(v, "data.seed");
          if (s < 0) throw ConfigError("data.seed: must be >= 0");
          c.data.seed = static_cast<std::uint64_t>(s);
        } else if (k == "labeled_path") c.data.labeled_path = codec::read_string(v, "data.labeled_path");
        else throw ConfigError("data." + k + ": unknown key");
      }
    } else if (key == "output_dir") {
      c.output_dir = codec::read_string(value, "output_dir");
    } else {
      throw ConfigError(key + ": unknown key");
    }
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  try {
    return parse_run_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_json_string(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["params"] = codec::to_json(c.params);
  j["grid"] = {{"nx", c.grid.nx}, {"ny", c.grid.ny}};
  j["solver"] = {{"tolerance", c.solver.tolerance},
                 {"max_iterations", c.solver.max_iterations},
                 {"warm_start", c.warm_start}};
  j["soc_grid"] = c.soc_grid;
  j["train"] = codec::to_json(c.train);
  j["data"] = {{"points_per_line", c.data.points_per_line},
               {"seed", c.data.seed},
               {"labeled_path", c.data.labeled_path.string()}};
  j["output_dir"] = c.output_dir.string();
  return j.dump(2) + "\n";
}

}  // namespace vrfb::io
