#include "json_codec.hpp"

#include <cmath>
#include <utility>

#include "vrfb/error.hpp"

namespace vrfb::io::codec {

namespace {

using ojson = nlohmann::ordered_json;

const std::pair<const char*, double model::CellParameters::*> kScalarFields[] = {
    {"H", &model::CellParameters::H},
    {"L", &model::CellParameters::L},
    {"W", &model::CellParameters::W},
    {"a", &model::CellParameters::a},
    {"d_m", &model::CellParameters::d_m},
    {"I", &model::CellParameters::I},
    {"D2", &model::CellParameters::D2},
    {"D4", &model::CellParameters::D4},
    {"D_H", &model::CellParameters::D_H},
    {"D_SO4", &model::CellParameters::D_SO4},
    {"D_HSO4", &model::CellParameters::D_HSO4},
    {"T", &model::CellParameters::T},
    {"sigma_s", &model::CellParameters::sigma_s},
    {"sigma_m", &model::CellParameters::sigma_m},
    {"E0_pos", &model::CellParameters::E0_pos},
    {"E0_neg", &model::CellParameters::E0_neg},
    {"k_pos", &model::CellParameters::k_pos},
    {"k_neg", &model::CellParameters::k_neg},
    {"alpha_a", &model::CellParameters::alpha_a},
    {"alpha_c", &model::CellParameters::alpha_c},
    {"eps", &model::CellParameters::eps},
    {"c0", &model::CellParameters::c0},
    {"F", &model::CellParameters::F},
    {"R", &model::CellParameters::R},
    {"soc_min", &model::CellParameters::soc_min},
    {"soc_max", &model::CellParameters::soc_max},
};

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

template <class Known>
void reject_unknown(const json& j, const std::string& path, const Known& known) {
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const auto& k : known) found = found || key == k;
    if (!found) throw ConfigError(join(path, key) + ": unknown key");
  }
}

int read_int(const json& j, const std::string& path) {
  const long long v = read_integer(j, path);
  if (v < -2147483647LL || v > 2147483647LL) throw ConfigError(path + ": out of range");
  return static_cast<int>(v);
}

}  // namespace

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected an object");
}

double read_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(path + ": must be finite");
  return v;
}

long long read_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw ConfigError(path + ": expected an integer");
  if (j.is_number_unsigned() && j.get<unsigned long long>() > 9223372036854775807ULL) {
    throw ConfigError(path + ": out of range");
  }
  return j.get<long long>();
}

std::string read_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path + ": expected a string");
  return j.get<std::string>();
}

bool read_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path + ": expected true or false");
  return j.get<bool>();
}

ojson to_json(const model::CellParameters& p) {
  ojson j = ojson::object();
  for (const auto& [name, member] : kScalarFields) j[name] = p.*member;
  j["v"] = {p.v[0], p.v[1]};
  return j;
}

void read(const json& j, const std::string& path, model::CellParameters& p) {
  require_object(j, path);
  std::vector<std::string> known{"v"};
  for (const auto& [name, member] : kScalarFields) {
    known.emplace_back(name);
    if (j.contains(name)) p.*member = read_number(j.at(name), join(path, name));
  }
  if (j.contains("v")) {
    const json& v = j.at("v");
    if (!v.is_array() || v.size() != 2) throw ConfigError(join(path, "v") + ": expected [v_neg, v_pos]");
    p.v[0] = read_number(v[0], join(path, "v[0]"));
    p.v[1] = read_number(v[1], join(path, "v[1]"));
  }
  reject_unknown(j, path, known);
}

ojson to_json(const nn::Architecture& a) {
  return {{"inputs", a.inputs}, {"hidden_layers", a.hidden_layers}, {"width", a.width},
          {"outputs", a.outputs}};
}

void read(const json& j, const std::string& path, nn::Architecture& a) {
  require_object(j, path);
  reject_unknown(j, path, std::array{"inputs", "hidden_layers", "width", "outputs"});
  if (j.contains("inputs")) a.inputs = read_int(j.at("inputs"), join(path, "inputs"));
  if (j.contains("hidden_layers")) {
    a.hidden_layers = read_int(j.at("hidden_layers"), join(path, "hidden_layers"));
  }
  if (j.contains("width")) a.width = read_int(j.at("width"), join(path, "width"));
  if (j.contains("outputs")) a.outputs = read_int(j.at("outputs"), join(path, "outputs"));
}

ojson to_json(const pinn::SamplingConfig& s) {
  return {{"interior_per_side", s.interior_per_side},
          {"vertical_boundary", s.vertical_boundary},
          {"horizontal_boundary", s.horizontal_boundary},
          {"epinn_soc", s.epinn_soc},
          {"epinn_y", s.epinn_y}};
}

void read(const json& j, const std::string& path, pinn::SamplingConfig& s) {
  require_object(j, path);
  const std::array<std::pair<const char*, int pinn::SamplingConfig::*>, 5> fields{{
      {"interior_per_side", &pinn::SamplingConfig::interior_per_side},
      {"vertical_boundary", &pinn::SamplingConfig::vertical_boundary},
      {"horizontal_boundary", &pinn::SamplingConfig::horizontal_boundary},
      {"epinn_soc", &pinn::SamplingConfig::epinn_soc},
      {"epinn_y", &pinn::SamplingConfig::epinn_y},
  }};
  std::vector<std::string> known;
  for (const auto& [name, member] : fields) {
    known.emplace_back(name);
    if (j.contains(name)) s.*member = read_int(j.at(name), join(path, name));
  }
  reject_unknown(j, path, known);
}

ojson to_json(const train::TrainConfig& c) {
  ojson j;
  j["adam_iters"] = c.adam_iters;
  j["lbfgs_iters"] = c.lbfgs_iters;
  j["lr0"] = c.lr0;
  j["lr_decay"] = c.lr_decay;
  j["lr_decay_every"] = c.lr_decay_every;
  j["rho"] = c.rho;
  j["adam"] = {{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"epsilon", c.adam.epsilon}};
  j["lbfgs_history"] = c.lbfgs_history;
  j["gradient_tolerance"] = c.gradient_tolerance;
  j["init_seed"] = c.init_seed;
  j["sample_seed"] = c.sample_seed;
  j["variant"] = std::string(pinn::to_string(c.variant));
  j["stage"] = std::string(model::to_string(c.stage));
  j["arch"] = to_json(c.arch);
  j["sampling"] = to_json(c.sampling);
  j["desk_scale"] = c.desk_scale;
  return j;
}

void read(const json& j, const std::string& path, train::TrainConfig& c) {
  require_object(j, path);
  reject_unknown(j, path,
                 std::array{"adam_iters", "lbfgs_iters", "lr0", "lr_decay", "lr_decay_every", "rho",
                            "adam", "lbfgs_history", "gradient_tolerance", "init_seed",
                            "sample_seed", "variant", "stage", "arch", "sampling", "desk_scale"});
  auto p = [&](const char* k) { return join(path, k); };
  // desk_scale first: it resets the scale-dependent defaults that the other
  // keys may then override
  if (j.contains("desk_scale") && read_bool(j.at("desk_scale"), p("desk_scale"))) {
    const train::TrainConfig d = train::TrainConfig::desk();
    c.adam_iters = d.adam_iters;
    c.lbfgs_iters = d.lbfgs_iters;
    c.arch = d.arch;
    c.sampling = d.sampling;
    c.desk_scale = true;
  }
  if (j.contains("adam_iters")) c.adam_iters = read_int(j.at("adam_iters"), p("adam_iters"));
  if (j.contains("lbfgs_iters")) c.lbfgs_iters = read_int(j.at("lbfgs_iters"), p("lbfgs_iters"));
  if (j.contains("lr0")) c.lr0 = read_number(j.at("lr0"), p("lr0"));
  if (j.contains("lr_decay")) c.lr_decay = read_number(j.at("lr_decay"), p("lr_decay"));
  if (j.contains("lr_decay_every")) {
    c.lr_decay_every = read_int(j.at("lr_decay_every"), p("lr_decay_every"));
  }
  if (j.contains("rho")) c.rho = read_number(j.at("rho"), p("rho"));
  if (j.contains("adam")) {
    const json& a = j.at("adam");
    require_object(a, p("adam"));
    reject_unknown(a, p("adam"), std::array{"beta1", "beta2", "epsilon"});
    if (a.contains("beta1")) c.adam.beta1 = read_number(a.at("beta1"), p("adam.beta1"));
    if (a.contains("beta2")) c.adam.beta2 = read_number(a.at("beta2"), p("adam.beta2"));
    if (a.contains("epsilon")) c.adam.epsilon = read_number(a.at("epsilon"), p("adam.epsilon"));
  }
  if (j.contains("lbfgs_history")) {
    c.lbfgs_history = read_int(j.at("lbfgs_history"), p("lbfgs_history"));
  }
  if (j.contains("gradient_tolerance")) {
    c.gradient_tolerance = read_number(j.at("gradient_tolerance"), p("gradient_tolerance"));
  }
  auto seed = [&](const char* k) {
    const long long v = read_integer(j.at(k), p(k));
    if (v < 0) throw ConfigError(p(k) + ": must be >= 0");
    return static_cast<std::uint64_t>(v);
  };
  if (j.contains("init_seed")) c.init_seed = seed("init_seed");
  if (j.contains("sample_seed")) c.sample_seed = seed("sample_seed");
  if (j.contains("variant")) {
    c.variant = pinn::parse_variant(read_string(j.at("variant"), p("variant")));
  }
  if (j.contains("stage")) {
    try {
      c.stage = model::parse_stage(read_string(j.at("stage"), p("stage")));
    } catch (const std::exception& e) {
      throw ConfigError(p("stage") + ": " + e.what());
    }
  }
  if (j.contains("arch")) read(j.at("arch"), p("arch"), c.arch);
  if (j.contains("sampling")) read(j.at("sampling"), p("sampling"), c.sampling);
}

ojson to_json(const nn::SideRanges& r) {
  return {{"phi_l", {r.phi_l.min, r.phi_l.max}}, {"phi_s", {r.phi_s.min, r.phi_s.max}}};
}

void read(const json& j, const std::string& path, nn::SideRanges& r) {
  require_object(j, path);
  reject_unknown(j, path, std::array{"phi_l", "phi_s"});
  auto pair = [&](const char* k, nn::PotentialRange& out) {
    const json& v = j.at(k);
    if (!v.is_array() || v.size() != 2) throw ConfigError(join(path, k) + ": expected [min, max]");
    out.min = read_number(v[0], join(path, k) + "[0]");
    out.max = read_number(v[1], join(path, k) + "[1]");
  };
  if (j.contains("phi_l")) pair("phi_l", r.phi_l);
  if (j.contains("phi_s")) pair("phi_s", r.phi_s);
}

}  // namespace vrfb::io::codec
