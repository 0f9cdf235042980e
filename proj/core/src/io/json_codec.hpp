#pragma once

// Private to the core library: nlohmann::json never crosses the public API.

#include <string>

#include <json.hpp>

#include "vrfb/model/cell_parameters.hpp"
#include "vrfb/nn/composite_net.hpp"
#include "vrfb/pinn/sampling.hpp"
#include "vrfb/train/trainer.hpp"

namespace vrfb::io::codec {

using nlohmann::json;

nlohmann::ordered_json to_json(const model::CellParameters& p);
nlohmann::ordered_json to_json(const nn::Architecture& a);
nlohmann::ordered_json to_json(const pinn::SamplingConfig& s);
nlohmann::ordered_json to_json(const train::TrainConfig& c);
nlohmann::ordered_json to_json(const nn::SideRanges& r);

// Each reader overlays the keys present in j onto out, rejects unknown keys
// and reports errors with the dotted path of the offending field.
void read(const json& j, const std::string& path, model::CellParameters& out);
void read(const json& j, const std::string& path, nn::Architecture& out);
void read(const json& j, const std::string& path, pinn::SamplingConfig& out);
void read(const json& j, const std::string& path, train::TrainConfig& out);
void read(const json& j, const std::string& path, nn::SideRanges& out);

double read_number(const json& j, const std::string& path);
long long read_integer(const json& j, const std::string& path);
std::string read_string(const json& j, const std::string& path);
bool read_bool(const json& j, const std::string& path);
void require_object(const json& j, const std::string& path);

}  // namespace vrfb::io::codec
