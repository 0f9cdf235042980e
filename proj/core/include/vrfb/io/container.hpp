#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "vrfb/nn/composite_net.hpp"
#include "vrfb/pinn/loss.hpp"

namespace vrfb::io {

/// A trained network with its variant and optional SA weights. On disk: an
/// 8-byte magic, a little-endian u64 manifest length, a JSON manifest, then
/// the parameters and weights as little-endian binary64.
struct ModelContainer {
  nn::CompositeNet net;
  pinn::Variant variant = pinn::Variant::Pinn;
  std::optional<pinn::SAWeights> weights;
  std::map<std::string, std::string> metadata;
};

/// Writes to a sibling temp file and renames it over the target.
void write_container(const std::filesystem::path& path, const ModelContainer& c);
/// Throws ConfigError on a malformed or truncated file.
ModelContainer read_container(const std::filesystem::path& path);

/// Writes text through a temp file and rename.
void write_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace vrfb::io
