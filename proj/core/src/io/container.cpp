#include "vrfb/io/container.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json_codec.hpp"
#include "vrfb/error.hpp"

namespace vrfb::io {

namespace {

constexpr std::array<char, 8> kMagic = {'V', 'R', 'F', 'B', 'N', 'E', 'T', '1'};
constexpr int kFormatVersion = 1;

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xffU));
}

std::uint64_t get_u64(const std::string& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) {
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[at + b])) << (8 * b);
  }
  return v;
}

void put_doubles(std::string& out, const Eigen::VectorXd& v) {
  for (double d : v) put_u64(out, std::bit_cast<std::uint64_t>(d));
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_container(const std::filesystem::path& path, const ModelContainer& c) {
  using model::Side;
  nlohmann::ordered_json m;
  m["format_version"] = kFormatVersion;
  m["variant"] = std::string(pinn::to_string(c.variant));
  m["stage"] = std::string(model::to_string(c.net.stage()));
  m["architecture"] = codec::to_json(c.net.architecture());
  m["params"] = codec::to_json(c.net.params());
  m["ranges"] = {{"negative", codec::to_json(c.net.ranges(Side::Negative))},
                 {"positive", codec::to_json(c.net.ranges(Side::Positive))}};
  m["parameter_count"] = c.net.parameter_count();
  std::vector<Eigen::Index> groups;
  if (c.weights) {
    for (const auto& g : c.weights->groups) groups.push_back(g.size());
  }
  m["weight_groups"] = groups;
  m["has_weights"] = c.weights.has_value();
  m["metadata"] = c.metadata;

  const std::string manifest = m.dump(2);
  std::string out(kMagic.begin(), kMagic.end());
  put_u64(out, manifest.size());
  out += manifest;
  put_doubles(out, c.net.flat_parameters());
  if (c.weights) {
    for (const auto& g : c.weights->groups) put_doubles(out, g);
  }
  write_atomic(path, out);
}

ModelContainer read_container(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open model container " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  const std::string in = ss.str();
  const std::string where = "model container " + path.string();
  if (in.size() < 16 || std::memcmp(in.data(), kMagic.data(), kMagic.size()) != 0) {
    throw ConfigError(where + ": bad magic");
  }
  const std::uint64_t mlen = get_u64(in, 8);
  if (mlen > in.size() - 16) throw ConfigError(where + ": truncated manifest");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(in.substr(16, mlen));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + ": manifest is not JSON (" + e.what() + ")");
  }
  codec::require_object(m, "manifest");
  if (codec::read_integer(m.at("format_version"), "format_version") != kFormatVersion) {
    throw ConfigError(where + ": unsupported format version");
  }
  nn::Architecture arch;
  codec::read(m.at("architecture"), "architecture", arch);
  model::CellParameters params;
  codec::read(m.at("params"), "params", params);
  const model::Stage stage = model::parse_stage(codec::read_string(m.at("stage"), "stage"));

  ModelContainer c{nn::CompositeNet(arch, stage, params),
                   pinn::parse_variant(codec::read_string(m.at("variant"), "variant")),
                   std::nullopt,
                   {}};
  for (auto [key, side] : {std::pair{"negative", model::Side::Negative},
                           std::pair{"positive", model::Side::Positive}}) {
    nn::SideRanges r;
    codec::read(m.at("ranges").at(key), std::string("ranges.") + key, r);
    c.net.set_ranges(side, r);
  }
  if (m.contains("metadata")) {
    for (const auto& [k, v] : m.at("metadata").items()) {
      c.metadata[k] = codec::read_string(v, "metadata." + k);
    }
  }

  std::size_t at = 16 + mlen;
  auto take = [&](Eigen::Index n) {
    if (n < 0 || static_cast<std::uint64_t>(n) > (in.size() - at) / 8) {
      throw ConfigError(where + ": truncated payload");
    }
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i, at += 8) v[i] = std::bit_cast<double>(get_u64(in, at));
    return v;
  };
  const auto count = codec::read_integer(m.at("parameter_count"), "parameter_count");
  if (count != c.net.parameter_count()) {
    throw ConfigError(where + ": parameter_count does not match the architecture");
  }
  c.net.set_flat_parameters(take(count));
  if (codec::read_bool(m.at("has_weights"), "has_weights")) {
    pinn::SAWeights w;
    for (const auto& g : m.at("weight_groups")) w.groups.push_back(take(codec::read_integer(g, "weight_groups[]")));
    c.weights = std::move(w);
  }
  if (at != in.size()) throw ConfigError(where + ": trailing bytes after payload");
  return c;
}

}  // namespace vrfb::io
