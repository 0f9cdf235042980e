#include "vrfb/model/cell_parameters.hpp"

#include <cmath>
#include <string>

#include "vrfb/error.hpp"

namespace vrfb::model {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw ConfigError(std::string("parameter '") + field + "': " + what);
}

}  // namespace

void CellParameters::validate() const {
  const auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  require(positive(H), "H", "must be > 0");
  require(positive(L), "L", "must be > 0");
  require(positive(W), "W", "must be > 0");
  require(positive(a), "a", "must be > 0");
  require(positive(d_m), "d_m", "must be > 0");
  require(positive(I), "I", "must be > 0");
  require(positive(D2), "D2", "must be > 0");
  require(positive(D4), "D4", "must be > 0");
  require(positive(D_H), "D_H", "must be > 0");
  require(positive(D_SO4), "D_SO4", "must be > 0");
  require(positive(D_HSO4), "D_HSO4", "must be > 0");
  require(std::isfinite(v[0]) && v[0] == 0.0, "v", "x-component must be 0 (vertical flow)");
  require(positive(v[1]), "v", "y-component must be > 0 (inlet at y = 0)");
  require(positive(T), "T", "must be > 0");
  require(positive(sigma_s), "sigma_s", "must be > 0");
  require(positive(sigma_m), "sigma_m", "must be > 0");
  require(std::isfinite(E0_pos), "E0_pos", "must be finite");
  require(std::isfinite(E0_neg), "E0_neg", "must be finite");
  require(positive(k_pos), "k_pos", "must be > 0");
  require(positive(k_neg), "k_neg", "must be > 0");
  require(alpha_a > 0.0 && alpha_a < 1.0, "alpha_a", "must lie in (0, 1)");
  require(alpha_c > 0.0 && alpha_c < 1.0, "alpha_c", "must lie in (0, 1)");
  require(eps > 0.0 && eps < 1.0, "eps", "must lie in (0, 1)");
  require(positive(c0), "c0", "must be > 0");
  require(positive(F), "F", "must be > 0");
  require(positive(R), "R", "must be > 0");
  require(soc_min > 0.0 && soc_min < soc_max && soc_max < 1.0, "soc_min/soc_max",
          "need 0 < soc_min < soc_max < 1");
}

double CellParameters::speed() const { return std::hypot(v[0], v[1]); }

std::string_view to_string(Stage s) { return s == Stage::Charging ? "charge" : "discharge"; }

Stage parse_stage(std::string_view name) {
  if (name == "charge" || name == "charging") return Stage::Charging;
  if (name == "discharge" || name == "discharging") return Stage::Discharging;
  throw ConfigError("unknown stage '" + std::string(name) + "' (expected charge|discharge)");
}

std::string_view to_string(Side s) { return s == Side::Negative ? "negative" : "positive"; }

Interval x_range(Side side, const CellParameters& p) {
  return side == Side::Negative ? Interval{-p.L, 0.0} : Interval{0.0, p.L};
}

double average_current_density(const CellParameters& p) { return p.I / (p.H * p.W); }

}  // namespace vrfb::model
