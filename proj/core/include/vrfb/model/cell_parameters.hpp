#pragma once

#include <array>
#include <string_view>

namespace vrfb::model {

/// Physical constants and geometry of the unit cell. Defaults reproduce the
/// reference VRFB configuration (2D cell, 1.5 M vanadium, 2 A).
struct CellParameters {
  // geometry (m)
  double H = 50e-3;
  double L = 3.28e-3;
  double W = 20e-3;
  double a = 57622.0;   // specific area, 1/m
  double d_m = 5.08e-5;
  double I = 2.0;       // total current, A

  // diffusivities (m^2/s)
  double D2 = 2.4e-10;
  double D4 = 3.9e-10;
  double D_H = 93.12e-10;
  double D_SO4 = 10.65e-10;
  double D_HSO4 = 13.3e-10;

  std::array<double, 2> v = {0.0, 5.08e-3};
  double T = 293.15;
  double sigma_s = 500.0;
  double sigma_m = 30.0;
  double E0_pos = 1.004;
  double E0_neg = -0.255;
  double k_pos = 1.1e-6;
  double k_neg = 3.0e-6;
  double alpha_a = 0.5;
  double alpha_c = 0.5;
  double eps = 0.92317;
  double c0 = 1500.0;
  double F = 96485.0;
  double R = 8.314;
  double soc_min = 0.1;
  double soc_max = 0.8;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  double thermal_voltage() const { return R * T / F; }
  double speed() const;
};

enum class Stage { Charging, Discharging };

/// 1 while charging, 0 while discharging.
constexpr int charge_flag(Stage s) { return s == Stage::Charging ? 1 : 0; }

/// Sign of the collector current density sigma_s * dphi_s/dx for the stage.
constexpr double current_sign(Stage s) { return s == Stage::Charging ? 1.0 : -1.0; }

std::string_view to_string(Stage s);
Stage parse_stage(std::string_view name);

enum class Side { Negative, Positive };

std::string_view to_string(Side s);

struct Interval {
  double lo;
  double hi;
};

/// x-range of a half cell: [-L, 0] or [0, L].
Interval x_range(Side side, const CellParameters& p);

double average_current_density(const CellParameters& p);

}  // namespace vrfb::model
