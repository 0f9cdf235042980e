#include "vrfb/model/electrochemistry.hpp"

#include <cmath>
#include <string>

#include "vrfb/error.hpp"

namespace vrfb::model {

namespace {

// Valences.
constexpr double z_V2 = 2.0;
constexpr double z_V3 = 3.0;
constexpr double z_VO = 2.0;   // VO2+
constexpr double z_VO2 = 1.0;  // VO2(+)
constexpr double z_H = 1.0;
constexpr double z_HSO4 = -1.0;
constexpr double z_SO4 = -2.0;

}  // namespace

double ElectrolyteComposition::net_charge() const {
  const double vanadium =
      side == Side::Negative ? z_V2 * c2 + z_V3 * c3 : z_VO * c4 + z_VO2 * c5;
  return vanadium + z_H * c_H + z_HSO4 * c_HSO4 + z_SO4 * c_SO4;
}

void check_soc(double soc, const CellParameters& p) {
  if (!(soc >= p.soc_min && soc <= p.soc_max)) {
    throw DomainError("soc " + std::to_string(soc) + " outside [" + std::to_string(p.soc_min) +
                      ", " + std::to_string(p.soc_max) + "]");
  }
}

BackgroundComposition background_composition(Side side, double soc, const CellParameters&) {
  // The closed-form backgrounds are defined for any physical SOC.
  if (!(soc >= 0.0 && soc <= 1.0)) {
    throw DomainError("soc " + std::to_string(soc) + " outside [0, 1]");
  }
  if (side == Side::Negative) return {5500.0, 46100.0, 2500.0};
  return {7000.0 + 3000.0 * soc, 30000.0 - 1500.0 * soc, 2500.0};
}

ElectrolyteComposition close_composition(Side side, double c_primary, double soc,
                                         const CellParameters& p) {
  if (!(c_primary >= 0.0 && c_primary <= p.c0)) {
    throw DomainError("vanadium concentration " + std::to_string(c_primary) + " outside [0, c0]");
  }
  const auto bg = background_composition(side, soc, p);
  ElectrolyteComposition comp;
  comp.side = side;
  comp.c_H = bg.c_H;
  comp.c_H2O = bg.c_H2O;
  comp.c_HSO4 = bg.c_HSO4;
  if (side == Side::Negative) {
    comp.c2 = c_primary;
    comp.c3 = p.c0 - c_primary;
  } else {
    comp.c4 = c_primary;
    comp.c5 = p.c0 - c_primary;
  }
  comp.c_SO4 = 0.0;
  comp.c_SO4 = comp.net_charge() / -z_SO4;
  if (comp.c_SO4 < 0.0) {
    throw CompositionError("electroneutrality gives negative SO4 concentration " +
                           std::to_string(comp.c_SO4));
  }
  return comp;
}

double solid_conductivity(const CellParameters& p) {
  return std::pow(1.0 - p.eps, 1.5) * p.sigma_s;
}

Conductivities effective_conductivities(const ElectrolyteComposition& comp,
                                        const CellParameters& p) {
  // D(V3+) and D(VO2+) are not tabulated; each couple shares one diffusivity.
  double sum = z_H * z_H * p.D_H * comp.c_H + z_HSO4 * z_HSO4 * p.D_HSO4 * comp.c_HSO4 +
               z_SO4 * z_SO4 * p.D_SO4 * comp.c_SO4;
  if (comp.side == Side::Negative) {
    sum += z_V2 * z_V2 * p.D2 * comp.c2 + z_V3 * z_V3 * p.D2 * comp.c3;
  } else {
    sum += z_VO * z_VO * p.D4 * comp.c4 + z_VO2 * z_VO2 * p.D4 * comp.c5;
  }
  const double k_eff = p.F * p.F / (p.R * p.T) * sum;
  return {solid_conductivity(p), std::pow(p.eps, 1.5) * k_eff};
}

AffineConductivity electrolyte_conductivity(Side side, double soc, const CellParameters& p) {
  const double at_zero = effective_conductivities(close_composition(side, 0.0, soc, p), p).sigma_l_eff;
  const double at_full = effective_conductivities(close_composition(side, p.c0, soc, p), p).sigma_l_eff;
  return {at_zero, (at_full - at_zero) / p.c0};
}

double ocv(const ElectrolyteComposition& comp, const CellParameters& p) {
  const double vt = p.thermal_voltage();
  if (comp.side == Side::Negative) {
    if (!(comp.c2 > 0.0 && comp.c3 > 0.0)) {
      throw DomainError("negative OCV needs c2, c3 > 0");
    }
    return p.E0_neg + vt * std::log(comp.c3 / comp.c2);
  }
  if (!(comp.c4 > 0.0 && comp.c5 > 0.0 && comp.c_H > 0.0 && comp.c_H2O > 0.0)) {
    throw DomainError("positive OCV needs c4, c5, c_H, c_H2O > 0");
  }
  return p.E0_pos + vt * std::log(comp.c5 * comp.c_H * comp.c_H / (comp.c4 * comp.c_H2O));
}

double cell_ocv(double soc, const CellParameters& p) {
  const auto neg = close_composition(Side::Negative, inlet_concentration(Side::Negative, soc, p), soc, p);
  const auto pos = close_composition(Side::Positive, inlet_concentration(Side::Positive, soc, p), soc, p);
  return ocv(pos, p) - ocv(neg, p);
}

double butler_volmer(const ElectrolyteComposition& comp, double eta, const CellParameters& p) {
  const bool neg = comp.side == Side::Negative;
  const double k = neg ? p.k_neg : p.k_pos;
  const double c_red = neg ? comp.c2 : comp.c4;
  const double c_ox = neg ? comp.c3 : comp.c5;
  const double f = 1.0 / p.thermal_voltage();
  const double prefactor = p.F * p.a * k * std::pow(c_red, p.alpha_c) * std::pow(c_ox, p.alpha_a);
  return prefactor * (std::exp(p.alpha_a * f * eta) - std::exp(-p.alpha_c * f * eta));
}

double inlet_concentration(Side side, double soc, const CellParameters& p) {
  return side == Side::Negative ? p.c0 * soc : p.c0 * (1.0 - soc);
}

}  // namespace vrfb::model
