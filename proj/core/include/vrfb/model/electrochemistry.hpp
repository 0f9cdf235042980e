#pragma once

#include "vrfb/model/cell_parameters.hpp"

namespace vrfb::model {

/// Bulk electrolyte composition of one half cell (mol/m^3).
///
/// Species follow the vanadium index convention: 2 = V2+, 3 = V3+,
/// 4 = VO2+, 5 = VO2(+). Only the pair belonging to `side` is populated.
struct ElectrolyteComposition {
  Side side = Side::Negative;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double c5 = 0.0;
  double c_H = 0.0;
  double c_H2O = 0.0;
  double c_HSO4 = 0.0;
  double c_SO4 = 0.0;

  /// Sum of z_i c_i over the side's species collection.
  double net_charge() const;
};

struct BackgroundComposition {
  double c_H;
  double c_H2O;
  double c_HSO4;
};

void check_soc(double soc, const CellParameters& p);

BackgroundComposition background_composition(Side side, double soc, const CellParameters& p);

/// Fills the counter-species and solves electroneutrality for SO4(2-).
/// `c_primary` is c2 on the negative side, c4 on the positive side.
ElectrolyteComposition close_composition(Side side, double c_primary, double soc,
                                         const CellParameters& p);

struct Conductivities {
  double sigma_s_eff;
  double sigma_l_eff;
};

Conductivities effective_conductivities(const ElectrolyteComposition& comp,
                                        const CellParameters& p);

/// sigma_l_eff is affine in the primary vanadium concentration at fixed SOC:
/// sigma_l_eff(c) = intercept + slope * c.
struct AffineConductivity {
  double intercept;
  double slope;
  double operator()(double c) const { return intercept + slope * c; }
};

AffineConductivity electrolyte_conductivity(Side side, double soc, const CellParameters& p);

double solid_conductivity(const CellParameters& p);

/// Nernst open-circuit potential. Concentrations enter in mol/m^3 as-is.
double ocv(const ElectrolyteComposition& comp, const CellParameters& p);

/// Positive minus negative OCV at the inlet composition for `soc`.
double cell_ocv(double soc, const CellParameters& p);

/// Volumetric transfer current (A/m^3), positive for oxidation.
double butler_volmer(const ElectrolyteComposition& comp, double eta, const CellParameters& p);

constexpr double overpotential(double phi_s, double phi_l, double ocv_value) {
  return phi_s - phi_l - ocv_value;
}

inline constexpr double kOverpotentialBound = 0.1;

constexpr double clamp_overpotential(double eta_raw) {
  return eta_raw > kOverpotentialBound    ? kOverpotentialBound
         : eta_raw < -kOverpotentialBound ? -kOverpotentialBound
                                          : eta_raw;
}

/// Inlet concentration of the primary vanadium species (c2 or c4).
double inlet_concentration(Side side, double soc, const CellParameters& p);

}  // namespace vrfb::model
