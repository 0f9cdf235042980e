#pragma once

#include <array>
#include <string_view>

#include "vrfb/model/cell_parameters.hpp"

namespace vrfb::model {

/// Every governing equation and boundary condition of the 2D cell model.
/// The first six are the PDEs, the remaining 24 the boundary conditions.
enum class Equation : int {
  // governing equations
  ConcentrationNeg,
  ElectrolyteNeg,
  ElectrodeNeg,
  ConcentrationPos,
  ElectrolytePos,
  ElectrodePos,
  // inlet (y = 0)
  InletC2,
  InletC4,
  // collectors and membrane, x-direction
  CollectorCurrentPos,      // sigma_s dphi+s/dx = +-i_avg at x = L
  CollectorPotentialNeg,    // phi-s = 0 at x = -L
  MembraneElectrodeNeg,     // sigma_s dphi-s/dx = 0 at x = 0
  MembraneElectrodePos,     // sigma_s dphi+s/dx = 0 at x = 0
  CollectorC2Flux,          // dc2/dx = 0 at x = -L
  CollectorElectrolyteNeg,  // sigma_l dphi-l/dx = 0 at x = -L
  CollectorC4Flux,          // dc4/dx = 0 at x = L
  CollectorElectrolytePos,  // sigma_l dphi+l/dx = 0 at x = L
  // y-direction potential Neumann
  InletPhiNegL,
  InletPhiNegS,
  InletPhiPosL,
  InletPhiPosS,
  OutletPhiNegL,
  OutletPhiNegS,
  OutletPhiPosL,
  OutletPhiPosS,
  // y-direction concentration Neumann
  OutletC2,
  OutletC4,
  // membrane coupling
  MembraneCouplingNeg,
  MembraneCouplingPos,
  MembraneC2Flux,
  MembraneC4Flux,
};

inline constexpr int kPdeCount = 6;
inline constexpr int kBoundaryCount = 24;
inline constexpr int kEquationCount = kPdeCount + kBoundaryCount;

constexpr int index_of(Equation e) { return static_cast<int>(e); }

/// All equations in registry order.
const std::array<Equation, kEquationCount>& all_equations();

std::string_view name_of(Equation e);

/// Positive normalization coefficient an equation's residual is divided by.
/// Throws DomainError for an id outside the registry.
double equation_scale(Equation e, double soc, Stage stage, const CellParameters& p);

}  // namespace vrfb::model
