#include "vrfb/model/equations.hpp"

#include <string>

#include "vrfb/error.hpp"

namespace vrfb::model {

const std::array<Equation, kEquationCount>& all_equations() {
  static const auto table = [] {
    std::array<Equation, kEquationCount> t{};
    for (int i = 0; i < kEquationCount; ++i) t[i] = static_cast<Equation>(i);
    return t;
  }();
  return table;
}

std::string_view name_of(Equation e) {
  switch (e) {
    case Equation::ConcentrationNeg: return "pde_c2";
    case Equation::ElectrolyteNeg: return "pde_phi_neg_l";
    case Equation::ElectrodeNeg: return "pde_phi_neg_s";
    case Equation::ConcentrationPos: return "pde_c4";
    case Equation::ElectrolytePos: return "pde_phi_pos_l";
    case Equation::ElectrodePos: return "pde_phi_pos_s";
    case Equation::InletC2: return "inlet_c2";
    case Equation::InletC4: return "inlet_c4";
    case Equation::CollectorCurrentPos: return "collector_current_pos";
    case Equation::CollectorPotentialNeg: return "collector_phi_neg_s";
    case Equation::MembraneElectrodeNeg: return "membrane_electrode_neg";
    case Equation::MembraneElectrodePos: return "membrane_electrode_pos";
    case Equation::CollectorC2Flux: return "collector_c2_flux";
    case Equation::CollectorElectrolyteNeg: return "collector_electrolyte_neg";
    case Equation::CollectorC4Flux: return "collector_c4_flux";
    case Equation::CollectorElectrolytePos: return "collector_electrolyte_pos";
    case Equation::InletPhiNegL: return "inlet_dphi_neg_l_dy";
    case Equation::InletPhiNegS: return "inlet_dphi_neg_s_dy";
    case Equation::InletPhiPosL: return "inlet_dphi_pos_l_dy";
    case Equation::InletPhiPosS: return "inlet_dphi_pos_s_dy";
    case Equation::OutletPhiNegL: return "outlet_dphi_neg_l_dy";
    case Equation::OutletPhiNegS: return "outlet_dphi_neg_s_dy";
    case Equation::OutletPhiPosL: return "outlet_dphi_pos_l_dy";
    case Equation::OutletPhiPosS: return "outlet_dphi_pos_s_dy";
    case Equation::OutletC2: return "outlet_dc2_dy";
    case Equation::OutletC4: return "outlet_dc4_dy";
    case Equation::MembraneCouplingNeg: return "membrane_coupling_neg";
    case Equation::MembraneCouplingPos: return "membrane_coupling_pos";
    case Equation::MembraneC2Flux: return "membrane_c2_flux";
    case Equation::MembraneC4Flux: return "membrane_c4_flux";
  }
  throw DomainError("unknown equation id " + std::to_string(static_cast<int>(e)));
}

double equation_scale(Equation e, double soc, Stage stage, const CellParameters& p) {
  const double beta = stage == Stage::Charging ? 1.0 - soc : soc;
  const double transport = beta * p.c0 * p.speed() / p.H;
  const double i_avg = average_current_density(p);
  switch (e) {
    case Equation::ConcentrationNeg:
    case Equation::ConcentrationPos:
      return transport;
    case Equation::ElectrolyteNeg:
    case Equation::ElectrodeNeg:
    case Equation::ElectrolytePos:
    case Equation::ElectrodePos:
      return p.F * transport;
    case Equation::InletC2:
    case Equation::InletC4:
      return p.c0;
    case Equation::CollectorCurrentPos:
    case Equation::MembraneElectrodeNeg:
    case Equation::MembraneElectrodePos:
    case Equation::MembraneCouplingNeg:
    case Equation::MembraneCouplingPos:
    case Equation::CollectorElectrolyteNeg:
    case Equation::CollectorElectrolytePos:
      return i_avg;
    case Equation::CollectorPotentialNeg:
      return 1.0;
    case Equation::CollectorC2Flux:
    case Equation::CollectorC4Flux:
    case Equation::MembraneC2Flux:
    case Equation::MembraneC4Flux:
      return p.c0 / p.L;
    case Equation::InletPhiNegL:
    case Equation::InletPhiNegS:
    case Equation::InletPhiPosL:
    case Equation::InletPhiPosS:
    case Equation::OutletPhiNegL:
    case Equation::OutletPhiNegS:
    case Equation::OutletPhiPosL:
    case Equation::OutletPhiPosS:
      return 1.0 / p.H;
    case Equation::OutletC2:
    case Equation::OutletC4:
      return p.c0 / p.H;
  }
  throw DomainError("unknown equation id " + std::to_string(static_cast<int>(e)));
}

}  // namespace vrfb::model
