#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "vrfb/model/cell_parameters.hpp"
#include "vrfb/solver/field_state.hpp"
#include "vrfb/solver/grid.hpp"

namespace vrfb::solver {

enum class InitialGuess {
  /// phi_l = 0 on both sides.
  ZeroElectrolyte,
  /// phi_l = -E_neg(inlet) so every overpotential starts at zero.
  Equilibrium,
};

/// Discretization of the electrolyte potential equation.
enum class ElectrolyteOperator {
  /// -div(sigma_l(c) grad phi_l); conserves charge discretely.
  Conservative,
  /// -sigma_l(c) lap(phi_l), the pointwise form used by the PINN residuals.
  Pointwise,
};

struct SolverOptions {
  double tolerance = 1e-9;
  int max_iterations = 200;
  int max_halvings = 8;
  InitialGuess guess = InitialGuess::Equilibrium;
  ElectrolyteOperator electrolyte = ElectrolyteOperator::Conservative;
  /// A Newton step may remove at most this fraction of the distance between
  /// a concentration and the bounds 0, c0.
  double boundary_fraction = 0.95;
  /// Newton steps in z = ln(c / (c0 - c)) for concentrations, which keeps
  /// every iterate inside (0, c0) without truncating the step.
  bool logit_concentration = true;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;        // scaled infinity norm at the returned state
  std::vector<double> damping;       // accepted step length per iteration
  std::vector<double> residual_history;
};

/// Scaled residual, one entry per unknown.
Eigen::VectorXd assemble_residual(const FieldState& state,
                                  ElectrolyteOperator op = ElectrolyteOperator::Conservative);

struct LinearSystem {
  Eigen::VectorXd residual;
  Eigen::SparseMatrix<double> jacobian;
};

/// Residual together with its analytic Jacobian.
LinearSystem assemble_system(const FieldState& state,
                             ElectrolyteOperator op = ElectrolyteOperator::Conservative);

FieldState initial_guess(double soc, model::Stage stage, const model::CellParameters& p,
                         const Grid& grid, InitialGuess kind = InitialGuess::Equilibrium);

std::pair<FieldState, SolveReport> newton_solve(double soc, model::Stage stage,
                                                const model::CellParameters& p, const Grid& grid,
                                                const SolverOptions& options = {},
                                                const FieldState* init = nullptr);

struct ProfilePoint {
  double position;
  double value;
};

/// sigma_s_eff * dphi_s/dx at x = -L, one value per grid row.
std::vector<ProfilePoint> collector_current_profile(const FieldState& state);

/// sigma_l_eff * dphi_l/dx on the negative side of the membrane.
std::vector<ProfilePoint> membrane_current_profile(const FieldState& state);

/// sigma_s_eff * dphi_s/dx at x = L.
std::vector<ProfilePoint> positive_collector_profile(const FieldState& state);

struct CurrentBalance {
  double negative_collector;  // A/m (per unit width)
  double membrane;
  double positive_collector;
  double target;              // +-i_avg * H
  /// Largest pairwise mismatch relative to |target|.
  double max_relative_mismatch() const;
};

CurrentBalance current_balance(const FieldState& state);

/// y-average of phi_s at x = L minus the y-average at x = -L.
double cell_voltage(const FieldState& state);

/// Composite trapezoid rule on uniform spacing h.
double trapezoid(std::span<const double> values, double h);

struct OutletSample {
  model::Side side;
  double x;
  double concentration;
  double phi_l;
  double phi_s;
};

/// Values along the outlet y = H, negative side first.
std::vector<OutletSample> outlet_profile(const FieldState& state);

struct SweepOptions {
  SolverOptions solver;
  bool warm_start = true;
};

struct SweepResult {
  model::Stage stage;
  std::vector<double> soc;
  std::vector<double> voltage;
  std::vector<FieldState> states;
  std::vector<SolveReport> reports;
};

/// Solves a monotone SOC grid in order, optionally warm-starting each point
/// from the previous solution. Throws SolverError naming the failing SOC.
SweepResult sweep_soc(model::Stage stage, const model::CellParameters& p, const Grid& grid,
                      std::span<const double> soc_grid, const SweepOptions& options = {});

}  // namespace vrfb::solver
