#include "vrfb/solver/reference_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/SparseLU>

#include "vrfb/error.hpp"
#include "vrfb/model/electrochemistry.hpp"
#include "vrfb/model/equations.hpp"

namespace vrfb::solver {

using model::CellParameters;
using model::Equation;
using model::Side;
using model::Stage;

namespace {

constexpr std::array<Side, 2> kSides = {Side::Negative, Side::Positive};

struct SideData {
  Side side;
  double k;
  double D;
  double E0;
  double extra_log;  // ln(c_H^2 / c_H2O) on the positive side, 0 on the negative
  double c_in;
  model::AffineConductivity sigma_l;
};

SideData side_data(Side side, double soc, const CellParameters& p) {
  SideData sd{};
  sd.side = side;
  sd.c_in = model::inlet_concentration(side, soc, p);
  sd.sigma_l = model::electrolyte_conductivity(side, soc, p);
  if (side == Side::Negative) {
    sd.k = p.k_neg;
    sd.D = p.D2;
    sd.E0 = p.E0_neg;
    sd.extra_log = 0.0;
  } else {
    const auto bg = model::background_composition(side, soc, p);
    sd.k = p.k_pos;
    sd.D = p.D4;
    sd.E0 = p.E0_pos;
    sd.extra_log = std::log(bg.c_H * bg.c_H / bg.c_H2O);
  }
  return sd;
}

struct Reaction {
  double j;
  double dc;
  double dphi_l;
  double dphi_s;
};

// Butler-Volmer current with the Nernst potential folded in, plus its
// partial derivatives with respect to the three nodal unknowns.
Reaction reaction(const SideData& sd, const CellParameters& p, double c, double phi_l,
                  double phi_s) {
  const double vt = p.thermal_voltage();
  const double f = 1.0 / vt;
  const double c_ox = p.c0 - c;
  const double e = sd.E0 + vt * (std::log(c_ox / c) + sd.extra_log);
  const double eta = phi_s - phi_l - e;
  const double pre = p.F * p.a * sd.k * std::pow(c, p.alpha_c) * std::pow(c_ox, p.alpha_a);
  const double ea = std::exp(p.alpha_a * f * eta);
  const double ec = std::exp(-p.alpha_c * f * eta);
  const double dj_deta = pre * f * (p.alpha_a * ea + p.alpha_c * ec);
  const double deta_dc = vt * (1.0 / c_ox + 1.0 / c);
  const double dpre_dc = pre * (p.alpha_c / c - p.alpha_a / c_ox);
  return {pre * (ea - ec), dpre_dc * (ea - ec) + dj_deta * deta_dc, -dj_deta, dj_deta};
}

struct Stencil {
  std::array<int, 3> offset;
  std::array<double, 3> coef;
};

// Second-order one-sided first derivative: forward at the low end of an
// index range, backward at the high end.
Stencil one_sided(bool forward, double h) {
  if (forward) return {{0, 1, 2}, {-3.0 / (2 * h), 4.0 / (2 * h), -1.0 / (2 * h)}};
  return {{0, -1, -2}, {3.0 / (2 * h), -4.0 / (2 * h), 1.0 / (2 * h)}};
}

class Assembler {
 public:
  Assembler(const FieldState& state, ElectrolyteOperator op, Eigen::VectorXd& residual,
            std::vector<Eigen::Triplet<double>>* triplets)
      : s_(state), g_(state.grid()), p_(state.params()), u_(state.unknowns()), r_(residual),
        trip_(triplets), op_(op) {
    r_.setZero(u_.size());
    i_avg_ = model::average_current_density(p_);
    sigma_s_ = model::solid_conductivity(p_);
    if (trip_) {
      trip_->clear();
      trip_->reserve(static_cast<std::size_t>(u_.size()) * 12);
    }
  }

  void run() {
    for (Side side : kSides) {
      const SideData sd = side_data(side, s_.soc(), p_);
      for (int j = 0; j <= g_.ny(); ++j) {
        for (int i = 0; i <= g_.nx(); ++i) {
          concentration_row(sd, i, j);
          electrolyte_row(sd, i, j);
          electrode_row(sd, i, j);
        }
      }
    }
  }

 private:
  int col(Side side, int i, int j, Field f) const { return FieldState::index(g_, side, i, j, f); }

  void begin() {
    value_ = 0.0;
    terms_.clear();
  }
  void lin(int c, double coef) {
    value_ += coef * u_[c];
    terms_.emplace_back(c, coef);
  }
  void deriv(int c, double coef) { terms_.emplace_back(c, coef); }

  void finish(int row, double scale, Equation eq, Side side, int i, int j) {
    const double v = value_ / scale;
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "non-finite residual in " << model::name_of(eq) << " at " << model::to_string(side)
          << " node (" << i << ", " << j << ")";
      throw AssemblyError(msg.str());
    }
    r_[row] = v;
    if (trip_) {
      for (const auto& [c, coef] : terms_) trip_->emplace_back(row, c, coef / scale);
    }
  }

  // Adds coef * d/dx (one-sided) of field f at column i, row j.
  void x_derivative(Side side, int i, int j, Field f, double coef) {
    const Stencil st = one_sided(i == 0, g_.dx());
    for (int k = 0; k < 3; ++k) lin(col(side, i + st.offset[k], j, f), coef * st.coef[k]);
  }
  double x_derivative_value(Side side, int i, int j, Field f) const {
    const Stencil st = one_sided(i == 0, g_.dx());
    double d = 0.0;
    for (int k = 0; k < 3; ++k) d += st.coef[k] * u_[col(side, i + st.offset[k], j, f)];
    return d;
  }
  void y_derivative(Side side, int i, int j, Field f, double coef) {
    const Stencil st = one_sided(j == 0, g_.dy());
    for (int k = 0; k < 3; ++k) lin(col(side, i, j + st.offset[k], f), coef * st.coef[k]);
  }
  // coef * Laplacian of field f (five-point).
  void laplacian(Side side, int i, int j, Field f, double coef) {
    const double ax = coef / (g_.dx() * g_.dx());
    const double ay = coef / (g_.dy() * g_.dy());
    lin(col(side, i - 1, j, f), ax);
    lin(col(side, i + 1, j, f), ax);
    lin(col(side, i, j - 1, f), ay);
    lin(col(side, i, j + 1, f), ay);
    lin(col(side, i, j, f), -2.0 * (ax + ay));
  }
  double laplacian_value(Side side, int i, int j, Field f) const {
    const auto at = [&](int ii, int jj) { return u_[col(side, ii, jj, f)]; };
    return (at(i - 1, j) - 2 * at(i, j) + at(i + 1, j)) / (g_.dx() * g_.dx()) +
           (at(i, j - 1) - 2 * at(i, j) + at(i, j + 1)) / (g_.dy() * g_.dy());
  }

  // -div(sigma_l grad phi_l) with arithmetic face conductivities.
  void divergence_flux(const SideData& sd, int i, int j) {
    const Side side = sd.side;
    const int center_phi = col(side, i, j, Field::PhiL);
    const int center_c = col(side, i, j, Field::Concentration);
    const double phi_c = u_[center_phi];
    const double sigma_c = sd.sigma_l(u_[center_c]);
    const std::array<std::array<int, 2>, 4> nbrs = {{{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}}};
    for (int k = 0; k < 4; ++k) {
      const double h = k < 2 ? g_.dx() : g_.dy();
      const int nb_phi = col(side, nbrs[k][0], nbrs[k][1], Field::PhiL);
      const int nb_c = col(side, nbrs[k][0], nbrs[k][1], Field::Concentration);
      const double face = 0.5 * (sigma_c + sd.sigma_l(u_[nb_c]));
      const double diff = u_[nb_phi] - phi_c;
      // contribution: -face * (phi_nb - phi_c) / h^2
      value_ -= face * diff / (h * h);
      deriv(nb_phi, -face / (h * h));
      deriv(center_phi, face / (h * h));
      deriv(center_c, -0.5 * sd.sigma_l.slope * diff / (h * h));
      deriv(nb_c, -0.5 * sd.sigma_l.slope * diff / (h * h));
    }
  }

  Reaction node_reaction(const SideData& sd, int i, int j) const {
    return reaction(sd, p_, u_[col(sd.side, i, j, Field::Concentration)],
                    u_[col(sd.side, i, j, Field::PhiL)], u_[col(sd.side, i, j, Field::PhiS)]);
  }

  void concentration_row(const SideData& sd, int i, int j) {
    const Side side = sd.side;
    const bool neg = side == Side::Negative;
    const int row = col(side, i, j, Field::Concentration);
    begin();
    Equation eq;
    if (j == 0) {
      eq = neg ? Equation::InletC2 : Equation::InletC4;
      lin(row, 1.0);
      value_ -= sd.c_in;
    } else if (j == g_.ny()) {
      eq = neg ? Equation::OutletC2 : Equation::OutletC4;
      // first-order flux rows keep the discrete concentration positive
      // through depleted boundary layers
      lin(row, 1.0 / g_.dy());
      lin(col(side, i, j - 1, Field::Concentration), -1.0 / g_.dy());
    } else if (i == 0 || i == g_.nx()) {
      const bool collector = i == g_.collector_column(side);
      eq = collector ? (neg ? Equation::CollectorC2Flux : Equation::CollectorC4Flux)
                     : (neg ? Equation::MembraneC2Flux : Equation::MembraneC4Flux);
      const int inward = i == 0 ? 1 : -1;
      lin(row, -inward / g_.dx());
      lin(col(side, i + inward, j, Field::Concentration), inward / g_.dx());
    } else {
      eq = neg ? Equation::ConcentrationNeg : Equation::ConcentrationPos;
      // first-order upwind convection, flow in +y
      const double vy = p_.v[1];
      lin(row, vy / g_.dy());
      lin(col(side, i, j - 1, Field::Concentration), -vy / g_.dy());
      laplacian(side, i, j, Field::Concentration, -sd.D);
      const Reaction rx = node_reaction(sd, i, j);
      value_ += rx.j / p_.F;
      deriv(row, rx.dc / p_.F);
      deriv(col(side, i, j, Field::PhiL), rx.dphi_l / p_.F);
      deriv(col(side, i, j, Field::PhiS), rx.dphi_s / p_.F);
    }
    finish(row, model::equation_scale(eq, s_.soc(), s_.stage(), p_), eq, side, i, j);
  }

  void electrolyte_row(const SideData& sd, int i, int j) {
    const Side side = sd.side;
    const bool neg = side == Side::Negative;
    const int row = col(side, i, j, Field::PhiL);
    const int c_col = col(side, i, j, Field::Concentration);
    const double c = u_[c_col];
    begin();
    Equation eq;
    if (i == g_.collector_column(side) || i == g_.membrane_column(side)) {
      const double sigma = sd.sigma_l(c);
      const double dphi = x_derivative_value(side, i, j, Field::PhiL);
      x_derivative(side, i, j, Field::PhiL, sigma);
      deriv(c_col, sd.sigma_l.slope * dphi);
      if (i == g_.collector_column(side)) {
        eq = neg ? Equation::CollectorElectrolyteNeg : Equation::CollectorElectrolytePos;
      } else {
        eq = neg ? Equation::MembraneCouplingNeg : Equation::MembraneCouplingPos;
        const double g_m = p_.sigma_m / p_.d_m;
        const int pos_col = col(Side::Positive, g_.membrane_column(Side::Positive), j, Field::PhiL);
        const int neg_col = col(Side::Negative, g_.membrane_column(Side::Negative), j, Field::PhiL);
        lin(pos_col, -g_m);
        lin(neg_col, g_m);
      }
    } else if (j == 0 || j == g_.ny()) {
      eq = j == 0 ? (neg ? Equation::InletPhiNegL : Equation::InletPhiPosL)
                  : (neg ? Equation::OutletPhiNegL : Equation::OutletPhiPosL);
      y_derivative(side, i, j, Field::PhiL, 1.0);
    } else {
      eq = neg ? Equation::ElectrolyteNeg : Equation::ElectrolytePos;
      if (op_ == ElectrolyteOperator::Pointwise) {
        const double sigma = sd.sigma_l(c);
        const double lap = laplacian_value(side, i, j, Field::PhiL);
        laplacian(side, i, j, Field::PhiL, -sigma);
        deriv(c_col, -sd.sigma_l.slope * lap);
      } else {
        divergence_flux(sd, i, j);
      }
      const Reaction rx = node_reaction(sd, i, j);
      value_ -= rx.j;
      deriv(c_col, -rx.dc);
      deriv(row, -rx.dphi_l);
      deriv(col(side, i, j, Field::PhiS), -rx.dphi_s);
    }
    finish(row, model::equation_scale(eq, s_.soc(), s_.stage(), p_), eq, side, i, j);
  }

  void electrode_row(const SideData& sd, int i, int j) {
    const Side side = sd.side;
    const bool neg = side == Side::Negative;
    const int row = col(side, i, j, Field::PhiS);
    begin();
    Equation eq;
    if (i == g_.collector_column(side)) {
      if (neg) {
        eq = Equation::CollectorPotentialNeg;
        lin(row, 1.0);
      } else {
        eq = Equation::CollectorCurrentPos;
        x_derivative(side, i, j, Field::PhiS, sigma_s_);
        value_ -= model::current_sign(s_.stage()) * i_avg_;
      }
    } else if (i == g_.membrane_column(side)) {
      eq = neg ? Equation::MembraneElectrodeNeg : Equation::MembraneElectrodePos;
      x_derivative(side, i, j, Field::PhiS, sigma_s_);
    } else if (j == 0 || j == g_.ny()) {
      eq = j == 0 ? (neg ? Equation::InletPhiNegS : Equation::InletPhiPosS)
                  : (neg ? Equation::OutletPhiNegS : Equation::OutletPhiPosS);
      y_derivative(side, i, j, Field::PhiS, 1.0);
    } else {
      eq = neg ? Equation::ElectrodeNeg : Equation::ElectrodePos;
      laplacian(side, i, j, Field::PhiS, -sigma_s_);
      const Reaction rx = node_reaction(sd, i, j);
      value_ += rx.j;
      deriv(col(side, i, j, Field::Concentration), rx.dc);
      deriv(col(side, i, j, Field::PhiL), rx.dphi_l);
      deriv(row, rx.dphi_s);
    }
    finish(row, model::equation_scale(eq, s_.soc(), s_.stage(), p_), eq, side, i, j);
  }

  const FieldState& s_;
  const Grid& g_;
  const CellParameters& p_;
  const Eigen::VectorXd& u_;
  Eigen::VectorXd& r_;
  std::vector<Eigen::Triplet<double>>* trip_;
  ElectrolyteOperator op_;
  double i_avg_ = 0.0;
  double sigma_s_ = 0.0;
  double value_ = 0.0;
  std::vector<std::pair<int, double>> terms_;
};

bool concentrations_admissible(const FieldState& s) {
  const Grid& g = s.grid();
  const double c0 = s.params().c0;
  for (Side side : kSides) {
    for (int j = 0; j <= g.ny(); ++j) {
      for (int i = 0; i <= g.nx(); ++i) {
        const double c = s(side, Field::Concentration, i, j);
        if (!(c > 0.0 && c < c0)) return false;
      }
    }
  }
  return true;
}

// Largest step length that keeps every concentration strictly inside (0, c0),
// giving up at most `fraction` of the remaining distance to a bound.
double max_step_to_bounds(const FieldState& s, const Eigen::VectorXd& step, double fraction) {
  const double c0 = s.params().c0;
  const Eigen::VectorXd& u = s.unknowns();
  double lambda = 1.0;
  for (Eigen::Index k = static_cast<int>(Field::Concentration); k < u.size(); k += kFieldsPerNode) {
    if (step[k] < 0.0) lambda = std::min(lambda, fraction * u[k] / -step[k]);
    if (step[k] > 0.0) lambda = std::min(lambda, fraction * (c0 - u[k]) / step[k]);
  }
  return lambda;
}

double inf_norm(const Eigen::VectorXd& r) { return r.lpNorm<Eigen::Infinity>(); }

// dc/dz for the logit coordinate z = ln(c / (c0 - c)); identity on potentials.
Eigen::VectorXd logit_chain(const FieldState& s) {
  const double c0 = s.params().c0;
  Eigen::VectorXd d = Eigen::VectorXd::Ones(s.unknowns().size());
  for (Eigen::Index k = static_cast<int>(Field::Concentration); k < d.size(); k += kFieldsPerNode) {
    const double c = s.unknowns()[k];
    d[k] = c * (c0 - c) / c0;
  }
  return d;
}

Eigen::VectorXd logit_update(const FieldState& s, const Eigen::VectorXd& step, double lambda) {
  const double c0 = s.params().c0;
  Eigen::VectorXd u = s.unknowns() + lambda * step;
  for (Eigen::Index k = static_cast<int>(Field::Concentration); k < u.size(); k += kFieldsPerNode) {
    const double c = s.unknowns()[k];
    // |z| <= 30 keeps c representable away from both bounds
    const double z = std::clamp(std::log(c / (c0 - c)) + lambda * step[k], -30.0, 30.0);
    u[k] = c0 / (1.0 + std::exp(-z));
  }
  return u;
}

}  // namespace

Eigen::VectorXd assemble_residual(const FieldState& state, ElectrolyteOperator op) {
  Eigen::VectorXd r;
  Assembler(state, op, r, nullptr).run();
  return r;
}

LinearSystem assemble_system(const FieldState& state, ElectrolyteOperator op) {
  LinearSystem sys;
  std::vector<Eigen::Triplet<double>> triplets;
  Assembler(state, op, sys.residual, &triplets).run();
  const auto n = state.unknowns().size();
  sys.jacobian.resize(n, n);
  sys.jacobian.setFromTriplets(triplets.begin(), triplets.end());
  sys.jacobian.makeCompressed();
  return sys;
}

FieldState initial_guess(double soc, Stage stage, const CellParameters& p, const Grid& grid,
                         InitialGuess kind) {
  model::check_soc(soc, p);
  Eigen::VectorXd u(FieldState::unknown_count(grid));
  const double e_neg =
      model::ocv(model::close_composition(Side::Negative,
                                          model::inlet_concentration(Side::Negative, soc, p), soc, p),
                 p);
  const double phi_l = kind == InitialGuess::Equilibrium ? -e_neg : 0.0;
  const double v_ocv = model::cell_ocv(soc, p);
  for (Side side : kSides) {
    const double c_in = model::inlet_concentration(side, soc, p);
    const double phi_s = side == Side::Negative ? 0.0 : v_ocv;
    for (int j = 0; j <= grid.ny(); ++j) {
      for (int i = 0; i <= grid.nx(); ++i) {
        u[FieldState::index(grid, side, i, j, Field::Concentration)] = c_in;
        u[FieldState::index(grid, side, i, j, Field::PhiL)] = phi_l;
        u[FieldState::index(grid, side, i, j, Field::PhiS)] = phi_s;
      }
    }
  }
  return FieldState(grid, p, soc, stage, std::move(u));
}

std::pair<FieldState, SolveReport> newton_solve(double soc, Stage stage, const CellParameters& p,
                                                const Grid& grid, const SolverOptions& options,
                                                const FieldState* init) {
  model::check_soc(soc, p);
  FieldState state = init ? FieldState(grid, p, soc, stage, init->unknowns())
                          : initial_guess(soc, stage, p, grid, options.guess);
  if (init && !(init->grid() == grid)) {
    throw SolverError("initial state lives on a different grid");
  }

  SolveReport report;
  const auto op = options.electrolyte;
  LinearSystem sys = assemble_system(state, op);
  double norm2 = sys.residual.norm();
  report.residual_norm = inf_norm(sys.residual);
  report.residual_history.push_back(report.residual_norm);

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(sys.jacobian);

  while (report.residual_norm > options.tolerance) {
    if (report.iterations >= options.max_iterations) return {std::move(state), report};
    Eigen::VectorXd chain;
    if (options.logit_concentration) {
      chain = logit_chain(state);
      sys.jacobian = sys.jacobian * chain.asDiagonal();
    }
    lu.factorize(sys.jacobian);
    if (lu.info() != Eigen::Success) {
      throw SolverError("singular Jacobian at soc " + std::to_string(soc) + ": " +
                        lu.lastErrorMessage());
    }
    const Eigen::VectorXd step = lu.solve(-sys.residual);
    if (!step.allFinite()) throw SolverError("non-finite Newton step at soc " + std::to_string(soc));

    double lambda = options.logit_concentration
                        ? 1.0
                        : std::min(1.0, max_step_to_bounds(state, step, options.boundary_fraction));
    std::optional<FieldState> accepted;
    std::optional<Eigen::VectorXd> accepted_residual;
    for (int h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      FieldState trial = state.with_unknowns(options.logit_concentration
                                                 ? logit_update(state, step, lambda)
                                                 : Eigen::VectorXd(state.unknowns() + lambda * step));
      if (!concentrations_admissible(trial)) continue;
      Eigen::VectorXd r;
      try {
        r = assemble_residual(trial, op);
      } catch (const AssemblyError&) {
        continue;
      }
      const bool decreased = r.norm() < norm2;
      if (decreased || h == options.max_halvings) {
        accepted = std::move(trial);
        accepted_residual = std::move(r);
        break;
      }
    }
    if (!accepted) {
      // every damped step left the admissible set
      return {std::move(state), report};
    }
    state = std::move(*accepted);
    sys = assemble_system(state, op);
    norm2 = sys.residual.norm();
    ++report.iterations;
    report.damping.push_back(lambda);
    report.residual_norm = inf_norm(sys.residual);
    report.residual_history.push_back(report.residual_norm);
  }
  report.converged = true;
  return {std::move(state), report};
}

std::vector<ProfilePoint> collector_current_profile(const FieldState& state) {
  const Grid& g = state.grid();
  const double sigma = model::solid_conductivity(state.params());
  std::vector<ProfilePoint> out;
  out.reserve(g.nodes_y());
  for (int j = 0; j <= g.ny(); ++j) {
    const auto phi = [&](int i) { return state(Side::Negative, Field::PhiS, i, j); };
    out.push_back({g.y(j), sigma * (-3 * phi(0) + 4 * phi(1) - phi(2)) / (2 * g.dx())});
  }
  return out;
}

std::vector<ProfilePoint> membrane_current_profile(const FieldState& state) {
  const Grid& g = state.grid();
  const auto sigma_l = model::electrolyte_conductivity(Side::Negative, state.soc(), state.params());
  const int n = g.nx();
  std::vector<ProfilePoint> out;
  out.reserve(g.nodes_y());
  for (int j = 0; j <= g.ny(); ++j) {
    const auto phi = [&](int i) { return state(Side::Negative, Field::PhiL, i, j); };
    const double c = state(Side::Negative, Field::Concentration, n, j);
    out.push_back({g.y(j), sigma_l(c) * (3 * phi(n) - 4 * phi(n - 1) + phi(n - 2)) / (2 * g.dx())});
  }
  return out;
}

std::vector<ProfilePoint> positive_collector_profile(const FieldState& state) {
  const Grid& g = state.grid();
  const double sigma = model::solid_conductivity(state.params());
  const int n = g.nx();
  std::vector<ProfilePoint> out;
  out.reserve(g.nodes_y());
  for (int j = 0; j <= g.ny(); ++j) {
    const auto phi = [&](int i) { return state(Side::Positive, Field::PhiS, i, j); };
    out.push_back({g.y(j), sigma * (3 * phi(n) - 4 * phi(n - 1) + phi(n - 2)) / (2 * g.dx())});
  }
  return out;
}

double trapezoid(std::span<const double> values, double h) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t k = 1; k + 1 < values.size(); ++k) sum += values[k];
  return sum * h;
}

namespace {

double integrate_profile(const std::vector<ProfilePoint>& profile, double h) {
  std::vector<double> v;
  v.reserve(profile.size());
  for (const auto& pt : profile) v.push_back(pt.value);
  return trapezoid(v, h);
}

}  // namespace

double CurrentBalance::max_relative_mismatch() const {
  const double m = std::max({std::abs(negative_collector - membrane),
                             std::abs(negative_collector - positive_collector),
                             std::abs(membrane - positive_collector)});
  return m / std::abs(target);
}

CurrentBalance current_balance(const FieldState& state) {
  const double h = state.grid().dy();
  const auto& p = state.params();
  return {integrate_profile(collector_current_profile(state), h),
          integrate_profile(membrane_current_profile(state), h),
          integrate_profile(positive_collector_profile(state), h),
          model::current_sign(state.stage()) * model::average_current_density(p) * p.H};
}

double cell_voltage(const FieldState& state) {
  const Grid& g = state.grid();
  std::vector<double> pos(g.nodes_y());
  std::vector<double> neg(g.nodes_y());
  for (int j = 0; j <= g.ny(); ++j) {
    pos[j] = state(Side::Positive, Field::PhiS, g.collector_column(Side::Positive), j);
    neg[j] = state(Side::Negative, Field::PhiS, g.collector_column(Side::Negative), j);
  }
  return (trapezoid(pos, g.dy()) - trapezoid(neg, g.dy())) / g.height();
}

std::vector<OutletSample> outlet_profile(const FieldState& state) {
  const Grid& g = state.grid();
  std::vector<OutletSample> out;
  out.reserve(2 * g.nodes_x());
  for (Side side : kSides) {
    for (int i = 0; i <= g.nx(); ++i) {
      out.push_back({side, g.x(side, i), state(side, Field::Concentration, i, g.ny()),
                     state(side, Field::PhiL, i, g.ny()), state(side, Field::PhiS, i, g.ny())});
    }
  }
  return out;
}

SweepResult sweep_soc(Stage stage, const CellParameters& p, const Grid& grid,
                      std::span<const double> soc_grid, const SweepOptions& options) {
  if (soc_grid.empty()) throw DomainError("empty SOC grid");
  const bool increasing = soc_grid.size() < 2 || soc_grid[1] > soc_grid[0];
  for (std::size_t k = 0; k < soc_grid.size(); ++k) {
    model::check_soc(soc_grid[k], p);
    if (k > 0 && (increasing ? soc_grid[k] <= soc_grid[k - 1] : soc_grid[k] >= soc_grid[k - 1])) {
      throw DomainError("SOC grid must be strictly monotone");
    }
  }
  SweepResult out{stage, {}, {}, {}, {}};
  for (std::size_t k = 0; k < soc_grid.size(); ++k) {
    const FieldState* init = options.warm_start && k > 0 ? &out.states.back() : nullptr;
    auto [state, report] = newton_solve(soc_grid[k], stage, p, grid, options.solver, init);
    if (!report.converged) {
      std::ostringstream msg;
      msg << "reference solve did not converge at soc " << soc_grid[k] << " ("
          << model::to_string(stage) << ", residual " << report.residual_norm << " after "
          << report.iterations << " iterations)";
      throw SolverError(msg.str());
    }
    out.soc.push_back(soc_grid[k]);
    out.voltage.push_back(cell_voltage(state));
    out.states.push_back(std::move(state));
    out.reports.push_back(std::move(report));
  }
  return out;
}

}  // namespace vrfb::solver
