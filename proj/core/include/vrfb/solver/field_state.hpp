#pragma once

#include <Eigen/Core>

#include "vrfb/model/cell_parameters.hpp"
#include "vrfb/solver/grid.hpp"

namespace vrfb::solver {

enum class Field : int { Concentration = 0, PhiL = 1, PhiS = 2 };

inline constexpr int kFieldsPerNode = 3;

/// Nodal solution (c, phi_l, phi_s) on both half cells. The concentration is
/// c2 on the negative side and c4 on the positive side.
class FieldState {
 public:
  FieldState(Grid grid, model::CellParameters params, double soc, model::Stage stage,
             Eigen::VectorXd unknowns);

  static int unknown_count(const Grid& g) {
    return 2 * g.nodes_x() * g.nodes_y() * kFieldsPerNode;
  }
  static int index(const Grid& g, model::Side side, int i, int j, Field f) {
    const int s = side == model::Side::Negative ? 0 : 1;
    return ((s * g.nodes_y() + j) * g.nodes_x() + i) * kFieldsPerNode + static_cast<int>(f);
  }

  double operator()(model::Side side, Field f, int i, int j) const {
    return u_[index(grid_, side, i, j, f)];
  }

  const Grid& grid() const { return grid_; }
  const model::CellParameters& params() const { return params_; }
  double soc() const { return soc_; }
  model::Stage stage() const { return stage_; }
  const Eigen::VectorXd& unknowns() const { return u_; }

  FieldState with_unknowns(Eigen::VectorXd u) const {
    return FieldState(grid_, params_, soc_, stage_, std::move(u));
  }

 private:
  Grid grid_;
  model::CellParameters params_;
  double soc_;
  model::Stage stage_;
  Eigen::VectorXd u_;
};

}  // namespace vrfb::solver
