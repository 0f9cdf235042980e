#include "vrfb/solver/grid.hpp"

#include <string>

#include "vrfb/error.hpp"
#include "vrfb/solver/field_state.hpp"

namespace vrfb::solver {

Grid::Grid(int nx_per_side, int ny, const model::CellParameters& p)
    : nx_(nx_per_side), ny_(ny), L_(p.L), H_(p.H) {
  if (nx_per_side < 8 || ny < 16) {
    throw DomainError("grid " + std::to_string(nx_per_side) + "x" + std::to_string(ny) +
                      " too coarse (need nx_per_side >= 8, ny >= 16)");
  }
  dx_ = L_ / nx_;
  dy_ = H_ / ny_;
}

double Grid::x(model::Side side, int i) const {
  if (side == model::Side::Negative) return i == nx_ ? 0.0 : -L_ + i * dx_;
  return i == nx_ ? L_ : i * dx_;
}

FieldState::FieldState(Grid grid, model::CellParameters params, double soc, model::Stage stage,
                       Eigen::VectorXd unknowns)
    : grid_(grid), params_(params), soc_(soc), stage_(stage), u_(std::move(unknowns)) {
  if (u_.size() != unknown_count(grid_)) {
    throw DomainError("field state has " + std::to_string(u_.size()) + " unknowns, grid needs " +
                      std::to_string(unknown_count(grid_)));
  }
}

}  // namespace vrfb::solver
