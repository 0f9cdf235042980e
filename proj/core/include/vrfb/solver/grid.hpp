#pragma once

#include "vrfb/model/cell_parameters.hpp"

namespace vrfb::solver {

/// Uniform node grid over both half cells. Each side carries its own column
/// of nodes on the membrane line x = 0.
class Grid {
 public:
  Grid() = default;
  /// Throws DomainError unless nx_per_side >= 8 and ny >= 16.
  Grid(int nx_per_side, int ny, const model::CellParameters& p);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nodes_x() const { return nx_ + 1; }
  int nodes_y() const { return ny_ + 1; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double length() const { return L_; }
  double height() const { return H_; }

  double x(model::Side side, int i) const;
  double y(int j) const { return j == ny_ ? H_ : j * dy_; }

  /// Column index of the current collector (x = -L or x = L).
  int collector_column(model::Side side) const { return side == model::Side::Negative ? 0 : nx_; }
  /// Column index of the membrane line x = 0.
  int membrane_column(model::Side side) const { return side == model::Side::Negative ? nx_ : 0; }

  bool operator==(const Grid&) const = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  double L_ = 0.0;
  double H_ = 0.0;
  double dx_ = 0.0;
  double dy_ = 0.0;
};

}  // namespace vrfb::solver
