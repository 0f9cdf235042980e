#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "vrfb/nn/composite_net.hpp"

namespace vrfb::pinn {

/// y-average (trapezoid on ny uniform intervals) of phi_s at x = L minus the
/// y-average at x = -L; the same definition the reference solver reports.
double cell_voltage(const nn::CompositeNet& net, double soc, int ny = 200);

std::vector<double> voltage_curve(const nn::CompositeNet& net, std::span<const double> soc,
                                  int ny = 200);

/// sigma_s_eff * dphi_s/dx at (x = -L, y) for each y.
Eigen::VectorXd collector_current(const nn::CompositeNet& net, double soc,
                                  const Eigen::VectorXd& y);

/// (c, phi_l, phi_s) at (x, H) for each x of one side.
Eigen::MatrixXd outlet_fields(const nn::CompositeNet& net, model::Side side, double soc,
                              const Eigen::VectorXd& x);

}  // namespace vrfb::pinn
