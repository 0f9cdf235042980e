#pragma once

// Central-difference oracles for network derivatives.

#include <algorithm>
#include <cmath>

#include "vrfb/autodiff/ops.hpp"
#include "vrfb/autodiff/spatial.hpp"
#include "vrfb/nn/composite_net.hpp"

namespace vrfb::testing {

struct SpatialFdError {
  double first = 0;   // worst over d/dx, d/dy of c, phi_l, phi_s
  double second = 0;  // worst over d2/dx2, d2/dy2
};

// Relative error with a floor, so derivatives that vanish by chance do not
// turn rounding noise into a failure.
inline double rel_err(double a, double b, double floor) {
  return std::abs(a - b) / std::max(floor, std::abs(b));
}

/// Steps are 1e-4 (first) and 1e-3 (second) of the normalized coordinate.
inline SpatialFdError spatial_fd_error(const nn::CompositeNet& net, model::Side side,
                                       const Eigen::RowVector3d& pt) {
  const auto& P = net.params();
  const ad::DiffBundle d = ad::eval_with_spatial_derivatives(net, side, Eigen::MatrixXd(pt));
  SpatialFdError e;
  for (int axis : {0, 1}) {
    const double half = axis == 0 ? P.L / 2 : P.H / 2;
    auto at = [&](double delta) {
      Eigen::MatrixXd q = pt;
      q(0, axis) += delta;
      return Eigen::RowVector3d(net.predict(side, q).row(0));
    };
    const double h1 = 1e-4 * half, h2 = 1e-3 * half;
    // fourth-order central stencils, so truncation stays far below the bounds
    const Eigen::RowVector3d f0 = at(0);
    const Eigen::RowVector3d fd1 = (-at(2 * h1) + 8 * at(h1) - 8 * at(-h1) + at(-2 * h1)) / (12 * h1);
    const Eigen::RowVector3d fd2 =
        (-at(2 * h2) + 16 * at(h2) - 30 * f0 + 16 * at(-h2) - at(-2 * h2)) / (12 * h2 * h2);
    const Eigen::MatrixXd& d1 = axis == 0 ? d.dx : d.dy;
    const Eigen::MatrixXd& d2 = axis == 0 ? d.dxx : d.dyy;
    for (int f = 0; f < 3; ++f) {
      const double s1 = 1e-3 * std::abs(f0[f]) / half;
      const double s2 = 1e-3 * std::abs(d1(0, f)) / half;
      e.first = std::max(e.first, rel_err(d1(0, f), fd1[f], s1));
      e.second = std::max(e.second, rel_err(d2(0, f), fd2[f], s2));
    }
  }
  return e;
}

/// A quadratic loss over every Taylor channel of one side's fields, O(1) in size.
inline double channel_loss(const nn::CompositeNet& net, model::Side side, const Eigen::MatrixXd& pts,
                           Eigen::VectorXd* gradient) {
  ad::Tape t;
  const auto f = ad::record_fields(t, net, side, pts, 5);
  const ad::Var l = ad::sum(ad::square(ad::scale(f.phi_l, 10.0))) +
                    ad::sum(ad::square(ad::scale(f.c, 1e-3))) + ad::sum(ad::square(f.phi_s));
  if (gradient) *gradient = t.gradient(l, net.parameter_count());
  return l.scalar();
}

/// Relative error of the tape gradient entry i against a central difference
/// with step 1e-6, floored at 1e-3 of the largest gradient entry.
inline double parameter_fd_error(const nn::CompositeNet& net, model::Side side,
                                 const Eigen::MatrixXd& pts, const Eigen::VectorXd& gradient,
                                 Eigen::Index i) {
  const Eigen::VectorXd theta = net.flat_parameters();
  auto shifted = [&](double s) {
    nn::CompositeNet n = net;
    Eigen::VectorXd th = theta;
    th[i] += s;
    n.set_flat_parameters(th);
    return channel_loss(n, side, pts, nullptr);
  };
  const double h = 1e-6;
  const double fd = (shifted(h) - shifted(-h)) / (2 * h);
  return rel_err(gradient[i], fd, 1e-3 * gradient.lpNorm<Eigen::Infinity>());
}

}  // namespace vrfb::testing
