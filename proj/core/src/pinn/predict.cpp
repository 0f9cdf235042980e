#include "vrfb/pinn/predict.hpp"

#include "vrfb/autodiff/spatial.hpp"
#include "vrfb/error.hpp"
#include "vrfb/model/electrochemistry.hpp"

namespace vrfb::pinn {

using model::Side;

namespace {

Eigen::MatrixXd line(double x, const Eigen::VectorXd& y, double soc) {
  Eigen::MatrixXd pts(y.size(), 3);
  pts.col(0).setConstant(x);
  pts.col(1) = y;
  pts.col(2).setConstant(soc);
  return pts;
}

}  // namespace

double cell_voltage(const nn::CompositeNet& net, double soc, int ny) {
  if (ny < 1) throw DomainError("cell_voltage: ny must be >= 1");
  const auto& p = net.params();
  const Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(ny + 1, 0.0, p.H);
  const Eigen::VectorXd diff = net.predict(Side::Positive, line(p.L, y, soc)).col(2) -
                               net.predict(Side::Negative, line(-p.L, y, soc)).col(2);
  const double h = p.H / ny;
  return h * (diff.sum() - 0.5 * (diff[0] + diff[ny])) / p.H;
}

std::vector<double> voltage_curve(const nn::CompositeNet& net, std::span<const double> soc,
                                  int ny) {
  std::vector<double> v;
  v.reserve(soc.size());
  for (double s : soc) v.push_back(cell_voltage(net, s, ny));
  return v;
}

Eigen::VectorXd collector_current(const nn::CompositeNet& net, double soc,
                                  const Eigen::VectorXd& y) {
  const auto& p = net.params();
  const ad::DiffBundle d =
      ad::eval_with_spatial_derivatives(net, Side::Negative, line(-p.L, y, soc));
  return model::solid_conductivity(p) * d.dx.col(2);
}

Eigen::MatrixXd outlet_fields(const nn::CompositeNet& net, Side side, double soc,
                              const Eigen::VectorXd& x) {
  Eigen::MatrixXd pts(x.size(), 3);
  pts.col(0) = x;
  pts.col(1).setConstant(net.params().H);
  pts.col(2).setConstant(soc);
  return net.predict(side, pts);
}

}  // namespace vrfb::pinn
