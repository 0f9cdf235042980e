#include "vrfb/nn/composite_net.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "vrfb/error.hpp"

namespace vrfb::nn {

using model::Side;
using model::Stage;

SideRanges default_potential_ranges(Side side, Stage stage) {
  if (stage == Stage::Charging) {
    return side == Side::Negative ? SideRanges{{0.25, 0.60}, {0.0, 0.30}}
                                  : SideRanges{{0.30, 0.60}, {1.40, 2.20}};
  }
  return side == Side::Negative ? SideRanges{{-0.20, 0.25}, {-0.1, 0.0}}
                                : SideRanges{{-0.25, 0.20}, {0.30, 1.50}};
}

namespace {

double to_unit(double v, double lo, double hi, const char* what) {
  const double tol = 1e-12 * std::max(1.0, std::abs(hi - lo));
  if (!(v >= lo - tol && v <= hi + tol)) {
    std::ostringstream msg;
    msg << what << " = " << v << " outside [" << lo << ", " << hi << "]";
    throw DomainError(msg.str());
  }
  return 2.0 * (v - lo) / (hi - lo) - 1.0;
}

}  // namespace

Eigen::Vector3d normalize_input(Side side, double x, double y, double soc,
                                const model::CellParameters& p) {
  const auto xr = model::x_range(side, p);
  return {to_unit(x, xr.lo, xr.hi, "x"), to_unit(y, 0.0, p.H, "y"),
          to_unit(soc, p.soc_min, p.soc_max, "soc")};
}

OutputAffine output_affine(Side side, double soc, Stage stage, const SideRanges& r,
                           const model::CellParameters& p) {
  const double charge = model::charge_flag(stage);
  OutputAffine a{};
  a.c_scale = p.c0 * (soc - charge) / 2.0;
  a.c_shift = side == Side::Negative ? p.c0 * (soc + charge) / 2.0
                                     : p.c0 * (2.0 - soc - charge) / 2.0;
  a.phi_l_scale = (r.phi_l.min - r.phi_l.max) / 2.0;
  a.phi_l_shift = (r.phi_l.min + r.phi_l.max) / 2.0;
  a.phi_s_scale = (r.phi_s.min - r.phi_s.max) / 2.0;
  a.phi_s_shift = (r.phi_s.min + r.phi_s.max) / 2.0;
  return a;
}

PhysicalFields transform_outputs(Side side, const Eigen::Vector3d& raw, double soc, Stage stage,
                                 const SideRanges& ranges, const model::CellParameters& p) {
  const OutputAffine a = output_affine(side, soc, stage, ranges, p);
  return {a.c_scale * std::sin(raw[0] * std::numbers::pi / 2.0) + a.c_shift,
          a.phi_l_scale * raw[1] + a.phi_l_shift, a.phi_s_scale * raw[2] + a.phi_s_shift};
}

CompositeNet::CompositeNet(Architecture arch, Stage stage, model::CellParameters params)
    : stage_(stage),
      params_(params),
      neg_(arch),
      pos_(arch),
      neg_ranges_(default_potential_ranges(Side::Negative, stage)),
      pos_ranges_(default_potential_ranges(Side::Positive, stage)) {
  if (arch.inputs != 3 || arch.outputs != 3) {
    throw ConfigError("composite subnets need 3 inputs and 3 outputs");
  }
}

const SideRanges& CompositeNet::ranges(Side side) const {
  return side == Side::Negative ? neg_ranges_ : pos_ranges_;
}

void CompositeNet::set_ranges(Side side, SideRanges r) {
  if (!(r.phi_l.min < r.phi_l.max) || !(r.phi_s.min < r.phi_s.max)) {
    throw ConfigError("potential range needs min < max");
  }
  (side == Side::Negative ? neg_ranges_ : pos_ranges_) = r;
}

const ModifiedFNN& CompositeNet::subnet(Side side) const {
  return side == Side::Negative ? neg_ : pos_;
}

ModifiedFNN& CompositeNet::subnet(Side side) { return side == Side::Negative ? neg_ : pos_; }

Eigen::Index CompositeNet::parameter_offset(Side side) const {
  return side == Side::Negative ? 0 : neg_.parameter_count();
}

Eigen::VectorXd CompositeNet::flat_parameters() const {
  Eigen::VectorXd theta(parameter_count());
  theta << neg_.parameters(), pos_.parameters();
  return theta;
}

void CompositeNet::set_flat_parameters(const Eigen::VectorXd& theta) {
  if (theta.size() != parameter_count()) {
    throw DomainError("composite net expects " + std::to_string(parameter_count()) +
                      " parameters, got " + std::to_string(theta.size()));
  }
  neg_.set_parameters(theta.head(neg_.parameter_count()));
  pos_.set_parameters(theta.tail(pos_.parameter_count()));
}

Eigen::MatrixXd CompositeNet::predict(Side side, const Eigen::MatrixXd& points) const {
  if (points.cols() != 3) throw DomainError("predict: points need columns x, y, soc");
  Eigen::MatrixXd x(points.rows(), 3);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    x.row(i) = normalize_input(side, points(i, 0), points(i, 1), points(i, 2), params_).transpose();
  }
  const Eigen::MatrixXd raw = forward(subnet(side), x);
  Eigen::MatrixXd out(points.rows(), 3);
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const PhysicalFields f =
        transform_outputs(side, raw.row(i).transpose(), points(i, 2), stage_, ranges(side), params_);
    out.row(i) << f.c, f.phi_l, f.phi_s;
  }
  return out;
}

CompositeNet init(CompositeNet net, std::uint64_t seed) {
  Rng rng(seed);
  xavier_init(net.subnet(Side::Negative), rng);
  xavier_init(net.subnet(Side::Positive), rng);
  return net;
}

}  // namespace vrfb::nn
