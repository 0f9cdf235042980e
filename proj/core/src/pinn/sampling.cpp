#include "vrfb/pinn/sampling.hpp"

#include <cmath>
#include <sstream>

#include "vrfb/error.hpp"
#include "vrfb/util/random.hpp"

namespace vrfb::pinn {

using model::Side;

std::string_view name_of(PointSet s) {
  switch (s) {
    case PointSet::InteriorNeg: return "interior_neg";
    case PointSet::InteriorPos: return "interior_pos";
    case PointSet::CollectorNeg: return "collector_neg";
    case PointSet::Membrane: return "membrane";
    case PointSet::CollectorPos: return "collector_pos";
    case PointSet::InletNeg: return "inlet_neg";
    case PointSet::InletPos: return "inlet_pos";
    case PointSet::OutletNeg: return "outlet_neg";
    case PointSet::OutletPos: return "outlet_pos";
  }
  throw DomainError("unknown point set");
}

SamplingConfig SamplingConfig::desk_scale() {
  SamplingConfig c;
  c.interior_per_side = 2000;
  c.vertical_boundary = 400;
  c.horizontal_boundary = 100;
  c.epinn_soc = 21;
  c.epinn_y = 51;
  return c;
}

void SamplingConfig::validate() const {
  auto positive = [](int v, const char* field) {
    if (v < 1) throw ConfigError(std::string("sampling.") + field + " must be >= 1");
  };
  positive(interior_per_side, "interior_per_side");
  positive(vertical_boundary, "vertical_boundary");
  positive(horizontal_boundary, "horizontal_boundary");
  if (epinn_soc < 2) throw ConfigError("sampling.epinn_soc must be >= 2");
  if (epinn_y < 2) throw ConfigError("sampling.epinn_y must be >= 2");
}

void LabeledSet::validate(const model::CellParameters& p) const {
  if (points.cols() != 3 && points.rows() > 0) throw DomainError("labeled points need x, y, soc");
  if (phi_l.size() != points.rows()) throw DomainError("labeled set: target count mismatch");
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double x = points(i, 0), y = points(i, 1), soc = points(i, 2);
    const bool on_line = x == 0.0 || x == -p.L;
    if (!on_line || y < 0.0 || y > p.H || soc < p.soc_min || soc > p.soc_max ||
        !std::isfinite(phi_l[i])) {
      std::ostringstream msg;
      msg << "labeled row " << i << " (" << x << ", " << y << ", " << soc
          << ") is not on the membrane or negative collector";
      throw DomainError(msg.str());
    }
  }
}

SamplingPlan SamplingPlan::sample(const SamplingConfig& cfg, const model::CellParameters& p,
                                  std::uint64_t seed) {
  cfg.validate();
  SamplingPlan plan;
  plan.cfg_ = cfg;
  plan.seed_ = seed;
  Rng rng(seed);

  auto draw = [&](int n, auto x_of, auto y_of) {
    Eigen::MatrixXd m(n, 3);
    for (int i = 0; i < n; ++i) {
      const double x = x_of();
      const double y = y_of();
      m(i, 0) = x;
      m(i, 1) = y;
      m(i, 2) = rng.uniform(p.soc_min, p.soc_max);
    }
    return m;
  };
  auto fixed = [](double v) { return [v] { return v; }; };
  auto open_x = [&](Side s) {
    const auto r = model::x_range(s, p);
    return [&rng, r] { return rng.uniform_open(r.lo, r.hi); };
  };
  auto closed_x = [&](Side s) {
    const auto r = model::x_range(s, p);
    return [&rng, r] { return rng.uniform(r.lo, r.hi); };
  };
  auto open_y = [&] { return rng.uniform_open(0.0, p.H); };
  auto closed_y = [&] { return rng.uniform(0.0, p.H); };

  auto& s = plan.sets_;
  auto at = [](PointSet ps) { return static_cast<std::size_t>(ps); };
  s[at(PointSet::InteriorNeg)] = draw(cfg.interior_per_side, open_x(Side::Negative), open_y);
  s[at(PointSet::InteriorPos)] = draw(cfg.interior_per_side, open_x(Side::Positive), open_y);
  s[at(PointSet::CollectorNeg)] = draw(cfg.vertical_boundary, fixed(-p.L), closed_y);
  s[at(PointSet::Membrane)] = draw(cfg.vertical_boundary, fixed(0.0), closed_y);
  s[at(PointSet::CollectorPos)] = draw(cfg.vertical_boundary, fixed(p.L), closed_y);
  s[at(PointSet::InletNeg)] = draw(cfg.horizontal_boundary, closed_x(Side::Negative), fixed(0.0));
  s[at(PointSet::InletPos)] = draw(cfg.horizontal_boundary, closed_x(Side::Positive), fixed(0.0));
  s[at(PointSet::OutletNeg)] = draw(cfg.horizontal_boundary, closed_x(Side::Negative), fixed(p.H));
  s[at(PointSet::OutletPos)] = draw(cfg.horizontal_boundary, closed_x(Side::Positive), fixed(p.H));

  const Eigen::Index ns = cfg.epinn_soc, ny = cfg.epinn_y;
  plan.epinn_soc_ = Eigen::VectorXd::LinSpaced(ns, p.soc_min, p.soc_max);
  const Eigen::VectorXd ys = Eigen::VectorXd::LinSpaced(ny, 0.0, p.H);
  const double h = p.H / static_cast<double>(ny - 1);
  plan.epinn_collector_.resize(ns * ny, 3);
  plan.epinn_membrane_.resize(ns * ny, 3);
  plan.epinn_weights_.resize(ns * ny);
  for (Eigen::Index a = 0; a < ns; ++a) {
    for (Eigen::Index k = 0; k < ny; ++k) {
      const Eigen::Index r = a * ny + k;
      plan.epinn_collector_.row(r) << -p.L, ys[k], plan.epinn_soc_[a];
      plan.epinn_membrane_.row(r) << 0.0, ys[k], plan.epinn_soc_[a];
      plan.epinn_weights_[r] = (k == 0 || k == ny - 1) ? 0.5 * h : h;
    }
  }
  return plan;
}

void SamplingPlan::set_labeled(LabeledSet set, const model::CellParameters& p) {
  set.validate(p);
  labeled_ = std::move(set);
}

}  // namespace vrfb::pinn
