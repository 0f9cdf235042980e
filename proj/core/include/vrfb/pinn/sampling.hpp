#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include <Eigen/Core>

#include "vrfb/model/cell_parameters.hpp"

namespace vrfb::pinn {

/// Geometric point sets. Operators on the same geometric boundary share one set.
enum class PointSet {
  InteriorNeg,
  InteriorPos,
  CollectorNeg,  // x = -L
  Membrane,      // x = 0, evaluated by both subnets
  CollectorPos,  // x = L
  InletNeg,      // y = 0
  InletPos,
  OutletNeg,     // y = H
  OutletPos,
};

inline constexpr std::size_t kPointSetCount = 9;
inline constexpr std::array<PointSet, kPointSetCount> kAllPointSets = {
    PointSet::InteriorNeg, PointSet::InteriorPos, PointSet::CollectorNeg,
    PointSet::Membrane,    PointSet::CollectorPos, PointSet::InletNeg,
    PointSet::InletPos,    PointSet::OutletNeg,    PointSet::OutletPos};

std::string_view name_of(PointSet s);

struct SamplingConfig {
  int interior_per_side = 10000;
  int vertical_boundary = 1800;   // per set on x = -L, 0, L
  int horizontal_boundary = 200;  // per set on y = 0, H and side
  int epinn_soc = 101;
  int epinn_y = 101;

  static SamplingConfig desk_scale();
  void validate() const;
};

/// Electrolyte-potential labels on the negative side: x = 0 or x = -L.
struct LabeledSet {
  Eigen::MatrixXd points;  // rows (x, y, soc)
  Eigen::VectorXd phi_l;

  Eigen::Index size() const { return points.rows(); }
  bool empty() const { return points.rows() == 0; }
  /// Throws DomainError unless every row lies on x = 0 or x = -L inside the box.
  void validate(const model::CellParameters& p) const;
};

/// Training points, drawn once from a seed and held fixed.
class SamplingPlan {
 public:
  static SamplingPlan sample(const SamplingConfig& cfg, const model::CellParameters& p,
                             std::uint64_t seed);

  const Eigen::MatrixXd& points(PointSet s) const { return sets_[static_cast<std::size_t>(s)]; }
  const SamplingConfig& config() const { return cfg_; }
  std::uint64_t seed() const { return seed_; }

  /// EPINN quadrature on the negative side: row s * epinn_y + k holds
  /// (x, y_k, soc_s); weights are the trapezoid weights in y.
  const Eigen::MatrixXd& epinn_collector_points() const { return epinn_collector_; }
  const Eigen::MatrixXd& epinn_membrane_points() const { return epinn_membrane_; }
  const Eigen::VectorXd& epinn_weights() const { return epinn_weights_; }
  const Eigen::VectorXd& epinn_soc() const { return epinn_soc_; }

  const LabeledSet& labeled() const { return labeled_; }
  void set_labeled(LabeledSet set, const model::CellParameters& p);

 private:
  SamplingConfig cfg_;
  std::uint64_t seed_ = 0;
  std::array<Eigen::MatrixXd, kPointSetCount> sets_;
  Eigen::MatrixXd epinn_collector_;
  Eigen::MatrixXd epinn_membrane_;
  Eigen::VectorXd epinn_weights_;
  Eigen::VectorXd epinn_soc_;
  LabeledSet labeled_;
};

}  // namespace vrfb::pinn
