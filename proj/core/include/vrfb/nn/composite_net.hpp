#pragma once

#include <cstdint>

#include "vrfb/model/cell_parameters.hpp"
#include "vrfb/nn/modified_fnn.hpp"

namespace vrfb::nn {

struct PotentialRange {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const PotentialRange&) const = default;
};

struct SideRanges {
  PotentialRange phi_l;
  PotentialRange phi_s;
  bool operator==(const SideRanges&) const = default;
};

/// Normalization ranges for the potentials per stage and side.
SideRanges default_potential_ranges(model::Side side, model::Stage stage);

/// Maps (x, y, soc) affinely onto [-1, 1]^3; throws DomainError outside the
/// side's box.
Eigen::Vector3d normalize_input(model::Side side, double x, double y, double soc,
                                const model::CellParameters& p);

/// field = scale * g(raw) + shift, with g(r) = sin(pi r / 2) for the
/// concentration and g(r) = r for the potentials. The potential map sends
/// raw +1 to the range minimum.
struct OutputAffine {
  double c_scale, c_shift;
  double phi_l_scale, phi_l_shift;
  double phi_s_scale, phi_s_shift;
};

OutputAffine output_affine(model::Side side, double soc, model::Stage stage,
                           const SideRanges& ranges, const model::CellParameters& p);

struct PhysicalFields {
  double c;
  double phi_l;
  double phi_s;
};

PhysicalFields transform_outputs(model::Side side, const Eigen::Vector3d& raw, double soc,
                                 model::Stage stage, const SideRanges& ranges,
                                 const model::CellParameters& p);

/// Two subnets (negative side first in the flat parameter vector) trained for
/// one stage.
class CompositeNet {
 public:
  CompositeNet(Architecture arch, model::Stage stage, model::CellParameters params);

  const Architecture& architecture() const { return neg_.architecture(); }
  model::Stage stage() const { return stage_; }
  const model::CellParameters& params() const { return params_; }
  const SideRanges& ranges(model::Side side) const;
  void set_ranges(model::Side side, SideRanges r);

  const ModifiedFNN& subnet(model::Side side) const;
  ModifiedFNN& subnet(model::Side side);

  Eigen::Index parameter_count() const { return neg_.parameter_count() + pos_.parameter_count(); }
  Eigen::Index parameter_offset(model::Side side) const;
  Eigen::VectorXd flat_parameters() const;
  void set_flat_parameters(const Eigen::VectorXd& theta);

  /// Physical (c, phi_l, phi_s) per row of physical (x, y, soc).
  Eigen::MatrixXd predict(model::Side side, const Eigen::MatrixXd& points) const;

 private:
  model::Stage stage_;
  model::CellParameters params_;
  ModifiedFNN neg_;
  ModifiedFNN pos_;
  SideRanges neg_ranges_;
  SideRanges pos_ranges_;
};

/// Xavier init of both subnets from one stream, negative subnet first.
CompositeNet init(CompositeNet net, std::uint64_t seed);

}  // namespace vrfb::nn
