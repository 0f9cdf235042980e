#pragma once

#include "vrfb/autodiff/taylor.hpp"
#include "vrfb/nn/composite_net.hpp"

namespace vrfb::ad {

/// Physical fields of one subnet as Taylor-stacked columns, derivatives with
/// respect to physical x and y.
struct FieldVars {
  Var c;
  Var phi_l;
  Var phi_s;
  TaylorLayout layout;

  Var channel(Var field, Channel ch, Eigen::Index row0, Eigen::Index rows) const;
};

/// Parameter-independent part of a subnet evaluation: the Taylor-seeded
/// normalized input and per-row output transform coefficients.
struct PreparedBatch {
  model::Side side = model::Side::Negative;
  TaylorLayout layout;
  Matrix input;
  Eigen::VectorXd c_scale, c_shift, phi_l_scale, phi_l_shift, phi_s_scale, phi_s_shift;
};

/// `points` rows are physical (x, y, soc); `blocks` is 3 (first derivatives)
/// or 5. Uses the net's parameters, stage and ranges, not its weights.
PreparedBatch prepare_batch(const nn::CompositeNet& net, model::Side side,
                            const Eigen::MatrixXd& points, int blocks);

/// Records the subnet and the output transforms on a prepared batch.
FieldVars record_fields(Tape& tape, const nn::CompositeNet& net, const PreparedBatch& batch);

FieldVars record_fields(Tape& tape, const nn::CompositeNet& net, model::Side side,
                        const Eigen::MatrixXd& points, int blocks);

/// Columns are (c, phi_l, phi_s); one row per sample.
struct DiffBundle {
  Eigen::MatrixXd value;
  Eigen::MatrixXd dx;
  Eigen::MatrixXd dy;
  Eigen::MatrixXd dxx;
  Eigen::MatrixXd dyy;
};

DiffBundle eval_with_spatial_derivatives(const nn::CompositeNet& net, model::Side side,
                                         const Eigen::MatrixXd& points);

}  // namespace vrfb::ad
