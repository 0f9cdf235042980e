#include "vrfb/autodiff/spatial.hpp"

#include <numbers>

#include "vrfb/autodiff/ops.hpp"
#include "vrfb/error.hpp"

namespace vrfb::ad {

Var FieldVars::channel(Var field, Channel ch, Eigen::Index row0, Eigen::Index rows) const {
  if (!layout.has(ch)) throw DomainError("channel not carried by this layout");
  return column_block(field, layout.offset(ch) + row0, rows, 0);
}

PreparedBatch prepare_batch(const nn::CompositeNet& net, model::Side side,
                            const Eigen::MatrixXd& points, int blocks) {
  const Eigen::Index n = points.rows();
  if (n == 0) throw DomainError("prepare_batch: empty batch");
  if (points.cols() != 3) throw DomainError("prepare_batch: points need columns x, y, soc");
  if (blocks != 3 && blocks != 5) throw DomainError("prepare_batch: blocks must be 3 or 5");
  const auto& p = net.params();
  PreparedBatch b;
  b.side = side;
  b.layout = TaylorLayout{n, blocks};
  b.input = Matrix::Zero(b.layout.rows(), 3);
  for (auto* v : {&b.c_scale, &b.c_shift, &b.phi_l_scale, &b.phi_l_shift, &b.phi_s_scale,
                  &b.phi_s_shift}) {
    v->resize(n);
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    b.input.row(i) =
        nn::normalize_input(side, points(i, 0), points(i, 1), points(i, 2), p).transpose();
    const nn::OutputAffine a =
        nn::output_affine(side, points(i, 2), net.stage(), net.ranges(side), p);
    b.c_scale[i] = a.c_scale;
    b.c_shift[i] = a.c_shift;
    b.phi_l_scale[i] = a.phi_l_scale;
    b.phi_l_shift[i] = a.phi_l_shift;
    b.phi_s_scale[i] = a.phi_s_scale;
    b.phi_s_shift[i] = a.phi_s_shift;
  }
  // chain factors of the normalization: d(x_hat)/dx = 2/L, d(y_hat)/dy = 2/H
  b.input.block(b.layout.offset(Channel::Dx), 0, n, 1).setConstant(2.0 / p.L);
  b.input.block(b.layout.offset(Channel::Dy), 1, n, 1).setConstant(2.0 / p.H);
  return b;
}

FieldVars record_fields(Tape& tape, const nn::CompositeNet& net, const PreparedBatch& b) {
  const TaylorLayout layout = b.layout;
  const std::string name =
      b.side == model::Side::Negative ? "negative subnet" : "positive subnet";
  const Var raw = nn::record(tape, net.subnet(b.side), net.parameter_offset(b.side),
                             tape.constant(b.input), layout, name);
  const Eigen::Index rows = layout.rows();
  const Var rc = scale(column_block(raw, 0, rows, 0), std::numbers::pi / 2.0);
  FieldVars f;
  f.layout = layout;
  f.c = taylor_row_affine(taylor_activate(rc, layout, Activation::Sine), layout, b.c_scale,
                          b.c_shift);
  f.phi_l = taylor_row_affine(column_block(raw, 0, rows, 1), layout, b.phi_l_scale, b.phi_l_shift);
  f.phi_s = taylor_row_affine(column_block(raw, 0, rows, 2), layout, b.phi_s_scale, b.phi_s_shift);
  return f;
}

FieldVars record_fields(Tape& tape, const nn::CompositeNet& net, model::Side side,
                        const Eigen::MatrixXd& points, int blocks) {
  return record_fields(tape, net, prepare_batch(net, side, points, blocks));
}

DiffBundle eval_with_spatial_derivatives(const nn::CompositeNet& net, model::Side side,
                                         const Eigen::MatrixXd& points) {
  Tape tape;
  const FieldVars f = record_fields(tape, net, side, points, 5);
  const Eigen::Index n = points.rows();
  DiffBundle b;
  Eigen::MatrixXd* targets[5] = {&b.value, &b.dx, &b.dy, &b.dxx, &b.dyy};
  for (int k = 0; k < 5; ++k) {
    Eigen::MatrixXd& m = *targets[k];
    m.resize(n, 3);
    const Eigen::Index r0 = k * n;
    m.col(0) = f.c.value().middleRows(r0, n);
    m.col(1) = f.phi_l.value().middleRows(r0, n);
    m.col(2) = f.phi_s.value().middleRows(r0, n);
  }
  return b;
}

}  // namespace vrfb::ad
