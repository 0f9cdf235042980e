#include "vrfb/autodiff/ops.hpp"

#include <cmath>
#include <string>

#include "vrfb/error.hpp"

namespace vrfb::ad {

namespace {

Tape& tape_of(Var a) {
  if (!a.valid()) throw DomainError("operation on an unbound variable");
  return *a.tape();
}

Tape& tape_of(Var a, Var b) {
  Tape& t = tape_of(a);
  if (b.tape() != &t) throw DomainError("operands recorded on different tapes");
  return t;
}

void require_same_shape(Var a, Var b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DomainError(std::string(op) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                      std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  }
}

}  // namespace

Var add(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape(a, b, "add");
  const int ia = a.id(), ib = b.id();
  return t.record([=](const Tape& tp) -> Matrix { return tp.value(ia) + tp.value(ib); },
                  [=](Tape& tp, const Matrix& g) {
                    tp.accumulate(ia, g);
                    tp.accumulate(ib, g);
                  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape(a, b, "sub");
  const int ia = a.id(), ib = b.id();
  return t.record([=](const Tape& tp) -> Matrix { return tp.value(ia) - tp.value(ib); },
                  [=](Tape& tp, const Matrix& g) {
                    tp.accumulate(ia, g);
                    tp.accumulate(ib, -g);
                  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a, b);
  require_same_shape(a, b, "mul");
  const int ia = a.id(), ib = b.id();
  return t.record(
      [=](const Tape& tp) -> Matrix { return tp.value(ia).cwiseProduct(tp.value(ib)); },
      [=](Tape& tp, const Matrix& g) {
        tp.accumulate(ia, g.cwiseProduct(tp.value(ib)));
        tp.accumulate(ib, g.cwiseProduct(tp.value(ia)));
      });
}

Var scale(Var a, double s) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.record([=](const Tape& tp) -> Matrix { return s * tp.value(ia); },
                  [=](Tape& tp, const Matrix& g) { tp.accumulate(ia, s * g); });
}

Var shift(Var a, double s) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.record([=](const Tape& tp) -> Matrix { return tp.value(ia).array() + s; },
                  [=](Tape& tp, const Matrix& g) { tp.accumulate(ia, g); });
}

Var scale_rows(Var a, const Eigen::VectorXd& column) {
  Tape& t = tape_of(a);
  if (column.size() != a.rows()) throw DomainError("scale_rows: row count mismatch");
  const int ia = a.id();
  return t.record(
      [=](const Tape& tp) -> Matrix { return column.asDiagonal() * tp.value(ia); },
      [=](Tape& tp, const Matrix& g) { tp.accumulate(ia, column.asDiagonal() * g); });
}

Var add_constant(Var a, const Matrix& c) {
  Tape& t = tape_of(a);
  if (c.rows() != a.rows() || c.cols() != a.cols()) {
    throw DomainError("add_constant: shape mismatch");
  }
  const int ia = a.id();
  return t.record([=](const Tape& tp) -> Matrix { return tp.value(ia) + c; },
                  [=](Tape& tp, const Matrix& g) { tp.accumulate(ia, g); });
}

Var exp(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  // the output id is the next slot; the backward reads it back as exp(a)
  const int self = static_cast<int>(t.size());
  return t.record([=](const Tape& tp) -> Matrix { return tp.value(ia).array().exp(); },
                  [=](Tape& tp, const Matrix& g) {
                    tp.accumulate(ia, g.cwiseProduct(tp.value(self)));
                  });
}

Var log_floor(Var a, double floor) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.record(
      [=](const Tape& tp) -> Matrix { return tp.value(ia).array().max(floor).log(); },
      [=](Tape& tp, const Matrix& g) {
        const auto& x = tp.value(ia).array();
        tp.accumulate(ia, (x > floor).select(g.array() / x, 0.0).matrix());
      });
}

Var clamp(Var a, double lo, double hi) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.record(
      [=](const Tape& tp) -> Matrix { return tp.value(ia).array().max(lo).min(hi); },
      [=](Tape& tp, const Matrix& g) {
        const auto& x = tp.value(ia).array();
        tp.accumulate(ia, (x > lo && x < hi).select(g.array(), 0.0).matrix());
      });
}

Var square(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  return t.record(
      [=](const Tape& tp) -> Matrix { return tp.value(ia).array().square(); },
      [=](Tape& tp, const Matrix& g) { tp.accumulate(ia, 2.0 * g.cwiseProduct(tp.value(ia))); });
}

Var column_block(Var a, Eigen::Index row0, Eigen::Index rows, Eigen::Index col) {
  Tape& t = tape_of(a);
  if (row0 < 0 || rows < 0 || row0 + rows > a.rows() || col < 0 || col >= a.cols()) {
    throw DomainError("column_block out of range");
  }
  const int ia = a.id();
  return t.record(
      [=](const Tape& tp) -> Matrix { return tp.value(ia).block(row0, col, rows, 1); },
      [=](Tape& tp, const Matrix& g) { tp.accumulate_block(ia, row0, col, g); });
}

Var affine(Var x, Var w, Var b, Eigen::Index bias_rows) {
  Tape& t = tape_of(x, w);
  if (b.tape() != &t) throw DomainError("affine: bias on a different tape");
  if (x.cols() != w.cols()) {
    throw DomainError("affine: input width " + std::to_string(x.cols()) + " vs weight columns " +
                      std::to_string(w.cols()));
  }
  if (b.value().size() != w.rows()) throw DomainError("affine: bias length mismatch");
  const int ix = x.id(), iw = w.id(), ib = b.id();
  if (bias_rows < 0 || bias_rows > x.rows()) throw DomainError("affine: bad bias row count");
  return t.record(
      [=](const Tape& tp) -> Matrix {
        Matrix y = tp.value(ix) * tp.value(iw).transpose();
        const auto bias = tp.value(ib).reshaped().transpose();
        y.topRows(bias_rows).rowwise() += bias;
        return y;
      },
      [=](Tape& tp, const Matrix& g) {
        tp.accumulate(ix, g * tp.value(iw));
        tp.accumulate(iw, g.transpose() * tp.value(ix));
        const Matrix& bv = tp.value(ib);
        Matrix db = g.topRows(bias_rows).colwise().sum();
        tp.accumulate(ib, db.reshaped(bv.rows(), bv.cols()));
      });
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  const int ia = a.id();
  const Eigen::Index nr = a.rows(), nc = a.cols();
  return t.record([=](const Tape& tp) -> Matrix { return Matrix::Constant(1, 1, tp.value(ia).sum()); },
                  [=](Tape& tp, const Matrix& g) {
                    tp.accumulate(ia, Matrix::Constant(nr, nc, g(0, 0)));
                  });
}

Var mean_weighted_square(Var a, const Eigen::VectorXd& m) {
  Tape& t = tape_of(a);
  if (a.cols() != 1 || m.size() != a.rows()) {
    throw DomainError("mean_weighted_square: need a column and matching weights");
  }
  const int ia = a.id();
  const double inv_n = a.rows() > 0 ? 1.0 / static_cast<double>(a.rows()) : 0.0;
  return t.record(
      [=](const Tape& tp) -> Matrix {
        return Matrix::Constant(1, 1, inv_n * (m.array() * tp.value(ia).array().square()).sum());
      },
      [=](Tape& tp, const Matrix& g) {
        tp.accumulate(ia, ((2.0 * inv_n * g(0, 0)) * m.array() * tp.value(ia).array()).matrix());
      });
}

Var segment_weighted_sum(Var a, const Eigen::VectorXd& w, Eigen::Index segment_length) {
  Tape& t = tape_of(a);
  if (a.cols() != 1 || w.size() != a.rows() || segment_length <= 0 ||
      a.rows() % segment_length != 0) {
    throw DomainError("segment_weighted_sum: shape mismatch");
  }
  const int ia = a.id();
  const Eigen::Index segments = a.rows() / segment_length;
  return t.record(
      [=](const Tape& tp) -> Matrix {
        const Eigen::VectorXd prod = w.cwiseProduct(tp.value(ia));
        return prod.reshaped(segment_length, segments).colwise().sum().transpose();
      },
      [=](Tape& tp, const Matrix& g) {
        Eigen::MatrixXd spread = g.transpose().replicate(segment_length, 1);
        tp.accumulate(ia, w.cwiseProduct(spread.reshaped()));
      });
}

Eigen::VectorXd sa_weight_gradient(std::span<const double> residual_sq,
                                   std::span<const double> weights) {
  if (residual_sq.size() != weights.size()) {
    throw DomainError("sa_weight_gradient: " + std::to_string(residual_sq.size()) +
                      " residuals vs " + std::to_string(weights.size()) + " weights");
  }
  Eigen::VectorXd g(static_cast<Eigen::Index>(weights.size()));
  for (std::size_t i = 0; i < weights.size(); ++i) {
    g[static_cast<Eigen::Index>(i)] = 2.0 * weights[i] * residual_sq[i];
  }
  return g;
}

}  // namespace vrfb::ad
