#pragma once

#include <span>

#include "vrfb/autodiff/tape.hpp"

// Differentiable primitives. Binary elementwise ops require equal shapes and
// operands on the same tape.
namespace vrfb::ad {

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var shift(Var a, double s);
/// Elementwise product with a constant column (rows must match).
Var scale_rows(Var a, const Eigen::VectorXd& column);
/// Elementwise sum with a constant of the same shape.
Var add_constant(Var a, const Matrix& c);

Var exp(Var a);
/// log(max(a, floor)); zero derivative below the floor.
Var log_floor(Var a, double floor);
/// Identity inside [lo, hi], constant outside; derivative 1 strictly inside
/// and 0 on and beyond the bounds.
Var clamp(Var a, double lo, double hi);
Var square(Var a);

/// Rows [row0, row0 + rows) of column `col`.
Var column_block(Var a, Eigen::Index row0, Eigen::Index rows, Eigen::Index col);

/// X * W^T with b (1 x out or out x 1) added to the first `bias_rows` rows.
Var affine(Var x, Var w, Var b, Eigen::Index bias_rows);

/// Sum of all entries as a 1x1 node.
Var sum(Var a);
/// mean_i m_i * a_i^2 over a column, as a 1x1 node.
Var mean_weighted_square(Var a, const Eigen::VectorXd& m);
/// out[s] = sum_k w[s*len + k] * a[s*len + k] for consecutive segments.
Var segment_weighted_sum(Var a, const Eigen::VectorXd& w, Eigen::Index segment_length);

inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator*(double s, Var a) { return scale(a, s); }
inline Var operator*(Var a, double s) { return scale(a, s); }
inline Var operator+(Var a, double s) { return shift(a, s); }
inline Var operator-(Var a, double s) { return shift(a, -s); }
inline Var operator-(Var a) { return scale(a, -1.0); }

/// Closed-form derivative of M(w) r^2 with M(x) = x^2 per point: 2 w r^2.
Eigen::VectorXd sa_weight_gradient(std::span<const double> residual_sq,
                                   std::span<const double> weights);

}  // namespace vrfb::ad
