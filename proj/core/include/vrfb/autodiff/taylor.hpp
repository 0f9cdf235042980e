#pragma once

#include "vrfb/autodiff/tape.hpp"

// Truncated Taylor propagation in two spatial directions.
//
// A Taylor-stacked matrix holds `blocks` row blocks of n rows each, in the
// order value, d/dx, d/dy, d2/dx2, d2/dy2. With 3 blocks only first
// derivatives are carried. Linear maps act blockwise, so affine layers use
// ad::affine with the bias restricted to the value block.
namespace vrfb::ad {

enum class Channel { Value = 0, Dx = 1, Dy = 2, Dxx = 3, Dyy = 4 };

struct TaylorLayout {
  Eigen::Index n = 0;
  int blocks = 5;

  Eigen::Index rows() const { return n * blocks; }
  Eigen::Index offset(Channel c) const { return n * static_cast<int>(c); }
  bool has(Channel c) const { return static_cast<int>(c) < blocks; }
};

enum class Activation { Swish, Sine };

/// f applied to a Taylor-stacked matrix, propagating derivatives exactly.
Var taylor_activate(Var z, TaylorLayout layout, Activation f);

/// Elementwise product of two Taylor-stacked matrices (Leibniz rule).
Var taylor_mul(Var a, Var b, TaylorLayout layout);

/// Row-wise s_i * a + t_i on the value block, s_i * a on derivative blocks.
Var taylor_row_affine(Var a, TaylorLayout layout, const Eigen::VectorXd& s,
                      const Eigen::VectorXd& t);

}  // namespace vrfb::ad
