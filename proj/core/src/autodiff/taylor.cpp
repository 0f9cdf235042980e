#include "vrfb/autodiff/taylor.hpp"

#include <cmath>
#include <memory>

#include "vrfb/error.hpp"

namespace vrfb::ad {

namespace {

using Array = Eigen::ArrayXXd;

void check_layout(Var a, TaylorLayout layout, const char* op) {
  if (layout.blocks != 3 && layout.blocks != 5) {
    throw DomainError(std::string(op) + ": Taylor layout needs 3 or 5 blocks");
  }
  if (a.rows() != layout.rows()) {
    throw DomainError(std::string(op) + ": " + std::to_string(a.rows()) + " rows, layout needs " +
                      std::to_string(layout.rows()));
  }
}

// f and its first three derivatives at the value block.
struct Derivs {
  Array f0, f1, f2, f3;
};

Derivs evaluate(const Array& z, Activation act) {
  Derivs d;
  if (act == Activation::Swish) {
    const Array s = 1.0 / (1.0 + (-z).exp());
    const Array g = s * (1.0 - s);
    const Array one_m_2s = 1.0 - 2.0 * s;
    d.f0 = z * s;
    d.f1 = s + z * g;
    d.f2 = 2.0 * g + z * g * one_m_2s;
    d.f3 = g * (3.0 * one_m_2s + z * (1.0 - 6.0 * s + 6.0 * s.square()));
  } else {
    const Array sn = z.sin();
    const Array cs = z.cos();
    d.f0 = sn;
    d.f1 = cs;
    d.f2 = -sn;
    d.f3 = -cs;
  }
  return d;
}

}  // namespace

Var taylor_activate(Var z, TaylorLayout layout, Activation act) {
  check_layout(z, layout, "taylor_activate");
  Tape& t = *z.tape();
  const int iz = z.id();
  const Eigen::Index n = layout.n;
  const bool second = layout.blocks == 5;
  auto cache = std::make_shared<Derivs>();

  auto forward = [=](const Tape& tp) -> Matrix {
    const Matrix& zm = tp.value(iz);
    *cache = evaluate(zm.topRows(n).array(), act);
    const Derivs& d = *cache;
    Matrix out(zm.rows(), zm.cols());
    out.topRows(n) = d.f0.matrix();
    for (int k = 1; k <= 2; ++k) {
      out.middleRows(k * n, n) = (d.f1 * zm.middleRows(k * n, n).array()).matrix();
    }
    if (second) {
      for (int k = 1; k <= 2; ++k) {
        const auto zk = zm.middleRows(k * n, n).array();
        const auto zkk = zm.middleRows((k + 2) * n, n).array();
        out.middleRows((k + 2) * n, n) = (d.f2 * zk.square() + d.f1 * zkk).matrix();
      }
    }
    return out;
  };

  auto backward = [=](Tape& tp, const Matrix& g) {
    const Matrix& zm = tp.value(iz);
    const Derivs& d = *cache;
    Matrix dz(zm.rows(), zm.cols());
    Array d0 = g.topRows(n).array() * d.f1;
    for (int k = 1; k <= 2; ++k) {
      const auto gk = g.middleRows(k * n, n).array();
      const auto zk = zm.middleRows(k * n, n).array();
      d0 += gk * zk * d.f2;
      if (second) {
        const auto gkk = g.middleRows((k + 2) * n, n).array();
        const auto zkk = zm.middleRows((k + 2) * n, n).array();
        d0 += gkk * (d.f3 * zk.square() + d.f2 * zkk);
        dz.middleRows(k * n, n) = (gk * d.f1 + 2.0 * gkk * d.f2 * zk).matrix();
        dz.middleRows((k + 2) * n, n) = (gkk * d.f1).matrix();
      } else {
        dz.middleRows(k * n, n) = (gk * d.f1).matrix();
      }
    }
    dz.topRows(n) = d0.matrix();
    tp.accumulate(iz, dz);
  };

  return t.record(std::move(forward), std::move(backward),
                  act == Activation::Swish ? "swish" : "sine");
}

Var taylor_mul(Var a, Var b, TaylorLayout layout) {
  check_layout(a, layout, "taylor_mul");
  check_layout(b, layout, "taylor_mul");
  if (a.cols() != b.cols() || a.tape() != b.tape()) {
    throw DomainError("taylor_mul: operand mismatch");
  }
  Tape& t = *a.tape();
  const int ia = a.id(), ib = b.id();
  const Eigen::Index n = layout.n;
  const bool second = layout.blocks == 5;

  auto forward = [=](const Tape& tp) -> Matrix {
    const Matrix& am = tp.value(ia);
    const Matrix& bm = tp.value(ib);
    Matrix out(am.rows(), am.cols());
    const auto a0 = am.topRows(n).array();
    const auto b0 = bm.topRows(n).array();
    out.topRows(n) = (a0 * b0).matrix();
    for (int k = 1; k <= 2; ++k) {
      const auto ak = am.middleRows(k * n, n).array();
      const auto bk = bm.middleRows(k * n, n).array();
      out.middleRows(k * n, n) = (ak * b0 + a0 * bk).matrix();
      if (second) {
        const auto akk = am.middleRows((k + 2) * n, n).array();
        const auto bkk = bm.middleRows((k + 2) * n, n).array();
        out.middleRows((k + 2) * n, n) = (akk * b0 + 2.0 * ak * bk + a0 * bkk).matrix();
      }
    }
    return out;
  };

  // d/da of the product blocks; the same expression serves b with roles swapped.
  auto partial = [=](const Matrix& g, const Matrix& other) -> Matrix {
    Matrix d(g.rows(), g.cols());
    const auto o0 = other.topRows(n).array();
    Array d0 = g.topRows(n).array() * o0;
    for (int k = 1; k <= 2; ++k) {
      const auto gk = g.middleRows(k * n, n).array();
      const auto ok = other.middleRows(k * n, n).array();
      d0 += gk * ok;
      if (second) {
        const auto gkk = g.middleRows((k + 2) * n, n).array();
        const auto okk = other.middleRows((k + 2) * n, n).array();
        d0 += gkk * okk;
        d.middleRows(k * n, n) = (gk * o0 + 2.0 * gkk * ok).matrix();
        d.middleRows((k + 2) * n, n) = (gkk * o0).matrix();
      } else {
        d.middleRows(k * n, n) = (gk * o0).matrix();
      }
    }
    d.topRows(n) = d0.matrix();
    return d;
  };

  auto backward = [=](Tape& tp, const Matrix& g) {
    tp.accumulate(ia, partial(g, tp.value(ib)));
    tp.accumulate(ib, partial(g, tp.value(ia)));
  };

  return t.record(std::move(forward), std::move(backward), "taylor_mul");
}

Var taylor_row_affine(Var a, TaylorLayout layout, const Eigen::VectorXd& s,
                      const Eigen::VectorXd& sh) {
  check_layout(a, layout, "taylor_row_affine");
  if (s.size() != layout.n || sh.size() != layout.n) {
    throw DomainError("taylor_row_affine: coefficient length mismatch");
  }
  Tape& t = *a.tape();
  const int ia = a.id();
  const Eigen::Index n = layout.n;
  const int blocks = layout.blocks;

  auto forward = [=](const Tape& tp) -> Matrix {
    const Matrix& am = tp.value(ia);
    Matrix out(am.rows(), am.cols());
    for (int k = 0; k < blocks; ++k) out.middleRows(k * n, n) = s.asDiagonal() * am.middleRows(k * n, n);
    out.topRows(n).colwise() += sh;
    return out;
  };
  auto backward = [=](Tape& tp, const Matrix& g) {
    Matrix d(g.rows(), g.cols());
    for (int k = 0; k < blocks; ++k) d.middleRows(k * n, n) = s.asDiagonal() * g.middleRows(k * n, n);
    tp.accumulate(ia, d);
  };
  return t.record(std::move(forward), std::move(backward), "row_affine");
}

}  // namespace vrfb::ad
