#include "vrfb/autodiff/tape.hpp"

#include <sstream>

#include "vrfb/error.hpp"

namespace vrfb::ad {

double Var::scalar() const {
  const Matrix& v = value();
  if (v.rows() != 1 || v.cols() != 1) {
    throw DomainError("scalar() on a " + std::to_string(v.rows()) + "x" +
                      std::to_string(v.cols()) + " node");
  }
  return v(0, 0);
}

Var Tape::constant(Matrix value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::parameter(Matrix value, Eigen::Index gradient_offset) {
  if (gradient_offset < 0) throw DomainError("negative parameter offset");
  Node n;
  n.value = std::move(value);
  n.gradient_offset = gradient_offset;
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Tape::record(Forward forward, Backward backward, std::string label) {
  Node n;
  n.value = forward(*this);
  n.forward = std::move(forward);
  n.backward = std::move(backward);
  n.label = std::move(label);
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Matrix& Tape::adjoint_slot(int id) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.adjoint.size() == 0) n.adjoint = Matrix::Zero(n.value.rows(), n.value.cols());
  return n.adjoint;
}

void Tape::accumulate(int id, const Matrix& delta) {
  Node& n = nodes_[static_cast<std::size_t>(id)];
  if (n.adjoint.size() == 0) {
    n.adjoint = delta;
  } else {
    n.adjoint += delta;
  }
}

void Tape::accumulate_block(int id, Eigen::Index row0, Eigen::Index col0, const Matrix& delta) {
  adjoint_slot(id).block(row0, col0, delta.rows(), delta.cols()) += delta;
}

Eigen::VectorXd Tape::gradient(Var loss, Eigen::Index parameter_count) {
  if (loss.tape() != this) throw DomainError("loss recorded on a different tape");
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) throw DomainError("gradient() needs a scalar loss");

  for (Node& n : nodes_) n.adjoint.resize(0, 0);
  nodes_[static_cast<std::size_t>(loss.id())].adjoint = Matrix::Ones(1, 1);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(parameter_count);
  for (int id = loss.id(); id >= 0; --id) {
    Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.adjoint.size() == 0) continue;
    if (n.gradient_offset >= 0) {
      const Eigen::Index sz = n.value.size();
      if (n.gradient_offset + sz > parameter_count) {
        throw DomainError("parameter leaf exceeds gradient length");
      }
      grad.segment(n.gradient_offset, sz) += n.adjoint.reshaped();
    } else if (n.backward) {
      // the closure may grow other adjoints but never this node's
      const Matrix adj = std::move(n.adjoint);
      n.backward(*this, adj);
    }
  }
  return grad;
}

void Tape::replay() {
  for (Node& n : nodes_) {
    if (n.forward) n.value = n.forward(*this);
  }
}

void Tape::require_finite(Var v, const std::string& what) const {
  const Matrix& m = value(v);
  if (m.allFinite()) return;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!m.row(r).allFinite()) {
      std::ostringstream msg;
      msg << "non-finite value in " << what << " at row " << r;
      throw DomainError(msg.str());
    }
  }
}

}  // namespace vrfb::ad
