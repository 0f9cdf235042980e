#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace vrfb::ad {

using Matrix = Eigen::MatrixXd;

class Tape;

/// Handle to a node on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  Tape* tape() const { return tape_; }
  int id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }
  const Matrix& value() const;
  /// Value of a 1x1 node.
  double scalar() const;
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }

 private:
  friend class Tape;
  Var(Tape* tape, int id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  int id_ = -1;
};

/// Reverse-mode tape over dense matrices.
///
/// Nodes are stored in creation order, which is a topological order; the
/// reverse sweep visits them back to front, so adjoint accumulation order is
/// fixed by the recording.
class Tape {
 public:
  using Forward = std::function<Matrix(const Tape&)>;
  /// Receives the node's adjoint and accumulates into its inputs.
  using Backward = std::function<void(Tape&, const Matrix& adjoint)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;
  Tape(Tape&&) = default;
  Tape& operator=(Tape&&) = default;

  Var constant(Matrix value);
  /// Leaf whose adjoint lands in gradient[offset, offset + size) in
  /// column-major order.
  Var parameter(Matrix value, Eigen::Index gradient_offset);

  /// Records an op: `forward` computes the value from input values (it is run
  /// once now and again by replay()); `backward` may be empty for ops that do
  /// not propagate.
  Var record(Forward forward, Backward backward, std::string label = {});

  const Matrix& value(int id) const { return nodes_[static_cast<std::size_t>(id)].value; }
  const Matrix& value(Var v) const { return value(v.id()); }
  const std::string& label(int id) const { return nodes_[static_cast<std::size_t>(id)].label; }
  std::size_t size() const { return nodes_.size(); }

  /// Adds `delta` into the adjoint of node `id`.
  void accumulate(int id, const Matrix& delta);
  /// Adds `delta` into the adjoint block of node `id` starting at (row0, col0).
  void accumulate_block(int id, Eigen::Index row0, Eigen::Index col0, const Matrix& delta);

  /// Reverse sweep from the 1x1 node `loss`. The result has one entry per
  /// parameter slot; parameters with no path to `loss` receive exact zeros.
  Eigen::VectorXd gradient(Var loss, Eigen::Index parameter_count);

  /// Recomputes every non-leaf value from the stored leaves.
  void replay();

  /// Throws DomainError naming `what` and the first offending row.
  void require_finite(Var v, const std::string& what) const;

 private:
  struct Node {
    Matrix value;
    Matrix adjoint;  // empty until something accumulates into it
    Forward forward;
    Backward backward;
    Eigen::Index gradient_offset = -1;  // >= 0 for parameter leaves
    std::string label;
  };

  Matrix& adjoint_slot(int id);

  std::vector<Node> nodes_;
};

inline const Matrix& Var::value() const { return tape_->value(id_); }

}  // namespace vrfb::ad
