#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "vrfb/autodiff/taylor.hpp"
#include "vrfb/util/random.hpp"

namespace vrfb::nn {

/// All hidden layers share one width because the gate blends U and V into
/// every layer.
struct Architecture {
  int inputs = 3;
  int hidden_layers = 6;
  int width = 50;
  int outputs = 3;

  void validate() const;
  bool operator==(const Architecture&) const = default;
};

struct ParameterBlock {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;

  Eigen::Index size() const { return rows * cols; }
  bool is_bias() const { return cols == 1; }
};

/// Gated feedforward network:
///   U = f(W_U x + b_U), V = f(W_V x + b_V), y1 = f(W_1 x + b_1),
///   Z_l = f(W_l y_{l-1} + b_l), y_l = (1 - Z_l) U + Z_l V   (2 <= l <= L),
///   y = W_{L+1} y_L + b_{L+1},
/// with f = swish. Parameters live in one column-major flat vector.
class ModifiedFNN {
 public:
  explicit ModifiedFNN(Architecture arch);
  ModifiedFNN(Architecture arch, Eigen::VectorXd parameters);

  const Architecture& architecture() const { return arch_; }
  const std::vector<ParameterBlock>& blocks() const { return blocks_; }
  Eigen::Index parameter_count() const { return params_.size(); }
  const Eigen::VectorXd& parameters() const { return params_; }
  void set_parameters(Eigen::VectorXd p);

  Eigen::Map<const Eigen::MatrixXd> block(std::size_t k) const;
  Eigen::Map<Eigen::MatrixXd> block(std::size_t k);

  /// Block indices: encoders first, then W_l, b_l for l = 1..L+1.
  static constexpr std::size_t kWU = 0, kBU = 1, kWV = 2, kBV = 3;
  static std::size_t weight_index(int layer) { return 4 + 2 * static_cast<std::size_t>(layer - 1); }
  static std::size_t bias_index(int layer) { return weight_index(layer) + 1; }

 private:
  Architecture arch_;
  std::vector<ParameterBlock> blocks_;
  Eigen::VectorXd params_;
};

/// Raw outputs for rows of normalized inputs (samples x inputs).
Eigen::MatrixXd forward(const ModifiedFNN& net, const Eigen::MatrixXd& x);

/// Xavier-uniform weights (gain 1), zero biases, drawn in block order.
void xavier_init(ModifiedFNN& net, Rng& rng);
ModifiedFNN init(ModifiedFNN net, std::uint64_t seed);

/// Records the network on a tape over a Taylor-stacked input. Parameter
/// adjoints land at `gradient_offset` + block offset. `name` labels
/// non-finite diagnostics.
ad::Var record(ad::Tape& tape, const ModifiedFNN& net, Eigen::Index gradient_offset, ad::Var x,
               ad::TaylorLayout layout, const std::string& name);

}  // namespace vrfb::nn
