#include "vrfb/nn/modified_fnn.hpp"

#include <cmath>
#include <sstream>

#include "vrfb/autodiff/ops.hpp"
#include "vrfb/error.hpp"

namespace vrfb::nn {

void Architecture::validate() const {
  if (inputs < 1) throw ConfigError("network.inputs must be >= 1");
  if (hidden_layers < 1) throw ConfigError("network.hidden_layers must be >= 1");
  if (width < 1) throw ConfigError("network.width must be >= 1");
  if (outputs < 1) throw ConfigError("network.outputs must be >= 1");
}

namespace {

std::vector<ParameterBlock> layout_blocks(const Architecture& a) {
  std::vector<ParameterBlock> out;
  Eigen::Index offset = 0;
  auto add = [&](std::string name, Eigen::Index rows, Eigen::Index cols) {
    out.push_back({std::move(name), offset, rows, cols});
    offset += rows * cols;
  };
  add("W_U", a.width, a.inputs);
  add("b_U", a.width, 1);
  add("W_V", a.width, a.inputs);
  add("b_V", a.width, 1);
  for (int l = 1; l <= a.hidden_layers + 1; ++l) {
    const Eigen::Index rows = l == a.hidden_layers + 1 ? a.outputs : a.width;
    const Eigen::Index cols = l == 1 ? a.inputs : a.width;
    add("W_" + std::to_string(l), rows, cols);
    add("b_" + std::to_string(l), rows, 1);
  }
  return out;
}

Eigen::Index total_size(const std::vector<ParameterBlock>& blocks) {
  return blocks.empty() ? 0 : blocks.back().offset + blocks.back().size();
}

Eigen::MatrixXd swish(const Eigen::MatrixXd& z) {
  return (z.array() / (1.0 + (-z.array()).exp())).matrix();
}

Eigen::MatrixXd dense(const Eigen::MatrixXd& x, const Eigen::Map<const Eigen::MatrixXd>& w,
                      const Eigen::Map<const Eigen::MatrixXd>& b) {
  Eigen::MatrixXd y = x * w.transpose();
  y.rowwise() += b.reshaped().transpose();
  return y;
}

}  // namespace

ModifiedFNN::ModifiedFNN(Architecture arch) : arch_(arch) {
  arch_.validate();
  blocks_ = layout_blocks(arch_);
  params_ = Eigen::VectorXd::Zero(total_size(blocks_));
}

ModifiedFNN::ModifiedFNN(Architecture arch, Eigen::VectorXd parameters) : ModifiedFNN(arch) {
  set_parameters(std::move(parameters));
}

void ModifiedFNN::set_parameters(Eigen::VectorXd p) {
  if (p.size() != params_.size()) {
    throw DomainError("network expects " + std::to_string(params_.size()) + " parameters, got " +
                      std::to_string(p.size()));
  }
  params_ = std::move(p);
}

Eigen::Map<const Eigen::MatrixXd> ModifiedFNN::block(std::size_t k) const {
  const ParameterBlock& b = blocks_.at(k);
  return {params_.data() + b.offset, b.rows, b.cols};
}

Eigen::Map<Eigen::MatrixXd> ModifiedFNN::block(std::size_t k) {
  const ParameterBlock& b = blocks_.at(k);
  return {params_.data() + b.offset, b.rows, b.cols};
}

Eigen::MatrixXd forward(const ModifiedFNN& net, const Eigen::MatrixXd& x) {
  const Architecture& a = net.architecture();
  if (x.cols() != a.inputs) {
    throw DomainError("forward: input has " + std::to_string(x.cols()) + " columns, expected " +
                      std::to_string(a.inputs));
  }
  using F = ModifiedFNN;
  const Eigen::MatrixXd u = swish(dense(x, net.block(F::kWU), net.block(F::kBU)));
  const Eigen::MatrixXd v = swish(dense(x, net.block(F::kWV), net.block(F::kBV)));
  Eigen::MatrixXd y = swish(dense(x, net.block(F::weight_index(1)), net.block(F::bias_index(1))));
  for (int l = 2; l <= a.hidden_layers; ++l) {
    const Eigen::MatrixXd z =
        swish(dense(y, net.block(F::weight_index(l)), net.block(F::bias_index(l))));
    y = ((1.0 - z.array()) * u.array() + z.array() * v.array()).matrix();
  }
  const int head = a.hidden_layers + 1;
  return dense(y, net.block(F::weight_index(head)), net.block(F::bias_index(head)));
}

void xavier_init(ModifiedFNN& net, Rng& rng) {
  for (std::size_t k = 0; k < net.blocks().size(); ++k) {
    const ParameterBlock& b = net.blocks()[k];
    auto m = net.block(k);
    if (b.is_bias()) {
      m.setZero();
      continue;
    }
    const double bound = std::sqrt(6.0 / static_cast<double>(b.rows + b.cols));
    for (Eigen::Index j = 0; j < b.cols; ++j) {
      for (Eigen::Index i = 0; i < b.rows; ++i) m(i, j) = rng.uniform(-bound, bound);
    }
  }
}

ModifiedFNN init(ModifiedFNN net, std::uint64_t seed) {
  Rng rng(seed);
  xavier_init(net, rng);
  return net;
}

namespace {

void check_layer(const ad::Var& v, ad::TaylorLayout layout, const std::string& name,
                 const std::string& layer) {
  const ad::Matrix& m = v.value();
  if (m.allFinite()) return;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (!m.row(r).allFinite()) {
      std::ostringstream msg;
      msg << "non-finite activation in " << name << " " << layer << " at sample "
          << r % layout.n;
      throw DomainError(msg.str());
    }
  }
}

}  // namespace

ad::Var record(ad::Tape& tape, const ModifiedFNN& net, Eigen::Index gradient_offset, ad::Var x,
               ad::TaylorLayout layout, const std::string& name) {
  const Architecture& a = net.architecture();
  if (x.cols() != a.inputs) throw DomainError("record: input width mismatch");
  std::vector<ad::Var> p;
  p.reserve(net.blocks().size());
  for (std::size_t k = 0; k < net.blocks().size(); ++k) {
    p.push_back(tape.parameter(net.block(k), gradient_offset + net.blocks()[k].offset));
  }
  const Eigen::Index n = layout.n;
  auto layer = [&](ad::Var in, std::size_t w, std::size_t b) {
    return ad::taylor_activate(ad::affine(in, p[w], p[b], n), layout, ad::Activation::Swish);
  };
  using F = ModifiedFNN;
  const ad::Var u = layer(x, F::kWU, F::kBU);
  const ad::Var v = layer(x, F::kWV, F::kBV);
  check_layer(u, layout, name, "encoder U");
  check_layer(v, layout, name, "encoder V");
  const ad::Var v_minus_u = v - u;
  ad::Var y = layer(x, F::weight_index(1), F::bias_index(1));
  check_layer(y, layout, name, "layer 1");
  for (int l = 2; l <= a.hidden_layers; ++l) {
    const ad::Var z = layer(y, F::weight_index(l), F::bias_index(l));
    y = u + ad::taylor_mul(z, v_minus_u, layout);
    check_layer(y, layout, name, "layer " + std::to_string(l));
  }
  const int head = a.hidden_layers + 1;
  const ad::Var out = ad::affine(y, p[F::weight_index(head)], p[F::bias_index(head)], n);
  check_layer(out, layout, name, "output layer");
  return out;
}

}  // namespace vrfb::nn
