#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "generators.hpp"
#include "vrfb/autodiff/spatial.hpp"
#include "vrfb/error.hpp"
#include "vrfb/nn/composite_net.hpp"
#include "vrfb/nn/modified_fnn.hpp"

using namespace vrfb;
using model::Side;
using model::Stage;
using nn::ModifiedFNN;

namespace {

const model::CellParameters P{};

double swish(double z) { return z / (1.0 + std::exp(-z)); }

// Scalar re-implementation of the gated network, one sample at a time.
std::vector<double> oracle_forward(const ModifiedFNN& net, const std::vector<double>& x) {
  const auto& a = net.architecture();
  auto layer = [&](std::size_t wk, std::size_t bk, const std::vector<double>& in, bool act) {
    const auto w = net.block(wk);
    const auto b = net.block(bk);
    std::vector<double> out(static_cast<std::size_t>(w.rows()));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      double s = b(i, 0);
      for (Eigen::Index j = 0; j < w.cols(); ++j) s += w(i, j) * in[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(i)] = act ? swish(s) : s;
    }
    return out;
  };
  const auto u = layer(ModifiedFNN::kWU, ModifiedFNN::kBU, x, true);
  const auto v = layer(ModifiedFNN::kWV, ModifiedFNN::kBV, x, true);
  auto y = layer(ModifiedFNN::weight_index(1), ModifiedFNN::bias_index(1), x, true);
  for (int l = 2; l <= a.hidden_layers; ++l) {
    const auto z = layer(ModifiedFNN::weight_index(l), ModifiedFNN::bias_index(l), y, true);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = (1 - z[i]) * u[i] + z[i] * v[i];
  }
  const int head = a.hidden_layers + 1;
  return layer(ModifiedFNN::weight_index(head), ModifiedFNN::bias_index(head), y, false);
}

ModifiedFNN random_fnn(testing::Gen& g, int layers, int width) {
  nn::Architecture a;
  a.hidden_layers = layers;
  a.width = width;
  ModifiedFNN net(a);
  net.set_parameters(g.vector(net.parameter_count(), -1.0, 1.0));
  return net;
}

}  // namespace

TEST_CASE("parameter count of the gated layout") {
  nn::Architecture a;
  a.hidden_layers = 2;
  a.width = 32;
  // two encoders, first layer, one gated layer, head
  const Eigen::Index expected = 2 * (32 * 3 + 32) + (32 * 3 + 32) + (32 * 32 + 32) + (3 * 32 + 3);
  CHECK(ModifiedFNN(a).parameter_count() == expected);
}

TEST_CASE("all-zero parameters give zero output") {
  const ModifiedFNN net(nn::Architecture{});
  const Eigen::MatrixXd x = Eigen::MatrixXd::Constant(4, 3, 0.3);
  CHECK(nn::forward(net, x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("one hidden layer reduces to a plain two-layer perceptron") {
  testing::Gen g(31);
  const ModifiedFNN net = random_fnn(g, 1, 5);
  const std::vector<double> x{0.2, -0.7, 0.9};
  const auto w1 = net.block(ModifiedFNN::weight_index(1));
  const auto b1 = net.block(ModifiedFNN::bias_index(1));
  const auto w2 = net.block(ModifiedFNN::weight_index(2));
  const auto b2 = net.block(ModifiedFNN::bias_index(2));
  Eigen::Vector3d expected = b2.reshaped();
  for (int k = 0; k < 5; ++k) {
    double s = b1(k, 0);
    for (int j = 0; j < 3; ++j) s += w1(k, j) * x[static_cast<std::size_t>(j)];
    expected += w2.col(k) * swish(s);
  }
  const Eigen::MatrixXd out = nn::forward(net, Eigen::RowVector3d(x[0], x[1], x[2]));
  CHECK((out.row(0).transpose() - expected).norm() < 1e-14);
}

TEST_CASE("golden forward value") {
  nn::Architecture a;
  a.hidden_layers = 2;
  a.width = 2;
  ModifiedFNN net(a);
  Eigen::VectorXd theta(net.parameter_count());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta[i] = 0.05 * static_cast<double>(i % 7) - 0.1;
  net.set_parameters(theta);
  const std::vector<double> x{0.5, -0.25, 1.0};
  const auto expected = oracle_forward(net, x);
  const Eigen::MatrixXd out = nn::forward(net, Eigen::RowVector3d(0.5, -0.25, 1.0));
  for (int k = 0; k < 3; ++k) CHECK(out(0, k) == doctest::Approx(expected[static_cast<std::size_t>(k)]).epsilon(1e-14));
}

TEST_CASE("property: batched forward matches the scalar oracle") {
  testing::Gen g(32);
  for (int c = 0; c < 50; ++c) {
    const ModifiedFNN net = random_fnn(g, g.integer(1, 4), g.integer(1, 9));
    Eigen::MatrixXd x(4, 3);
    for (auto& v : x.reshaped()) v = g.uniform(-1, 1);
    const Eigen::MatrixXd out = nn::forward(net, x);
    for (Eigen::Index i = 0; i < 4; ++i) {
      const auto e = oracle_forward(net, {x(i, 0), x(i, 1), x(i, 2)});
      for (int k = 0; k < 3; ++k) CHECK(std::abs(out(i, k) - e[static_cast<std::size_t>(k)]) <= 1e-12 * (1 + std::abs(e[static_cast<std::size_t>(k)])));
    }
  }
}

TEST_CASE("normalize_input maps each box onto [-1, 1]") {
  const auto lo = nn::normalize_input(Side::Negative, -P.L, 0.0, P.soc_min, P);
  const auto hi = nn::normalize_input(Side::Negative, 0.0, P.H, P.soc_max, P);
  CHECK(lo.isApprox(Eigen::Vector3d(-1, -1, -1)));
  CHECK(hi.isApprox(Eigen::Vector3d(1, 1, 1)));
  const auto mid = nn::normalize_input(Side::Positive, P.L / 2, P.H / 2, 0.45, P);
  CHECK(mid.norm() < 1e-12);
  CHECK_THROWS_AS(nn::normalize_input(Side::Positive, -P.L / 2, 0.0, 0.5, P), DomainError);
  CHECK_THROWS_AS(nn::normalize_input(Side::Negative, -P.L / 2, 0.0, 0.95, P), DomainError);
}

TEST_CASE("output transform reaches the documented extremes") {
  for (Stage st : {Stage::Charging, Stage::Discharging}) {
    const double ch = model::charge_flag(st);
    for (Side side : {Side::Negative, Side::Positive}) {
      const auto r = nn::default_potential_ranges(side, st);
      const double soc = 0.35;
      const auto plus = nn::transform_outputs(side, Eigen::Vector3d(1, 1, 1), soc, st, r, P);
      const auto minus = nn::transform_outputs(side, Eigen::Vector3d(-1, -1, -1), soc, st, r, P);
      // the concentration spans the inlet value and the fully converted value
      const double inlet = side == Side::Negative ? P.c0 * soc : P.c0 * (1 - soc);
      const double converted = side == Side::Negative ? P.c0 * ch : P.c0 * (1 - ch);
      const double c_lo = std::min(plus.c, minus.c), c_hi = std::max(plus.c, minus.c);
      CHECK(c_lo == doctest::Approx(std::min(inlet, converted)));
      CHECK(c_hi == doctest::Approx(std::max(inlet, converted)));
      CHECK(plus.phi_l == doctest::Approx(r.phi_l.min));
      CHECK(minus.phi_l == doctest::Approx(r.phi_l.max));
      CHECK(plus.phi_s == doctest::Approx(r.phi_s.min));
      CHECK(minus.phi_s == doctest::Approx(r.phi_s.max));
    }
  }
}

TEST_CASE("positive electrode potential range while charging") {
  const auto r = nn::default_potential_ranges(Side::Positive, Stage::Charging);
  CHECK(r.phi_s.min == 1.40);
  CHECK(r.phi_s.max == 2.20);
}

TEST_CASE("property: concentration output stays inside its band for any raw value") {
  testing::Gen g(33);
  for (int c = 0; c < testing::kPropertyCases; ++c) {
    const Stage st = c % 2 ? Stage::Charging : Stage::Discharging;
    const Side side = (c / 2) % 2 ? Side::Positive : Side::Negative;
    const double soc = g.uniform(P.soc_min, P.soc_max);
    const Eigen::Vector3d raw(g.uniform(-50, 50), 0, 0);
    const auto f = nn::transform_outputs(side, raw, soc, st, nn::default_potential_ranges(side, st), P);
    CHECK(f.c >= -1e-9);
    CHECK(f.c <= P.c0 + 1e-9);
  }
}

TEST_CASE("Xavier init: zero biases, bounded weights with the right variance") {
  nn::Architecture a;
  a.hidden_layers = 3;
  a.width = 64;
  const ModifiedFNN net = nn::init(ModifiedFNN(a), 5);
  for (std::size_t k = 0; k < net.blocks().size(); ++k) {
    const auto& b = net.blocks()[k];
    const auto m = net.block(k);
    if (b.is_bias()) {
      CHECK(m.cwiseAbs().maxCoeff() == 0.0);
      continue;
    }
    const double var = 2.0 / static_cast<double>(b.rows + b.cols);
    CHECK(m.cwiseAbs().maxCoeff() <= std::sqrt(3 * var));
    if (b.size() >= 1024) {
      const double sample_var = m.array().square().mean();
      CHECK(std::abs(sample_var / var - 1) < 0.15);
    }
  }
}

TEST_CASE("init is a pure function of the seed") {
  const nn::CompositeNet base(nn::Architecture{}, Stage::Charging, P);
  const auto a = nn::init(base, 9), b = nn::init(base, 9), c = nn::init(base, 10);
  CHECK(a.flat_parameters() == b.flat_parameters());
  CHECK(a.flat_parameters() != c.flat_parameters());
}

TEST_CASE("the recorded network agrees with the direct forward pass") {
  testing::Gen g(34);
  const auto net = testing::random_net(g, Stage::Discharging, P, 3, 7);
  const Eigen::MatrixXd pts = testing::interior_points(g, Side::Positive, 12, P);
  const ad::DiffBundle d = ad::eval_with_spatial_derivatives(net, Side::Positive, pts);
  const Eigen::MatrixXd direct = net.predict(Side::Positive, pts);
  CHECK((d.value - direct).cwiseAbs().maxCoeff() <= 1e-12 * direct.cwiseAbs().maxCoeff());
}

TEST_CASE("invalid architectures are rejected") {
  nn::Architecture a;
  a.width = 0;
  CHECK_THROWS_AS(ModifiedFNN{a}, ConfigError);
  nn::Architecture b;
  b.outputs = 2;
  CHECK_THROWS_AS(nn::CompositeNet(b, Stage::Charging, P), ConfigError);
}
