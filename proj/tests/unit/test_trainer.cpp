#include <cmath>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "generators.hpp"
#include "vrfb/error.hpp"
#include "vrfb/io/csv.hpp"
#include "vrfb/train/optimizers.hpp"
#include "vrfb/train/trainer.hpp"

using namespace vrfb;
using train::Adam;
using train::LbfgsSettings;
using train::LbfgsStop;

namespace {

const model::CellParameters P{};

train::TrainConfig tiny_config() {
  train::TrainConfig c = train::TrainConfig::desk();
  c.arch.hidden_layers = 1;
  c.arch.width = 6;
  c.sampling.interior_per_side = 20;
  c.sampling.vertical_boundary = 8;
  c.sampling.horizontal_boundary = 4;
  c.sampling.epinn_soc = 3;
  c.sampling.epinn_y = 5;
  c.adam_iters = 6;
  c.lbfgs_iters = 4;
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("vrfb_test_" + name);
  std::filesystem::remove_all(d);
  return d;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("step-decay learning rate") {
  CHECK(train::step_decay(1e-3, 0.99, 200, 0) == 1e-3);
  CHECK(train::step_decay(1e-3, 0.99, 200, 199) == 1e-3);
  CHECK(train::step_decay(1e-3, 0.99, 200, 400) == doctest::Approx(0.0009801).epsilon(1e-12));
  const auto c = train::TrainConfig::desk();
  CHECK(c.learning_rate(200) == doctest::Approx(0.00099));
}

TEST_CASE("first Adam step by hand") {
  Adam adam(1, {});
  Eigen::VectorXd theta = Eigen::VectorXd::Constant(1, 1.0);
  adam.step(theta, Eigen::VectorXd::Constant(1, 2.0), 0.01);
  // bias-corrected moments are m = 2, v = 4
  CHECK(theta[0] == doctest::Approx(1.0 - 0.01 * 2.0 / (2.0 + 1e-8)).epsilon(1e-15));
  CHECK(adam.steps_taken() == 1);
}

TEST_CASE("Adam with a zero gradient leaves the parameters unchanged") {
  Adam adam(3, {});
  Eigen::VectorXd theta(3);
  theta << 1, -2, 3;
  const Eigen::VectorXd before = theta;
  adam.step(theta, Eigen::VectorXd::Zero(3), 0.1);
  CHECK(theta == before);
}

TEST_CASE("Adam descends a quadratic") {
  Adam adam(2, {});
  Eigen::VectorXd theta(2);
  theta << 1.5, -0.5;
  for (int k = 0; k < 2000; ++k) adam.step(theta, 2.0 * theta, 0.01);
  CHECK(theta.norm() < 1e-2);
}

TEST_CASE("SA weight ascent step: w = 1, r^2 = 0.5, rho = 0.1 gives 1.1 for one point") {
  const Eigen::VectorXd r2 = Eigen::VectorXd::Constant(1, 0.5);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(1, 1.0);
  w += 0.1 * train::sa_weight_gradient(r2, w);
  CHECK(w[0] == doctest::Approx(1.1));
  // mean reduction: the gradient of each weight carries 1/N
  const Eigen::VectorXd g = train::sa_weight_gradient(Eigen::Vector4d(1, 1, 1, 1), Eigen::Vector4d(1, 1, 1, 1));
  CHECK(g[0] == doctest::Approx(0.5));
}

TEST_CASE("L-BFGS solves a 10-D quadratic to a 1e-9 gradient") {
  testing::Gen g(51);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(10, 10);
  for (int i = 0; i < 10; ++i) A(i, i) = g.log_uniform(0.5, 20.0);
  const Eigen::VectorXd b = g.vector(10, -1, 1);
  const train::Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad = A * x - b;
    return 0.5 * x.dot(A * x) - b.dot(x);
  };
  LbfgsSettings s;
  s.max_iterations = 25;
  const auto r = train::lbfgs(f, Eigen::VectorXd::Zero(10), s);
  CHECK(r.gradient_norm < 1e-9);
  CHECK(r.stop == LbfgsStop::GradientTolerance);
  CHECK_FALSE(r.flagged());
  CHECK((r.x - A.diagonal().cwiseInverse().cwiseProduct(b)).norm() < 1e-9);
}

TEST_CASE("L-BFGS minimizes Rosenbrock") {
  const train::Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    grad.resize(2);
    grad << -2 * a - 400 * x[0] * b, 200 * b;
    return a * a + 100 * b * b;
  };
  LbfgsSettings s;
  s.max_iterations = 200;
  s.gradient_tolerance = 1e-8;
  const auto r = train::lbfgs(f, Eigen::Vector2d(-1.2, 1.0), s);
  CHECK((r.x - Eigen::Vector2d(1, 1)).norm() < 1e-6);
}

TEST_CASE("L-BFGS at a stationary point is a no-op") {
  const train::Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad = 2.0 * x;
    return x.squaredNorm();
  };
  int calls = 0;
  const auto r = train::lbfgs(f, Eigen::VectorXd::Zero(4), {},
                              [&](const train::LbfgsIteration&) { ++calls; });
  CHECK(r.x == Eigen::VectorXd::Zero(4));
  CHECK(r.iterations == 0);
  CHECK(calls == 0);
  CHECK(r.stop == LbfgsStop::GradientTolerance);
}

TEST_CASE("L-BFGS flags a line search that cannot make progress") {
  // a descent direction that never decreases the reported value
  const train::Objective f = [](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    grad = Eigen::VectorXd::Constant(x.size(), 1.0);
    return x.squaredNorm() > 0 ? 1.0 : 0.0;
  };
  const auto r = train::lbfgs(f, Eigen::VectorXd::Zero(2), {});
  CHECK(r.flagged());
  CHECK(r.x == Eigen::VectorXd::Zero(2));
}

TEST_CASE("config validation names the field") {
  auto c = train::TrainConfig::desk();
  c.rho = -1;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("train.rho") != std::string::npos);
  }
  c = train::TrainConfig::desk();
  c.lbfgs_history = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("desk defaults") {
  const auto c = train::TrainConfig::desk();
  CHECK(c.arch.hidden_layers == 2);
  CHECK(c.arch.width == 32);
  CHECK(c.adam_iters == 4000);
  CHECK(c.lbfgs_iters == 500);
  CHECK(c.sampling.interior_per_side == 2000);
  CHECK(c.sampling.vertical_boundary == 400);
  CHECK(c.sampling.horizontal_boundary == 100);
}

TEST_CASE("L-BFGS phase leaves the SA weights untouched") {
  const auto cfg = tiny_config();
  auto net = nn::init(nn::CompositeNet(cfg.arch, cfg.stage, P), 3);
  const auto plan = pinn::SamplingPlan::sample(cfg.sampling, P, 4);
  const pinn::LossProblem prob(net, plan, pinn::Variant::Epinn);
  pinn::SAWeights w = pinn::SAWeights::ones(plan, pinn::Variant::Epinn);
  train::TrainHistory hist;
  train::adam_phase(net, prob, w, cfg, hist);
  CHECK_FALSE(w == pinn::SAWeights::ones(plan, pinn::Variant::Epinn));
  const pinn::SAWeights frozen = w;
  const double before = prob.evaluate(net, w, false).breakdown.total;
  const auto res = train::lbfgs_phase(net, prob, w, cfg, hist, cfg.adam_iters + 1);
  CHECK(w == frozen);
  CHECK(res.iterations <= cfg.lbfgs_iters);
  CHECK(prob.evaluate(net, w, false).breakdown.total <= before);
}

TEST_CASE("training is bit-reproducible and writes its artifacts") {
  const auto cfg = tiny_config();
  const auto d1 = scratch_dir("train_a"), d2 = scratch_dir("train_b");
  const auto a = train::train(cfg, P, {}, d1);
  const auto b = train::train(cfg, P, {}, d2);
  CHECK(a.net.flat_parameters() == b.net.flat_parameters());
  CHECK(a.weights == b.weights);
  CHECK(a.history.size() == static_cast<std::size_t>(cfg.adam_iters + a.lbfgs.iterations));
  for (const char* f : {"config.json", "seeds.json", "checkpoint_adam.vrfb", "model.vrfb",
                        "history.csv", "timing.csv"}) {
    INFO(f);
    REQUIRE(std::filesystem::exists(d1 / f));
    if (std::string(f) != "timing.csv") CHECK(slurp(d1 / f) == slurp(d2 / f));
  }
  const io::CsvTable h = io::read_csv(d1 / "history.csv");
  CHECK(h.header.front() == "iteration");
  CHECK(h.header.size() == 3 + 30 + 3);
  CHECK(h.rows.size() == a.history.size());
  std::filesystem::remove_all(d1);
  std::filesystem::remove_all(d2);
}

TEST_CASE("a different seed gives a different network") {
  auto cfg = tiny_config();
  cfg.lbfgs_iters = 0;
  const auto a = train::train(cfg, P);
  cfg.init_seed = 99;
  const auto b = train::train(cfg, P);
  CHECK(a.net.flat_parameters() != b.net.flat_parameters());
}

TEST_CASE("the data variant without labels is a configuration error") {
  auto cfg = tiny_config();
  cfg.variant = pinn::Variant::EpinnData;
  CHECK_THROWS_AS(train::train(cfg, P), ConfigError);
}
