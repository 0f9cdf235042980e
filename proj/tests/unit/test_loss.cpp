#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include <doctest.h>

#include "generators.hpp"
#include "loss_oracle.hpp"
#include "vrfb/autodiff/ops.hpp"
#include "vrfb/autodiff/spatial.hpp"
#include "vrfb/error.hpp"
#include "vrfb/model/electrochemistry.hpp"
#include "vrfb/model/equations.hpp"
#include "vrfb/pinn/loss.hpp"

using namespace vrfb;
using model::Equation;
using model::Side;
using model::Stage;
using pinn::PointSet;

namespace {

const model::CellParameters P{};

pinn::SamplingConfig small_sampling(int n) {
  pinn::SamplingConfig c;
  c.interior_per_side = n;
  c.vertical_boundary = n;
  c.horizontal_boundary = n;
  c.epinn_soc = 3;
  c.epinn_y = 11;
  return c;
}

}  // namespace

TEST_CASE("operator registry: 6 PDEs then 24 boundary conditions") {
  const auto& reg = pinn::operator_registry();
  REQUIRE(reg.size() == 30);
  std::set<std::string> names;
  for (std::size_t k = 0; k < reg.size(); ++k) {
    CHECK(model::index_of(reg[k].equation) == static_cast<int>(k));
    const bool interior = reg[k].set == PointSet::InteriorNeg || reg[k].set == PointSet::InteriorPos;
    CHECK(interior == (k < 6));
    names.insert(pinn::group_name(k));
  }
  CHECK(names.size() == 30);
  CHECK(pinn::group_name(pinn::kDataGroup) != pinn::group_name(pinn::kEpinnCollectorGroup));
}

TEST_CASE("variant names round-trip") {
  for (auto v : {pinn::Variant::Pinn, pinn::Variant::Epinn, pinn::Variant::EpinnData}) {
    CHECK(pinn::parse_variant(pinn::to_string(v)) == v);
  }
  CHECK(pinn::parse_variant("epinn+data") == pinn::Variant::EpinnData);
  CHECK_THROWS_AS(pinn::parse_variant("xpinn"), ConfigError);
}

TEST_CASE("batched residuals equal the scalar re-computation on 100 random points") {
  testing::Gen g(41);
  for (Stage st : {Stage::Charging, Stage::Discharging}) {
    const auto net = testing::random_net(g, st, P, 2, 8);
    const auto plan = pinn::SamplingPlan::sample(small_sampling(100), P, g.rng().next());
    const pinn::ResidualSet batched = pinn::LossProblem(net, plan, pinn::Variant::Epinn).residuals(net);
    const double worst =
        testing::worst_residual_mismatch(net, plan, batched);
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("EPINN residual is the trapezoid current integral against the target") {
  testing::Gen g(42);
  const auto net = testing::random_net(g, Stage::Charging, P, 2, 6);
  const auto plan = pinn::SamplingPlan::sample(small_sampling(10), P, 3);
  const auto r = pinn::epinn_residual(net, plan);
  const double i_avg = model::average_current_density(P);
  const Eigen::Index ny = plan.config().epinn_y;
  for (Eigen::Index a = 0; a < plan.epinn_soc().size(); ++a) {
    double jc = 0, jm = 0;
    for (Eigen::Index k = 0; k < ny; ++k) {
      const Eigen::Index row = a * ny + k;
      const auto c = testing::point_state(net, Side::Negative, plan.epinn_collector_points().row(row));
      const auto m = testing::point_state(net, Side::Negative, plan.epinn_membrane_points().row(row));
      jc += plan.epinn_weights()[row] * model::solid_conductivity(P) * c.d.dx(0, 2);
      jm += plan.epinn_weights()[row] * m.sigma_l * m.d.dx(0, 1);
    }
    const double target = i_avg * P.H;
    CHECK(r[0][a] == doctest::Approx((jc - target) / target).epsilon(1e-11));
    CHECK(r[1][a] == doctest::Approx((jm - target) / target).epsilon(1e-11));
  }
}

TEST_CASE("trapezoid weights integrate affine profiles exactly") {
  const auto plan = pinn::SamplingPlan::sample(small_sampling(5), P, 4);
  const Eigen::Index ny = plan.config().epinn_y;
  for (Eigen::Index a = 0; a < plan.epinn_soc().size(); ++a) {
    double s = 0;
    for (Eigen::Index k = 0; k < ny; ++k) {
      const Eigen::Index row = a * ny + k;
      s += plan.epinn_weights()[row] * (2.0 + 3.0 * plan.epinn_collector_points()(row, 1));
    }
    CHECK(s == doctest::Approx(2.0 * P.H + 1.5 * P.H * P.H).epsilon(1e-14));
  }
}

TEST_CASE("all-zero residuals give exactly zero loss") {
  ad::Tape t;
  const ad::Var r = t.constant(Eigen::VectorXd::Zero(50));
  CHECK(ad::mean_weighted_square(r, Eigen::VectorXd::Constant(50, 7.0)).scalar() == 0.0);

  testing::Gen g(43);
  const auto net = testing::random_net(g, Stage::Charging, P, 2, 6);
  pinn::LabeledSet lab;
  lab.points.resize(3, 3);
  lab.points << 0.0, 0.01, 0.3, -P.L, 0.02, 0.5, 0.0, 0.04, 0.7;
  lab.phi_l = net.predict(Side::Negative, lab.points).col(1);
  CHECK(pinn::data_loss(net, lab, Eigen::VectorXd::Constant(3, 2.0)) == 0.0);

  const auto plan = pinn::SamplingPlan::sample(small_sampling(10), P, 5);
  pinn::SAWeights w = pinn::SAWeights::ones(plan, pinn::Variant::Pinn);
  for (auto& grp : w.groups) grp.setZero();
  CHECK(pinn::total_loss(net, plan, w, pinn::Variant::Pinn).total == 0.0);
}

TEST_CASE("data loss examples") {
  testing::Gen g(44);
  const auto net = testing::random_net(g, Stage::Discharging, P, 2, 6);
  pinn::LabeledSet lab;
  lab.points.resize(1, 3);
  lab.points << 0.0, 0.025, 0.4;
  lab.phi_l = net.predict(Side::Negative, lab.points).col(1).array() - 0.1;
  CHECK(pinn::data_loss(net, lab, Eigen::VectorXd::Constant(1, 1.0)) == doctest::Approx(0.01));
  CHECK(pinn::data_loss(net, lab, Eigen::VectorXd::Constant(1, 2.0)) == doctest::Approx(0.04));
  CHECK(pinn::data_loss(net, pinn::LabeledSet{}, Eigen::VectorXd{}) == 0.0);
}

TEST_CASE("loss total is the sum of its parts and the weighted mean of squares") {
  testing::Gen g(45);
  const auto net = testing::random_net(g, Stage::Charging, P, 2, 6);
  auto plan = pinn::SamplingPlan::sample(small_sampling(20), P, 6);
  pinn::LabeledSet lab;
  lab.points.resize(2, 3);
  lab.points << 0.0, 0.01, 0.3, -P.L, 0.03, 0.6;
  lab.phi_l = Eigen::Vector2d(0.4, 0.45);
  plan.set_labeled(lab, P);
  const pinn::LossProblem prob(net, plan, pinn::Variant::EpinnData);
  pinn::SAWeights w = pinn::SAWeights::ones(plan, pinn::Variant::EpinnData);
  for (auto& grp : w.groups) grp = g.vector(grp.size(), 0.5, 2.0);
  const auto ev = prob.evaluate(net, w, false);
  CHECK(ev.breakdown.total == doctest::Approx(ev.breakdown.parts_sum()).epsilon(1e-13));
  const pinn::ResidualSet r = prob.residuals(net);
  double total = 0;
  for (std::size_t k = 0; k < pinn::kGroupCount; ++k) {
    if (r.groups[k].size() == 0) continue;
    total += (w.groups[k].array().square() * r.groups[k].array().square()).mean();
  }
  CHECK(ev.breakdown.total == doctest::Approx(total).epsilon(1e-13));
  CHECK(ev.breakdown.data == doctest::Approx(pinn::data_loss(net, plan.labeled(),
                                                             w.groups[pinn::kDataGroup])).epsilon(1e-13));
}

TEST_CASE("loss gradient matches central differences") {
  testing::Gen g(46);
  const auto net = testing::random_net(g, Stage::Discharging, P, 2, 5);
  const auto plan = pinn::SamplingPlan::sample(small_sampling(15), P, 7);
  const pinn::LossProblem prob(net, plan, pinn::Variant::Epinn);
  const pinn::SAWeights w = pinn::SAWeights::ones(plan, pinn::Variant::Epinn);
  const auto ev = prob.evaluate(net, w, true);
  const Eigen::VectorXd theta = net.flat_parameters();
  for (int k = 0; k < 12; ++k) {
    const auto i = static_cast<Eigen::Index>(g.integer(0, static_cast<int>(theta.size()) - 1));
    auto at = [&](double h) {
      nn::CompositeNet n = net;
      Eigen::VectorXd th = theta;
      th[i] += h;
      n.set_flat_parameters(th);
      return prob.evaluate(n, w, false).breakdown.total;
    };
    const double h = 1e-6;
    const double fd = (at(h) - at(-h)) / (2 * h);
    const double floor = 1e-4 * ev.gradient.lpNorm<Eigen::Infinity>();
    CHECK(std::abs(ev.gradient[i] - fd) / std::max(floor, std::abs(fd)) < 1e-5);
  }
}

TEST_CASE("the data variant needs labeled points and weights must match the layout") {
  testing::Gen g(47);
  const auto net = testing::random_net(g, Stage::Charging, P, 1, 4);
  const auto plan = pinn::SamplingPlan::sample(small_sampling(5), P, 8);
  CHECK_THROWS_AS(pinn::LossProblem(net, plan, pinn::Variant::EpinnData), ConfigError);
  const pinn::LossProblem prob(net, plan, pinn::Variant::Pinn);
  pinn::SAWeights w = pinn::SAWeights::ones(plan, pinn::Variant::Pinn);
  w.groups[3].resize(2);
  CHECK_THROWS_AS(prob.evaluate(net, w, false), DomainError);
}

TEST_CASE("labeled rows off the membrane and collector lines are rejected") {
  pinn::LabeledSet lab;
  lab.points.resize(1, 3);
  lab.points << -P.L / 2, 0.01, 0.5;
  lab.phi_l = Eigen::VectorXd::Constant(1, 0.4);
  CHECK_THROWS_AS(lab.validate(P), DomainError);
}

TEST_CASE("sampling is a pure function of its seed and stays in the box") {
  const auto a = pinn::SamplingPlan::sample(small_sampling(30), P, 11);
  const auto b = pinn::SamplingPlan::sample(small_sampling(30), P, 11);
  for (PointSet s : pinn::kAllPointSets) {
    CHECK(a.points(s) == b.points(s));
    const Eigen::MatrixXd& m = a.points(s);
    CHECK(m.col(1).minCoeff() >= 0.0);
    CHECK(m.col(1).maxCoeff() <= P.H);
    CHECK(m.col(2).minCoeff() >= P.soc_min);
    CHECK(m.col(2).maxCoeff() <= P.soc_max);
  }
  CHECK((a.points(PointSet::Membrane).col(0).array() == 0.0).all());
  CHECK((a.points(PointSet::OutletPos).col(1).array() == P.H).all());
  CHECK((a.points(PointSet::InteriorNeg).col(0).array() < 0.0).all());
}
