#include "vrfb/train/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "../io/json_codec.hpp"
#include "vrfb/error.hpp"
#include "vrfb/io/container.hpp"
#include "vrfb/io/csv.hpp"

namespace vrfb::train {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

HistoryRow make_row(Phase phase, long iteration, const pinn::LossBreakdown& b, double lr,
                    double wall) {
  return {phase, iteration, b.total, b.per_operator, b.epinn, b.data, lr, wall};
}

}  // namespace

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.adam_iters = 4000;
  c.lbfgs_iters = 500;
  c.arch.hidden_layers = 2;
  c.arch.width = 32;
  c.sampling = pinn::SamplingConfig::desk_scale();
  c.desk_scale = true;
  return c;
}

void TrainConfig::validate() const {
  if (adam_iters < 0) throw ConfigError("train.adam_iters must be >= 0");
  if (lbfgs_iters < 0) throw ConfigError("train.lbfgs_iters must be >= 0");
  if (!(lr0 > 0.0)) throw ConfigError("train.lr0 must be > 0");
  if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("train.lr_decay must be in (0, 1]");
  if (lr_decay_every < 1) throw ConfigError("train.lr_decay_every must be >= 1");
  if (!(rho > 0.0)) throw ConfigError("train.rho must be > 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0)) throw ConfigError("train.adam.beta1 must be in [0, 1)");
  if (!(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) throw ConfigError("train.adam.beta2 must be in [0, 1)");
  if (!(adam.epsilon > 0.0)) throw ConfigError("train.adam.epsilon must be > 0");
  if (lbfgs_history < 1) throw ConfigError("train.lbfgs_history must be >= 1");
  if (!(gradient_tolerance >= 0.0)) throw ConfigError("train.gradient_tolerance must be >= 0");
  try {
    arch.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("train.arch: ") + e.what());
  }
  sampling.validate();
}

const char* to_string(Phase p) { return p == Phase::Adam ? "adam" : "lbfgs"; }

void TrainHistory::write_csv(const std::filesystem::path& path) const {
  io::CsvTable t;
  t.header = {"iteration", "phase", "total"};
  for (auto e : model::all_equations()) t.header.emplace_back(model::name_of(e));
  for (const char* h : {"epinn", "data", "learning_rate"}) t.header.emplace_back(h);
  for (const auto& r : rows) {
    std::vector<std::string> cells{std::to_string(r.iteration), to_string(r.phase),
                                   io::format_double(r.total)};
    for (double v : r.per_operator) cells.push_back(io::format_double(v));
    for (double v : {r.epinn, r.data, r.learning_rate}) {
      cells.push_back(io::format_double(v));
    }
    t.add_row(std::move(cells));
  }
  io::write_csv(path, t);
}

void TrainHistory::write_timing_csv(const std::filesystem::path& path) const {
  io::CsvTable t;
  t.header = {"iteration", "wall_seconds"};
  for (const auto& r : rows) t.add_row({std::to_string(r.iteration), io::format_double(r.wall_seconds)});
  io::write_csv(path, t);
}

Eigen::VectorXd sa_weight_gradient(const Eigen::VectorXd& r2, const Eigen::VectorXd& w) {
  if (r2.size() != w.size()) throw DomainError("sa_weight_gradient: length mismatch");
  if (w.size() == 0) return {};
  return (2.0 / static_cast<double>(w.size())) * w.cwiseProduct(r2);
}

PhaseResult adam_phase(nn::CompositeNet& net, const pinn::LossProblem& problem,
                       pinn::SAWeights& weights, const TrainConfig& config,
                       TrainHistory& history, long first_iteration, double clock_offset) {
  config.validate();
  const auto t0 = Clock::now();
  Eigen::VectorXd theta = net.flat_parameters();
  Adam opt(theta.size(), config.adam);
  PhaseResult out;
  for (long k = 0; k < config.adam_iters; ++k) {
    pinn::LossProblem::Evaluation ev;
    try {
      ev = problem.evaluate(net, weights, true);
    } catch (const AssemblyError& e) {
      throw TrainingError("non-finite loss at Adam iteration " + std::to_string(k + 1) + ": " +
                          e.what());
    }
    if (!std::isfinite(ev.breakdown.total) || !ev.gradient.allFinite()) {
      throw TrainingError("non-finite loss at Adam iteration " + std::to_string(k + 1));
    }
    const double lr = config.learning_rate(k);
    history.rows.push_back(make_row(Phase::Adam, first_iteration + k, ev.breakdown, lr,
                                    clock_offset + seconds_since(t0)));

    // both updates use the gradients at the same point
    pinn::SAWeights next_w = weights;
    for (std::size_t g = 0; g < next_w.groups.size(); ++g) {
      if (next_w.groups[g].size() == 0) continue;
      next_w.groups[g] += config.rho * sa_weight_gradient(ev.residual_sq[g], next_w.groups[g]);
    }
    Eigen::VectorXd next_theta = theta;
    opt.step(next_theta, ev.gradient, lr);
    if (!next_theta.allFinite() || !next_w.all_finite()) {
      throw TrainingError("non-finite update at Adam iteration " + std::to_string(k + 1));
    }
    theta = std::move(next_theta);
    weights = std::move(next_w);
    net.set_flat_parameters(theta);
    ++out.iterations;
  }
  return out;
}

PhaseResult lbfgs_phase(nn::CompositeNet& net, const pinn::LossProblem& problem,
                        const pinn::SAWeights& weights, const TrainConfig& config,
                        TrainHistory& history, long first_iteration, double clock_offset) {
  config.validate();
  const auto t0 = Clock::now();
  nn::CompositeNet work = net;
  pinn::LossBreakdown last;
  // the accepted iterate is always the most recent evaluation, so `last`
  // holds its breakdown when the iteration callback fires
  const Objective f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    work.set_flat_parameters(x);
    try {
      auto ev = problem.evaluate(work, weights, true);
      if (!std::isfinite(ev.breakdown.total) || !ev.gradient.allFinite()) {
        throw AssemblyError("non-finite");
      }
      g = std::move(ev.gradient);
      last = ev.breakdown;
      return ev.breakdown.total;
    } catch (const AssemblyError&) {
      g.setZero(x.size());
      return std::numeric_limits<double>::infinity();
    }
  };
  LbfgsSettings s;
  s.max_iterations = config.lbfgs_iters;
  s.history = config.lbfgs_history;
  s.gradient_tolerance = config.gradient_tolerance;
  const LbfgsResult r =
      lbfgs(f, net.flat_parameters(), s, [&](const LbfgsIteration& it) {
        history.rows.push_back(make_row(Phase::Lbfgs, first_iteration + it.iteration - 1, last,
                                        it.step, clock_offset + seconds_since(t0)));
      });
  net.set_flat_parameters(r.x);
  return {r.iterations, r.flagged(), r.stop};
}

TrainResult train(const TrainConfig& config, const model::CellParameters& params,
                  const pinn::LabeledSet& labeled,
                  const std::optional<std::filesystem::path>& run_dir) {
  config.validate();
  params.validate();
  const auto t0 = Clock::now();

  nn::CompositeNet net = nn::init(nn::CompositeNet(config.arch, config.stage, params),
                                  config.init_seed);
  pinn::SamplingPlan plan = pinn::SamplingPlan::sample(config.sampling, params, config.sample_seed);
  if (pinn::uses_data(config.variant)) plan.set_labeled(labeled, params);
  const pinn::LossProblem problem(net, plan, config.variant);

  TrainResult out{net, pinn::SAWeights::ones(plan, config.variant), {}, {}, {}};
  auto checkpoint = [&](const char* name, const char* phase) {
    if (!run_dir) return;
    io::ModelContainer c{out.net, config.variant, out.weights,
                         {{"phase", phase},
                          {"init_seed", std::to_string(config.init_seed)},
                          {"sample_seed", std::to_string(config.sample_seed)}}};
    io::write_container(*run_dir / name, c);
  };
  if (run_dir) {
    std::filesystem::create_directories(*run_dir);
    nlohmann::ordered_json snap;
    snap["params"] = io::codec::to_json(params);
    snap["train"] = io::codec::to_json(config);
    snap["labeled_points"] = labeled.size();
    io::write_atomic(*run_dir / "config.json", snap.dump(2) + "\n");
    nlohmann::ordered_json seeds{{"init_seed", config.init_seed},
                                 {"sample_seed", config.sample_seed}};
    io::write_atomic(*run_dir / "seeds.json", seeds.dump(2) + "\n");
  }

  try {
    out.adam = adam_phase(out.net, problem, out.weights, config, out.history, 1,
                          seconds_since(t0));
    checkpoint("checkpoint_adam.vrfb", "adam");
    out.lbfgs = lbfgs_phase(out.net, problem, out.weights, config, out.history,
                            out.adam.iterations + 1, seconds_since(t0));
  } catch (const TrainingError&) {
    checkpoint("checkpoint_abort.vrfb", "abort");
    if (run_dir) {
      out.history.write_csv(*run_dir / "history.csv");
      out.history.write_timing_csv(*run_dir / "timing.csv");
    }
    throw;
  }
  if (run_dir) {
    checkpoint("model.vrfb", out.lbfgs.flagged ? "final_flagged" : "final");
    out.history.write_csv(*run_dir / "history.csv");
    out.history.write_timing_csv(*run_dir / "timing.csv");
  }
  return out;
}

}  // namespace vrfb::train
