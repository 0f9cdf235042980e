#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vrfb/model/cell_parameters.hpp"
#include "vrfb/model/equations.hpp"
#include "vrfb/nn/composite_net.hpp"
#include "vrfb/pinn/loss.hpp"
#include "vrfb/pinn/sampling.hpp"
#include "vrfb/train/optimizers.hpp"

namespace vrfb::train {

struct TrainConfig {
  int adam_iters = 36000;
  int lbfgs_iters = 4000;
  double lr0 = 1e-3;
  double lr_decay = 0.99;
  int lr_decay_every = 200;
  double rho = 0.1;  // SA-weight ascent rate
  AdamSettings adam;
  int lbfgs_history = 50;
  double gradient_tolerance = 1e-9;

  std::uint64_t init_seed = 1;
  std::uint64_t sample_seed = 2;
  pinn::Variant variant = pinn::Variant::Pinn;
  model::Stage stage = model::Stage::Charging;
  nn::Architecture arch;
  pinn::SamplingConfig sampling;
  bool desk_scale = false;

  /// 2x32 nets, reduced sampling, 4000 Adam + 500 L-BFGS iterations.
  static TrainConfig desk();
  /// Throws ConfigError naming the offending field.
  void validate() const;
  double learning_rate(long iteration) const {
    return step_decay(lr0, lr_decay, lr_decay_every, iteration);
  }
};

enum class Phase { Adam, Lbfgs };
const char* to_string(Phase p);

struct HistoryRow {
  Phase phase;
  long iteration;        // global, counted from 1
  double total;
  std::array<double, model::kEquationCount> per_operator;
  double epinn;
  double data;
  double learning_rate;  // Adam rate, or the accepted L-BFGS step length
  double wall_seconds;   // since the start of train
};

struct TrainHistory {
  std::vector<HistoryRow> rows;

  std::size_t size() const { return rows.size(); }
  /// Header: iteration,phase,total,<operator names>,epinn,data,learning_rate.
  /// Wall-clock times go to a separate file so this one is reproducible.
  void write_csv(const std::filesystem::path& path) const;
  /// Header: iteration,wall_seconds.
  void write_timing_csv(const std::filesystem::path& path) const;
};

struct PhaseResult {
  long iterations = 0;
  bool flagged = false;  // L-BFGS line search failed; the best state was kept
  LbfgsStop stop = LbfgsStop::IterationCap;
};

/// Adam on theta with concurrent plain ascent on the SA weights,
/// w <- w + rho * dL/dw. Throws TrainingError on a non-finite loss, leaving
/// net and weights at the last finite state.
PhaseResult adam_phase(nn::CompositeNet& net, const pinn::LossProblem& problem,
                       pinn::SAWeights& weights, const TrainConfig& config,
                       TrainHistory& history, long first_iteration = 1,
                       double clock_offset = 0.0);

/// L-BFGS on theta with the weights frozen.
PhaseResult lbfgs_phase(nn::CompositeNet& net, const pinn::LossProblem& problem,
                        const pinn::SAWeights& weights, const TrainConfig& config,
                        TrainHistory& history, long first_iteration = 1,
                        double clock_offset = 0.0);

/// Exact gradient of the SA-weighted loss in the weights of one group:
/// d/dw_i mean(w^2 r^2) = 2 w_i r_i^2 / N.
Eigen::VectorXd sa_weight_gradient(const Eigen::VectorXd& residual_sq, const Eigen::VectorXd& w);

struct TrainResult {
  nn::CompositeNet net;
  pinn::SAWeights weights;
  TrainHistory history;
  PhaseResult adam;
  PhaseResult lbfgs;
};

/// init -> adam_phase -> lbfgs_phase. With a run directory, writes
/// config.json, seeds.json, checkpoint_adam.vrfb, model.vrfb, history.csv and
/// timing.csv; on abort writes checkpoint_abort.vrfb before rethrowing.
TrainResult train(const TrainConfig& config, const model::CellParameters& params,
                  const pinn::LabeledSet& labeled = {},
                  const std::optional<std::filesystem::path>& run_dir = std::nullopt);

}  // namespace vrfb::train
