#pragma once

#include <functional>

#include <Eigen/Core>

namespace vrfb::train {

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adam with bias correction. Moments live here; the parameters do not.
class Adam {
 public:
  Adam(Eigen::Index size, AdamSettings settings = {});

  /// theta <- theta - lr * m_hat / (sqrt(v_hat) + eps). A zero gradient on a
  /// fresh optimizer leaves theta unchanged.
  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& gradient, double learning_rate);

  long steps_taken() const { return t_; }

 private:
  AdamSettings s_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long t_ = 0;
};

/// lr0 * decay^floor(k / every).
double step_decay(double lr0, double decay, int every, long iteration);

/// Value and gradient at x; the gradient is written into its second argument.
using Objective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsSettings {
  int max_iterations = 4000;
  int history = 50;
  double gradient_tolerance = 1e-9;
  double c1 = 1e-4;  // sufficient decrease
  double c2 = 0.9;   // curvature
  int max_line_search_evaluations = 25;
};

enum class LbfgsStop {
  GradientTolerance,
  IterationCap,
  LineSearchFailed,
  NoProgress,  // step became too small to change the loss
};

const char* to_string(LbfgsStop s);

struct LbfgsIteration {
  int iteration;
  double value;
  double gradient_norm;
  double step;
  int evaluations;
};

struct LbfgsResult {
  Eigen::VectorXd x;  // best point seen; equals the last accepted iterate
  double value = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  LbfgsStop stop = LbfgsStop::IterationCap;
  bool flagged() const { return stop == LbfgsStop::LineSearchFailed; }
};

/// Limited-memory BFGS with a strong-Wolfe line search (bracketing plus
/// zoom with safeguarded cubic interpolation). The callback sees every
/// accepted iterate.
LbfgsResult lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsSettings& settings,
                  const std::function<void(const LbfgsIteration&)>& on_iteration = {});

}  // namespace vrfb::train
