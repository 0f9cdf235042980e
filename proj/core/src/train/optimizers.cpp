#include "vrfb/train/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "vrfb/error.hpp"

namespace vrfb::train {

Adam::Adam(Eigen::Index size, AdamSettings settings)
    : s_(settings), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& theta, const Eigen::VectorXd& g, double lr) {
  if (theta.size() != m_.size() || g.size() != m_.size()) {
    throw DomainError("Adam::step: size mismatch");
  }
  ++t_;
  m_ = s_.beta1 * m_ + (1.0 - s_.beta1) * g;
  v_ = s_.beta2 * v_ + (1.0 - s_.beta2) * g.cwiseProduct(g);
  const double bc1 = 1.0 - std::pow(s_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(s_.beta2, static_cast<double>(t_));
  theta.array() -= lr * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + s_.epsilon);
}

double step_decay(double lr0, double decay, int every, long k) {
  if (every <= 0) throw DomainError("step_decay: period must be positive");
  return lr0 * std::pow(decay, static_cast<double>(k / every));
}

const char* to_string(LbfgsStop s) {
  switch (s) {
    case LbfgsStop::GradientTolerance: return "gradient_tolerance";
    case LbfgsStop::IterationCap: return "iteration_cap";
    case LbfgsStop::LineSearchFailed: return "line_search_failed";
    case LbfgsStop::NoProgress: return "no_progress";
  }
  return "unknown";
}

namespace {

struct Trial {
  double a = 0.0;
  double f = 0.0;
  double d = 0.0;  // directional derivative
  Eigen::VectorXd g;
};

// Minimizer of the cubic through (a, fa, da), (b, fb, db), kept inside the
// middle 80% of [a, b]; bisection when the cubic has no usable minimum.
double cubic_step(const Trial& lo, const Trial& hi) {
  const double a = lo.a, b = hi.a;
  const double left = std::min(a, b), right = std::max(a, b), width = right - left;
  const double d1 = lo.d + hi.d - 3.0 * (lo.f - hi.f) / (a - b);
  const double disc = d1 * d1 - lo.d * hi.d;
  double t = 0.5 * (a + b);
  if (disc >= 0.0) {
    const double d2 = std::copysign(std::sqrt(disc), b - a);
    const double denom = hi.d - lo.d + 2.0 * d2;
    if (denom != 0.0) {
      const double c = b - (b - a) * (hi.d + d2 - d1) / denom;
      if (std::isfinite(c)) t = c;
    }
  }
  return std::clamp(t, left + 0.1 * width, right - 0.1 * width);
}

struct LineSearch {
  const Objective& f;
  const Eigen::VectorXd& x;
  const Eigen::VectorXd& dir;
  double f0, d0;
  const LbfgsSettings& s;
  int evaluations = 0;

  Trial eval(double a) {
    Trial t;
    t.a = a;
    t.g.resize(x.size());
    t.f = f(x + a * dir, t.g);
    t.d = t.g.dot(dir);
    ++evaluations;
    return t;
  }
  bool armijo(const Trial& t) const { return t.f <= f0 + s.c1 * t.a * d0; }
  bool curvature(const Trial& t) const { return std::abs(t.d) <= -s.c2 * d0; }
  // Approximate Wolfe (Hager-Zhang): near a minimizer the sufficient decrease
  // is below the rounding of f, so accept a flat value with a good slope.
  bool approx_wolfe(const Trial& t) const {
    return std::isfinite(t.f) && t.f <= f0 + kApproxValueTol * std::abs(f0) && curvature(t) &&
           t.d <= (2.0 * s.c1 - 1.0) * d0;
  }
  static constexpr double kApproxValueTol = 1e-12;

  std::optional<Trial> zoom(Trial lo, Trial hi) {
    while (evaluations < s.max_line_search_evaluations) {
      if (std::abs(hi.a - lo.a) * dir.lpNorm<Eigen::Infinity>() <
          1e-16 * std::max(1.0, x.lpNorm<Eigen::Infinity>())) {
        return std::nullopt;
      }
      Trial t = eval(cubic_step(lo, hi));
      if (!armijo(t) && approx_wolfe(t)) return t;
      if (!std::isfinite(t.f) || !armijo(t) || t.f >= lo.f) {
        hi = std::move(t);
        continue;
      }
      if (curvature(t)) return t;
      if (t.d * (hi.a - lo.a) >= 0.0) hi = lo;
      lo = std::move(t);
    }
    return std::nullopt;
  }

  std::optional<Trial> run(double a1) {
    Trial prev{0.0, f0, d0, {}};
    double a = a1;
    for (int i = 0; evaluations < s.max_line_search_evaluations; ++i) {
      Trial t = eval(a);
      if (!armijo(t) && approx_wolfe(t)) return t;
      if (!std::isfinite(t.f) || !armijo(t) || (i > 0 && t.f >= prev.f)) {
        return zoom(std::move(prev), std::move(t));
      }
      if (curvature(t)) return t;
      if (t.d >= 0.0) return zoom(std::move(t), std::move(prev));
      prev = std::move(t);
      a *= 2.0;
    }
    return std::nullopt;
  }
};

}  // namespace

LbfgsResult lbfgs(const Objective& f, Eigen::VectorXd x, const LbfgsSettings& s,
                  const std::function<void(const LbfgsIteration&)>& on_iteration) {
  if (s.max_iterations < 0 || s.history < 1) throw DomainError("lbfgs: invalid settings");
  LbfgsResult r;
  Eigen::VectorXd g(x.size());
  double fx = f(x, g);
  r.evaluations = 1;
  if (!std::isfinite(fx) || !g.allFinite()) throw TrainingError("lbfgs: non-finite start");

  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  auto finish = [&](LbfgsStop stop) {
    r.x = std::move(x);
    r.value = fx;
    r.gradient_norm = g.norm();
    r.stop = stop;
    return r;
  };

  for (r.iterations = 0;; ++r.iterations) {
    if (g.norm() < s.gradient_tolerance) return finish(LbfgsStop::GradientTolerance);
    if (r.iterations >= s.max_iterations) return finish(LbfgsStop::IterationCap);

    // two-loop recursion
    Eigen::VectorXd q = -g;
    std::vector<double> alpha(S.size());
    for (std::size_t k = S.size(); k-- > 0;) {
      alpha[k] = rho[k] * S[k].dot(q);
      q -= alpha[k] * Y[k];
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * Y[k].dot(q);
      q += (alpha[k] - beta) * S[k];
    }
    double d0 = g.dot(q);
    if (!(d0 < 0.0)) {  // lost descent: restart from steepest descent
      S.clear();
      Y.clear();
      rho.clear();
      q = -g;
      d0 = -g.squaredNorm();
    }
    const double a1 = S.empty() ? std::min(1.0, 1.0 / g.lpNorm<Eigen::Infinity>()) : 1.0;

    LineSearch ls{f, x, q, fx, d0, s};
    std::optional<Trial> t = ls.run(a1);
    r.evaluations += ls.evaluations;
    if (!t) return finish(LbfgsStop::LineSearchFailed);
    if (t->f == fx && t->a * q.norm() <= 1e-16 * std::max(1.0, x.norm())) {
      return finish(LbfgsStop::NoProgress);
    }

    Eigen::VectorXd step = t->a * q;
    Eigen::VectorXd dy = t->g - g;
    x += step;
    fx = t->f;
    g = std::move(t->g);
    const double sy = step.dot(dy);
    if (sy > 1e-12 * step.norm() * dy.norm()) {
      if (static_cast<int>(S.size()) == s.history) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
      S.push_back(std::move(step));
      Y.push_back(std::move(dy));
      rho.push_back(1.0 / sy);
    }
    if (on_iteration) on_iteration({r.iterations + 1, fx, g.norm(), t->a, ls.evaluations});
  }
}

}  // namespace vrfb::train
