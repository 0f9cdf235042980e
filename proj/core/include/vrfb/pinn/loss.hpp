#pragma once

#include <array>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "vrfb/model/equations.hpp"
#include "vrfb/nn/composite_net.hpp"
#include "vrfb/pinn/sampling.hpp"

namespace vrfb::pinn {

enum class Variant { Pinn, Epinn, EpinnData };

std::string_view to_string(Variant v);
/// Accepts "pinn", "epinn", "epinn-data" (also "epinn+data").
Variant parse_variant(std::string_view s);
constexpr bool uses_epinn(Variant v) { return v != Variant::Pinn; }
constexpr bool uses_data(Variant v) { return v == Variant::EpinnData; }

struct OperatorInfo {
  model::Equation equation;
  PointSet set;
};

/// The 6 PDE and 24 boundary operators in model::Equation order.
const std::array<OperatorInfo, model::kEquationCount>& operator_registry();

// Residual and weight groups: one per operator, then the two EPINN
// constraints (one entry per SOC value) and the labeled data.
inline constexpr std::size_t kOperatorGroups = model::kEquationCount;
inline constexpr std::size_t kEpinnCollectorGroup = kOperatorGroups;
inline constexpr std::size_t kEpinnMembraneGroup = kOperatorGroups + 1;
inline constexpr std::size_t kDataGroup = kOperatorGroups + 2;
inline constexpr std::size_t kGroupCount = kOperatorGroups + 3;

std::string group_name(std::size_t group);

/// Self-adaptive weights, one per residual entry; the loss uses M(w) = w^2.
struct SAWeights {
  std::vector<Eigen::VectorXd> groups;

  /// All ones; groups unused by the variant are empty.
  static SAWeights ones(const SamplingPlan& plan, Variant v);
  Eigen::Index total_size() const;
  bool all_finite() const;
  bool operator==(const SAWeights&) const;
};

struct LossBreakdown {
  std::array<double, model::kEquationCount> per_operator{};
  double epinn = 0.0;
  double data = 0.0;
  double total = 0.0;

  /// Sum of the parts in registry order.
  double parts_sum() const;
};

/// Residual values in group layout.
struct ResidualSet {
  std::vector<Eigen::VectorXd> groups;
};

/// Training objective over a fixed sampling plan. Construction precomputes
/// everything that does not depend on network weights.
class LossProblem {
 public:
  LossProblem(const nn::CompositeNet& net, const SamplingPlan& plan, Variant variant);

  struct Evaluation {
    LossBreakdown breakdown;
    Eigen::VectorXd gradient;                // d total / d theta; empty unless requested
    std::vector<Eigen::VectorXd> residual_sq;  // group layout
  };

  Evaluation evaluate(const nn::CompositeNet& net, const SAWeights& weights,
                      bool with_gradient) const;
  ResidualSet residuals(const nn::CompositeNet& net) const;

  Variant variant() const { return variant_; }
  const SamplingPlan& plan() const { return plan_; }
  /// Residual count of each group for this variant.
  std::vector<Eigen::Index> group_sizes() const;

  struct Prepared;

 private:
  SamplingPlan plan_;
  Variant variant_;
  std::shared_ptr<const Prepared> prep_;
};

/// Scaled PDE residuals (concentration, electrolyte, electrode) of one side
/// at arbitrary interior points.
std::array<Eigen::VectorXd, 3> pde_residuals(const nn::CompositeNet& net, model::Side side,
                                             const Eigen::MatrixXd& points);
/// The 6 PDE residual arrays on the plan's interior sets, registry order.
std::array<Eigen::VectorXd, 6> pde_residuals(const nn::CompositeNet& net, const SamplingPlan& plan);
/// The 24 boundary residual arrays, registry order.
std::array<Eigen::VectorXd, 24> bc_residuals(const nn::CompositeNet& net, const SamplingPlan& plan);
/// (collector, membrane) total-current residuals, one entry per EPINN SOC value.
std::array<Eigen::VectorXd, 2> epinn_residual(const nn::CompositeNet& net, const SamplingPlan& plan);
/// Mean of M(w) (phi_l - target)^2; 0 for an empty set.
double data_loss(const nn::CompositeNet& net, const LabeledSet& labeled,
                 const Eigen::VectorXd& weights);
LossBreakdown total_loss(const nn::CompositeNet& net, const SamplingPlan& plan,
                         const SAWeights& weights, Variant variant);

}  // namespace vrfb::pinn
