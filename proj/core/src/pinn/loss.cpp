#include "vrfb/pinn/loss.hpp"

#include <cmath>
#include <sstream>

#include "vrfb/autodiff/ops.hpp"
#include "vrfb/autodiff/spatial.hpp"
#include "vrfb/error.hpp"
#include "vrfb/model/electrochemistry.hpp"

namespace vrfb::pinn {

using ad::Channel;
using ad::Var;
using model::Equation;
using model::Side;

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Pinn: return "pinn";
    case Variant::Epinn: return "epinn";
    case Variant::EpinnData: return "epinn-data";
  }
  throw DomainError("unknown variant");
}

Variant parse_variant(std::string_view s) {
  if (s == "pinn") return Variant::Pinn;
  if (s == "epinn") return Variant::Epinn;
  if (s == "epinn-data" || s == "epinn+data") return Variant::EpinnData;
  throw ConfigError("variant must be pinn, epinn or epinn-data, got '" + std::string(s) + "'");
}

const std::array<OperatorInfo, model::kEquationCount>& operator_registry() {
  static const std::array<OperatorInfo, model::kEquationCount> reg = [] {
    std::array<OperatorInfo, model::kEquationCount> r{};
    for (Equation e : model::all_equations()) {
      PointSet s{};
      switch (e) {
        case Equation::ConcentrationNeg:
        case Equation::ElectrolyteNeg:
        case Equation::ElectrodeNeg: s = PointSet::InteriorNeg; break;
        case Equation::ConcentrationPos:
        case Equation::ElectrolytePos:
        case Equation::ElectrodePos: s = PointSet::InteriorPos; break;
        case Equation::InletC2:
        case Equation::InletPhiNegL:
        case Equation::InletPhiNegS: s = PointSet::InletNeg; break;
        case Equation::InletC4:
        case Equation::InletPhiPosL:
        case Equation::InletPhiPosS: s = PointSet::InletPos; break;
        case Equation::OutletC2:
        case Equation::OutletPhiNegL:
        case Equation::OutletPhiNegS: s = PointSet::OutletNeg; break;
        case Equation::OutletC4:
        case Equation::OutletPhiPosL:
        case Equation::OutletPhiPosS: s = PointSet::OutletPos; break;
        case Equation::CollectorPotentialNeg:
        case Equation::CollectorC2Flux:
        case Equation::CollectorElectrolyteNeg: s = PointSet::CollectorNeg; break;
        case Equation::CollectorCurrentPos:
        case Equation::CollectorC4Flux:
        case Equation::CollectorElectrolytePos: s = PointSet::CollectorPos; break;
        case Equation::MembraneElectrodeNeg:
        case Equation::MembraneElectrodePos:
        case Equation::MembraneCouplingNeg:
        case Equation::MembraneCouplingPos:
        case Equation::MembraneC2Flux:
        case Equation::MembraneC4Flux: s = PointSet::Membrane; break;
      }
      r[static_cast<std::size_t>(model::index_of(e))] = {e, s};
    }
    return r;
  }();
  return reg;
}

std::string group_name(std::size_t g) {
  if (g < kOperatorGroups) return std::string(model::name_of(model::all_equations()[g]));
  if (g == kEpinnCollectorGroup) return "epinn_collector";
  if (g == kEpinnMembraneGroup) return "epinn_membrane";
  if (g == kDataGroup) return "data";
  throw DomainError("unknown residual group " + std::to_string(g));
}

SAWeights SAWeights::ones(const SamplingPlan& plan, Variant v) {
  SAWeights w;
  w.groups.resize(kGroupCount);
  for (const OperatorInfo& op : operator_registry()) {
    w.groups[static_cast<std::size_t>(model::index_of(op.equation))] =
        Eigen::VectorXd::Ones(plan.points(op.set).rows());
  }
  if (uses_epinn(v)) {
    w.groups[kEpinnCollectorGroup] = Eigen::VectorXd::Ones(plan.config().epinn_soc);
    w.groups[kEpinnMembraneGroup] = Eigen::VectorXd::Ones(plan.config().epinn_soc);
  }
  if (uses_data(v)) w.groups[kDataGroup] = Eigen::VectorXd::Ones(plan.labeled().size());
  return w;
}

Eigen::Index SAWeights::total_size() const {
  Eigen::Index n = 0;
  for (const auto& g : groups) n += g.size();
  return n;
}

bool SAWeights::all_finite() const {
  for (const auto& g : groups) {
    if (!g.allFinite()) return false;
  }
  return true;
}

bool SAWeights::operator==(const SAWeights& o) const {
  if (groups.size() != o.groups.size()) return false;
  for (std::size_t k = 0; k < groups.size(); ++k) {
    if (groups[k].size() != o.groups[k].size() || groups[k] != o.groups[k]) return false;
  }
  return true;
}

double LossBreakdown::parts_sum() const {
  double s = 0.0;
  for (double v : per_operator) s += v;
  return s + epinn + data;
}

namespace {

// Inside logarithms concentrations are floored here (mol/m^3).
constexpr double kConcentrationFloor = 1e-9;

struct Segment {
  Eigen::Index row0 = 0;
  Eigen::Index n = 0;
};

// Per-row constants that depend on SOC only.
struct Coeffs {
  Eigen::VectorXd soc, sigma_int, sigma_slope, extra_log, c_in;

  Coeffs slice(Segment s) const {
    return {soc.segment(s.row0, s.n), sigma_int.segment(s.row0, s.n),
            sigma_slope.segment(s.row0, s.n), extra_log.segment(s.row0, s.n),
            c_in.segment(s.row0, s.n)};
  }
};

Coeffs make_coeffs(Side side, const Eigen::MatrixXd& pts, const model::CellParameters& p) {
  const Eigen::Index n = pts.rows();
  Coeffs c{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n),
           Eigen::VectorXd(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const double soc = pts(i, 2);
    const auto sigma = model::electrolyte_conductivity(side, soc, p);
    c.soc[i] = soc;
    c.sigma_int[i] = sigma.intercept;
    c.sigma_slope[i] = sigma.slope;
    c.c_in[i] = model::inlet_concentration(side, soc, p);
    if (side == Side::Positive) {
      const auto bg = model::background_composition(side, soc, p);
      c.extra_log[i] = std::log(bg.c_H * bg.c_H / bg.c_H2O);
    } else {
      c.extra_log[i] = 0.0;
    }
  }
  return c;
}

Eigen::VectorXd inverse_scales(Equation e, const Eigen::VectorXd& soc, model::Stage stage,
                               const model::CellParameters& p) {
  Eigen::VectorXd out(soc.size());
  for (Eigen::Index i = 0; i < soc.size(); ++i) {
    out[i] = 1.0 / model::equation_scale(e, soc[i], stage, p);
  }
  return out;
}

struct SideConstants {
  double k, D, E0;
};

SideConstants side_constants(Side side, const model::CellParameters& p) {
  return side == Side::Negative ? SideConstants{p.k_neg, p.D2, p.E0_neg}
                                : SideConstants{p.k_pos, p.D4, p.E0_pos};
}

Var sigma_l(Var c, const Coeffs& k) {
  return ad::add_constant(ad::scale_rows(c, k.sigma_slope), k.sigma_int);
}

// Butler-Volmer current with clamped overpotential, on value columns.
Var reaction(Side side, Var c, Var phi_l, Var phi_s, const Coeffs& k,
             const model::CellParameters& p) {
  const SideConstants sc = side_constants(side, p);
  const double vt = p.thermal_voltage();
  const double f = 1.0 / vt;
  const Var log_c = ad::log_floor(c, kConcentrationFloor);
  const Var log_ox = ad::log_floor(ad::shift(-c, p.c0), kConcentrationFloor);
  const Eigen::VectorXd e_const = (sc.E0 + vt * k.extra_log.array()).matrix();
  const Var e = ad::add_constant(vt * (log_ox - log_c), e_const);
  const Var eta = ad::clamp(phi_s - phi_l - e, -model::kOverpotentialBound,
                            model::kOverpotentialBound);
  const Var pre =
      (p.F * p.a * sc.k) * ad::exp(p.alpha_c * log_c + p.alpha_a * log_ox);
  return pre * (ad::exp(p.alpha_a * f * eta) - ad::exp(-p.alpha_c * f * eta));
}

struct InteriorResiduals {
  Var concentration, electrolyte, electrode;
};

InteriorResiduals interior_residuals(const ad::FieldVars& fv, Side side, const Coeffs& k,
                                     model::Stage stage, const model::CellParameters& p) {
  const Eigen::Index n = fv.layout.n;
  auto ch = [&](Var field, Channel c) { return fv.channel(field, c, 0, n); };
  const bool neg = side == Side::Negative;
  const SideConstants sc = side_constants(side, p);
  const Var c = ch(fv.c, Channel::Value);
  const Var phl = ch(fv.phi_l, Channel::Value);
  const Var phs = ch(fv.phi_s, Channel::Value);
  const Var j = reaction(side, c, phl, phs, k, p);

  Var conv = p.v[1] * ch(fv.c, Channel::Dy);
  if (p.v[0] != 0.0) conv = conv + p.v[0] * ch(fv.c, Channel::Dx);
  const Var lap_c = ch(fv.c, Channel::Dxx) + ch(fv.c, Channel::Dyy);
  const Var lap_l = ch(fv.phi_l, Channel::Dxx) + ch(fv.phi_l, Channel::Dyy);
  const Var lap_s = ch(fv.phi_s, Channel::Dxx) + ch(fv.phi_s, Channel::Dyy);
  const double sigma_s = model::solid_conductivity(p);

  auto scaled = [&](Var r, Equation e) { return ad::scale_rows(r, inverse_scales(e, k.soc, stage, p)); };
  InteriorResiduals out;
  out.concentration = scaled(conv - sc.D * lap_c + (1.0 / p.F) * j,
                             neg ? Equation::ConcentrationNeg : Equation::ConcentrationPos);
  out.electrolyte = scaled(-(sigma_l(c, k) * lap_l) - j,
                           neg ? Equation::ElectrolyteNeg : Equation::ElectrolytePos);
  out.electrode = scaled(-sigma_s * lap_s + j, neg ? Equation::ElectrodeNeg : Equation::ElectrodePos);
  return out;
}

Eigen::MatrixXd stack(const std::vector<const Eigen::MatrixXd*>& parts, std::vector<Segment>& segs) {
  Eigen::Index rows = 0;
  for (const auto* m : parts) rows += m->rows();
  Eigen::MatrixXd out(rows, 3);
  Eigen::Index r = 0;
  segs.clear();
  for (const auto* m : parts) {
    out.middleRows(r, m->rows()) = *m;
    segs.push_back({r, m->rows()});
    r += m->rows();
  }
  return out;
}

}  // namespace

struct LossProblem::Prepared {
  model::CellParameters p;
  model::Stage stage = model::Stage::Charging;
  Variant variant = Variant::Pinn;
  std::array<ad::PreparedBatch, 2> interior;
  std::array<ad::PreparedBatch, 2> boundary;
  std::array<Coeffs, 2> interior_coeffs;
  std::array<Coeffs, 2> boundary_coeffs;
  // boundary segments; index by PointSet (interior entries unused)
  std::array<std::array<Segment, kPointSetCount>, 2> seg{};
  Segment epinn_collector, epinn_membrane, data;
  Eigen::VectorXd epinn_weights;
  Eigen::Index epinn_len = 0;
  Eigen::VectorXd data_target;
  std::array<Eigen::VectorXd, model::kEquationCount> boundary_inv_scale;
};

namespace {

std::size_t si(Side s) { return s == Side::Negative ? 0 : 1; }
std::size_t gi(Equation e) { return static_cast<std::size_t>(model::index_of(e)); }

std::vector<Var> record_residuals(ad::Tape& t, const nn::CompositeNet& net,
                                  const LossProblem::Prepared& pr) {
  const auto& p = pr.p;
  std::vector<Var> r(kGroupCount);
  std::array<ad::FieldVars, 2> fi, fb;
  for (Side s : {Side::Negative, Side::Positive}) {
    fi[si(s)] = ad::record_fields(t, net, pr.interior[si(s)]);
    fb[si(s)] = ad::record_fields(t, net, pr.boundary[si(s)]);
  }

  for (Side s : {Side::Negative, Side::Positive}) {
    const auto res = interior_residuals(fi[si(s)], s, pr.interior_coeffs[si(s)], pr.stage, p);
    const bool neg = s == Side::Negative;
    r[gi(neg ? Equation::ConcentrationNeg : Equation::ConcentrationPos)] = res.concentration;
    r[gi(neg ? Equation::ElectrolyteNeg : Equation::ElectrolytePos)] = res.electrolyte;
    r[gi(neg ? Equation::ElectrodeNeg : Equation::ElectrodePos)] = res.electrode;
  }

  const double sigma_s = model::solid_conductivity(p);
  const double i_avg = model::average_current_density(p);
  const double sign = model::current_sign(pr.stage);
  const double g_m = p.sigma_m / p.d_m;

  auto at = [&](Side s, Var ad::FieldVars::*field, Channel ch, Segment sg) {
    const ad::FieldVars& f = fb[si(s)];
    return f.channel(f.*field, ch, sg.row0, sg.n);
  };
  auto seg = [&](Side s, PointSet ps) { return pr.seg[si(s)][static_cast<std::size_t>(ps)]; };
  auto coeffs = [&](Side s, Segment sg) { return pr.boundary_coeffs[si(s)].slice(sg); };
  auto put = [&](Equation e, Var v) {
    r[gi(e)] = ad::scale_rows(v, pr.boundary_inv_scale[gi(e)]);
  };
  using F = ad::FieldVars;

  // x = -L
  {
    const Segment sg = seg(Side::Negative, PointSet::CollectorNeg);
    const Coeffs k = coeffs(Side::Negative, sg);
    put(Equation::CollectorPotentialNeg, at(Side::Negative, &F::phi_s, Channel::Value, sg));
    put(Equation::CollectorC2Flux, at(Side::Negative, &F::c, Channel::Dx, sg));
    put(Equation::CollectorElectrolyteNeg,
        sigma_l(at(Side::Negative, &F::c, Channel::Value, sg), k) *
            at(Side::Negative, &F::phi_l, Channel::Dx, sg));
  }
  // x = 0, both sides share the points
  {
    const Segment sn = seg(Side::Negative, PointSet::Membrane);
    const Segment sp = seg(Side::Positive, PointSet::Membrane);
    const Var jump = at(Side::Positive, &F::phi_l, Channel::Value, sp) -
                     at(Side::Negative, &F::phi_l, Channel::Value, sn);
    const Var flux_neg = sigma_l(at(Side::Negative, &F::c, Channel::Value, sn),
                                 coeffs(Side::Negative, sn)) *
                         at(Side::Negative, &F::phi_l, Channel::Dx, sn);
    const Var flux_pos = sigma_l(at(Side::Positive, &F::c, Channel::Value, sp),
                                 coeffs(Side::Positive, sp)) *
                         at(Side::Positive, &F::phi_l, Channel::Dx, sp);
    put(Equation::MembraneElectrodeNeg, sigma_s * at(Side::Negative, &F::phi_s, Channel::Dx, sn));
    put(Equation::MembraneElectrodePos, sigma_s * at(Side::Positive, &F::phi_s, Channel::Dx, sp));
    put(Equation::MembraneCouplingNeg, flux_neg - g_m * jump);
    put(Equation::MembraneCouplingPos, flux_pos - g_m * jump);
    put(Equation::MembraneC2Flux, at(Side::Negative, &F::c, Channel::Dx, sn));
    put(Equation::MembraneC4Flux, at(Side::Positive, &F::c, Channel::Dx, sp));
  }
  // x = L
  {
    const Segment sg = seg(Side::Positive, PointSet::CollectorPos);
    const Coeffs k = coeffs(Side::Positive, sg);
    put(Equation::CollectorCurrentPos,
        sigma_s * at(Side::Positive, &F::phi_s, Channel::Dx, sg) - sign * i_avg);
    put(Equation::CollectorC4Flux, at(Side::Positive, &F::c, Channel::Dx, sg));
    put(Equation::CollectorElectrolytePos,
        sigma_l(at(Side::Positive, &F::c, Channel::Value, sg), k) *
            at(Side::Positive, &F::phi_l, Channel::Dx, sg));
  }
  // y = 0 and y = H
  for (Side s : {Side::Negative, Side::Positive}) {
    const bool neg = s == Side::Negative;
    const Segment in = seg(s, neg ? PointSet::InletNeg : PointSet::InletPos);
    const Segment out = seg(s, neg ? PointSet::OutletNeg : PointSet::OutletPos);
    const Coeffs k = coeffs(s, in);
    put(neg ? Equation::InletC2 : Equation::InletC4,
        ad::add_constant(at(s, &F::c, Channel::Value, in), -k.c_in));
    put(neg ? Equation::InletPhiNegL : Equation::InletPhiPosL, at(s, &F::phi_l, Channel::Dy, in));
    put(neg ? Equation::InletPhiNegS : Equation::InletPhiPosS, at(s, &F::phi_s, Channel::Dy, in));
    put(neg ? Equation::OutletC2 : Equation::OutletC4, at(s, &F::c, Channel::Dy, out));
    put(neg ? Equation::OutletPhiNegL : Equation::OutletPhiPosL,
        at(s, &F::phi_l, Channel::Dy, out));
    put(neg ? Equation::OutletPhiNegS : Equation::OutletPhiPosS,
        at(s, &F::phi_s, Channel::Dy, out));
  }

  if (uses_epinn(pr.variant)) {
    const double target = sign * i_avg * p.H;
    const double inv = 1.0 / (i_avg * p.H);
    const Segment sc = pr.epinn_collector;
    const Segment sm = pr.epinn_membrane;
    const Var jc = sigma_s * at(Side::Negative, &F::phi_s, Channel::Dx, sc);
    const Var jm = sigma_l(at(Side::Negative, &F::c, Channel::Value, sm),
                           coeffs(Side::Negative, sm)) *
                   at(Side::Negative, &F::phi_l, Channel::Dx, sm);
    r[kEpinnCollectorGroup] =
        inv * (ad::segment_weighted_sum(jc, pr.epinn_weights, pr.epinn_len) - target);
    r[kEpinnMembraneGroup] =
        inv * (ad::segment_weighted_sum(jm, pr.epinn_weights, pr.epinn_len) - target);
  }
  if (uses_data(pr.variant)) {
    r[kDataGroup] = ad::add_constant(at(Side::Negative, &F::phi_l, Channel::Value, pr.data),
                                     -pr.data_target);
  }
  return r;
}

}  // namespace

LossProblem::LossProblem(const nn::CompositeNet& net, const SamplingPlan& plan, Variant variant)
    : plan_(plan), variant_(variant) {
  if (uses_data(variant) && plan.labeled().empty()) {
    throw ConfigError("variant epinn-data needs a labeled data set");
  }
  auto pr = std::make_shared<Prepared>();
  pr->p = net.params();
  pr->stage = net.stage();
  pr->variant = variant;
  const auto& p = pr->p;

  for (Side s : {Side::Negative, Side::Positive}) {
    const auto& pts = plan.points(s == Side::Negative ? PointSet::InteriorNeg : PointSet::InteriorPos);
    pr->interior[si(s)] = ad::prepare_batch(net, s, pts, 5);
    pr->interior_coeffs[si(s)] = make_coeffs(s, pts, p);
  }

  // negative boundary batch: collector, membrane, inlet, outlet, [epinn], [data]
  std::vector<const Eigen::MatrixXd*> parts = {
      &plan.points(PointSet::CollectorNeg), &plan.points(PointSet::Membrane),
      &plan.points(PointSet::InletNeg), &plan.points(PointSet::OutletNeg)};
  if (uses_epinn(variant)) {
    parts.push_back(&plan.epinn_collector_points());
    parts.push_back(&plan.epinn_membrane_points());
  }
  if (uses_data(variant)) parts.push_back(&plan.labeled().points);
  std::vector<Segment> segs;
  Eigen::MatrixXd neg_pts = stack(parts, segs);
  auto& sn = pr->seg[0];
  sn[static_cast<std::size_t>(PointSet::CollectorNeg)] = segs[0];
  sn[static_cast<std::size_t>(PointSet::Membrane)] = segs[1];
  sn[static_cast<std::size_t>(PointSet::InletNeg)] = segs[2];
  sn[static_cast<std::size_t>(PointSet::OutletNeg)] = segs[3];
  std::size_t next = 4;
  if (uses_epinn(variant)) {
    pr->epinn_collector = segs[next++];
    pr->epinn_membrane = segs[next++];
    pr->epinn_weights = plan.epinn_weights();
    pr->epinn_len = plan.config().epinn_y;
  }
  if (uses_data(variant)) {
    pr->data = segs[next++];
    pr->data_target = plan.labeled().phi_l;
  }
  pr->boundary[0] = ad::prepare_batch(net, Side::Negative, neg_pts, 3);
  pr->boundary_coeffs[0] = make_coeffs(Side::Negative, neg_pts, p);

  parts = {&plan.points(PointSet::Membrane), &plan.points(PointSet::CollectorPos),
           &plan.points(PointSet::InletPos), &plan.points(PointSet::OutletPos)};
  Eigen::MatrixXd pos_pts = stack(parts, segs);
  auto& sp = pr->seg[1];
  sp[static_cast<std::size_t>(PointSet::Membrane)] = segs[0];
  sp[static_cast<std::size_t>(PointSet::CollectorPos)] = segs[1];
  sp[static_cast<std::size_t>(PointSet::InletPos)] = segs[2];
  sp[static_cast<std::size_t>(PointSet::OutletPos)] = segs[3];
  pr->boundary[1] = ad::prepare_batch(net, Side::Positive, pos_pts, 3);
  pr->boundary_coeffs[1] = make_coeffs(Side::Positive, pos_pts, p);

  for (const OperatorInfo& op : operator_registry()) {
    if (op.set == PointSet::InteriorNeg || op.set == PointSet::InteriorPos) continue;
    pr->boundary_inv_scale[gi(op.equation)] =
        inverse_scales(op.equation, plan.points(op.set).col(2), pr->stage, p);
  }
  prep_ = std::move(pr);
}

std::vector<Eigen::Index> LossProblem::group_sizes() const {
  const SAWeights w = SAWeights::ones(plan_, variant_);
  std::vector<Eigen::Index> out;
  for (const auto& g : w.groups) out.push_back(g.size());
  return out;
}

LossProblem::Evaluation LossProblem::evaluate(const nn::CompositeNet& net,
                                              const SAWeights& weights,
                                              bool with_gradient) const {
  if (weights.groups.size() != kGroupCount) throw DomainError("SA weights have wrong group count");
  ad::Tape t;
  const std::vector<Var> r = record_residuals(t, net, *prep_);
  Evaluation ev;
  ev.residual_sq.resize(kGroupCount);
  Var total;
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    if (!r[g].valid()) continue;
    const Eigen::VectorXd& w = weights.groups[g];
    if (w.size() != r[g].rows()) {
      throw DomainError("SA weight group " + group_name(g) + " has " + std::to_string(w.size()) +
                        " entries, residual has " + std::to_string(r[g].rows()));
    }
    t.require_finite(r[g], "residual " + group_name(g));
    ev.residual_sq[g] = r[g].value().array().square().matrix();
    const Var term = ad::mean_weighted_square(r[g], w.array().square().matrix());
    const double v = term.scalar();
    if (g < kOperatorGroups) {
      ev.breakdown.per_operator[g] = v;
    } else if (g == kDataGroup) {
      ev.breakdown.data = v;
    } else {
      ev.breakdown.epinn += v;
    }
    total = total.valid() ? total + term : term;
  }
  ev.breakdown.total = total.scalar();
  if (with_gradient) ev.gradient = t.gradient(total, net.parameter_count());
  return ev;
}

ResidualSet LossProblem::residuals(const nn::CompositeNet& net) const {
  ad::Tape t;
  const std::vector<Var> r = record_residuals(t, net, *prep_);
  ResidualSet out;
  out.groups.resize(kGroupCount);
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    if (r[g].valid()) out.groups[g] = r[g].value();
  }
  return out;
}

std::array<Eigen::VectorXd, 3> pde_residuals(const nn::CompositeNet& net, Side side,
                                             const Eigen::MatrixXd& points) {
  ad::Tape t;
  const auto fv = ad::record_fields(t, net, side, points, 5);
  const auto res =
      interior_residuals(fv, side, make_coeffs(side, points, net.params()), net.stage(), net.params());
  return {res.concentration.value(), res.electrolyte.value(), res.electrode.value()};
}

std::array<Eigen::VectorXd, 6> pde_residuals(const nn::CompositeNet& net, const SamplingPlan& plan) {
  const auto neg = pde_residuals(net, Side::Negative, plan.points(PointSet::InteriorNeg));
  const auto pos = pde_residuals(net, Side::Positive, plan.points(PointSet::InteriorPos));
  return {neg[0], neg[1], neg[2], pos[0], pos[1], pos[2]};
}

std::array<Eigen::VectorXd, 24> bc_residuals(const nn::CompositeNet& net, const SamplingPlan& plan) {
  const ResidualSet r = LossProblem(net, plan, Variant::Pinn).residuals(net);
  std::array<Eigen::VectorXd, 24> out;
  for (std::size_t k = 0; k < 24; ++k) out[k] = r.groups[model::kPdeCount + k];
  return out;
}

std::array<Eigen::VectorXd, 2> epinn_residual(const nn::CompositeNet& net, const SamplingPlan& plan) {
  const ResidualSet r = LossProblem(net, plan, Variant::Epinn).residuals(net);
  return {r.groups[kEpinnCollectorGroup], r.groups[kEpinnMembraneGroup]};
}

double data_loss(const nn::CompositeNet& net, const LabeledSet& labeled,
                 const Eigen::VectorXd& weights) {
  if (labeled.empty()) return 0.0;
  if (weights.size() != labeled.size()) throw DomainError("data_loss: weight count mismatch");
  const Eigen::MatrixXd pred = net.predict(Side::Negative, labeled.points);
  const Eigen::ArrayXd err = pred.col(1) - labeled.phi_l;
  return (weights.array().square() * err.square()).mean();
}

LossBreakdown total_loss(const nn::CompositeNet& net, const SamplingPlan& plan,
                         const SAWeights& weights, Variant variant) {
  return LossProblem(net, plan, variant).evaluate(net, weights, false).breakdown;
}

}  // namespace vrfb::pinn
