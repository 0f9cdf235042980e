#include "vrfb/io/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "vrfb/error.hpp"
#include "vrfb/io/container.hpp"
#include "vrfb/pinn/predict.hpp"
#include "vrfb/util/random.hpp"

namespace vrfb::io {

using model::Side;
using model::Stage;
namespace fs = std::filesystem;

const std::array<std::string, 6>& outlet_field_names() {
  static const std::array<std::string, 6> names{"c2", "phi_neg_l", "phi_neg_s",
                                                "c4", "phi_pos_l", "phi_pos_s"};
  return names;
}

void VoltageCurve::validate() const {
  if (soc.size() != voltage.size()) throw DomainError("voltage curve: soc/voltage length mismatch");
  for (std::size_t i = 0; i < soc.size(); ++i) {
    if (!std::isfinite(voltage[i])) {
      throw DomainError("voltage curve: non-finite voltage at soc " + format_double(soc[i]));
    }
    if (i > 0 && !(soc[i] > soc[i - 1])) {
      throw DomainError("voltage curve: soc not strictly increasing at row " + std::to_string(i + 1));
    }
  }
}

CsvTable to_table(const VoltageCurve& c) {
  c.validate();
  CsvTable t;
  t.header = {"soc", "voltage"};
  for (std::size_t i = 0; i < c.soc.size(); ++i) {
    t.add_row({format_double(c.soc[i]), format_double(c.voltage[i])});
  }
  return t;
}

VoltageCurve read_voltage_curve(const fs::path& path) {
  const CsvTable t = read_csv(path);
  const auto cs = t.column("soc"), cv = t.column("voltage");
  VoltageCurve c;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    c.soc.push_back(t.number(r, cs));
    c.voltage.push_back(t.number(r, cv));
  }
  c.validate();
  return c;
}

namespace {

CsvTable outlet_header() {
  CsvTable t;
  t.header = {"soc", "x", "field", "value"};
  return t;
}

void add_outlet_rows(CsvTable& t, double soc, Side side, const std::vector<double>& x,
                     const Eigen::MatrixXd& fields) {
  const std::size_t base = side == Side::Negative ? 0 : 3;
  for (int f = 0; f < 3; ++f) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      t.add_row({format_double(soc), format_double(x[i]), outlet_field_names()[base + f],
                 format_double(fields(static_cast<Eigen::Index>(i), f))});
    }
  }
}

std::vector<double> grid_x(const solver::Grid& g, Side side) {
  std::vector<double> x;
  for (int i = 0; i <= g.nx(); ++i) x.push_back(g.x(side, i));
  return x;
}

std::vector<double> grid_y(const solver::Grid& g) {
  std::vector<double> y;
  for (int j = 0; j <= g.ny(); ++j) y.push_back(g.y(j));
  return y;
}

CsvTable current_header() {
  CsvTable t;
  t.header = {"soc", "y", "j"};
  return t;
}

}  // namespace

CsvTable outlet_table(const std::vector<double>& soc, const std::vector<solver::FieldState>& states) {
  if (soc.size() != states.size()) throw DomainError("outlet_table: soc/state count mismatch");
  CsvTable t = outlet_header();
  for (std::size_t k = 0; k < soc.size(); ++k) {
    const auto samples = solver::outlet_profile(states[k]);
    for (Side side : {Side::Negative, Side::Positive}) {
      std::vector<double> x;
      std::vector<Eigen::Vector3d> v;
      for (const auto& s : samples) {
        if (s.side != side) continue;
        x.push_back(s.x);
        v.emplace_back(s.concentration, s.phi_l, s.phi_s);
      }
      Eigen::MatrixXd m(static_cast<Eigen::Index>(v.size()), 3);
      for (std::size_t i = 0; i < v.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = v[i].transpose();
      add_outlet_rows(t, soc[k], side, x, m);
    }
  }
  return t;
}

CsvTable outlet_table(const std::vector<double>& soc, const nn::CompositeNet& net,
                      const solver::Grid& grid) {
  CsvTable t = outlet_header();
  for (double s : soc) {
    for (Side side : {Side::Negative, Side::Positive}) {
      const std::vector<double> x = grid_x(grid, side);
      const Eigen::VectorXd xv = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
      add_outlet_rows(t, s, side, x, pinn::outlet_fields(net, side, s, xv));
    }
  }
  return t;
}

CsvTable current_table(const std::vector<double>& soc, const std::vector<solver::FieldState>& states) {
  if (soc.size() != states.size()) throw DomainError("current_table: soc/state count mismatch");
  CsvTable t = current_header();
  for (std::size_t k = 0; k < soc.size(); ++k) {
    for (const auto& pt : solver::collector_current_profile(states[k])) {
      t.add_row({format_double(soc[k]), format_double(pt.position), format_double(pt.value)});
    }
  }
  return t;
}

CsvTable current_table(const std::vector<double>& soc, const nn::CompositeNet& net,
                       const solver::Grid& grid) {
  CsvTable t = current_header();
  const std::vector<double> y = grid_y(grid);
  const Eigen::VectorXd yv = Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
  for (double s : soc) {
    const Eigen::VectorXd j = pinn::collector_current(net, s, yv);
    for (std::size_t i = 0; i < y.size(); ++i) {
      t.add_row({format_double(s), format_double(y[i]), format_double(j[static_cast<Eigen::Index>(i)])});
    }
  }
  return t;
}

double relative_l2(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw DomainError("relative_l2: sizes differ or are empty");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  if (den == 0.0) throw DomainError("relative_l2: reference has zero norm");
  return std::sqrt(num / den);
}

namespace {

std::string soc_list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + format_double(x);
  return "[" + s + "]";
}

void require_same_grid(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> only_a, only_b;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(only_a));
  std::set_difference(b.begin(), b.end(), a.begin(), a.end(), std::back_inserter(only_b));
  if (!only_a.empty() || !only_b.empty() || a.size() != b.size()) {
    throw DomainError("SOC grids differ: only in a " + soc_list(only_a) + ", only in b " +
                      soc_list(only_b));
  }
}

// Rows keyed by everything but the value column, in file order.
struct KeyedValues {
  std::vector<std::string> keys;
  std::vector<double> soc;
  std::vector<std::string> field;
  std::vector<double> value;
};

KeyedValues keyed(const CsvTable& t, const std::vector<std::string>& key_cols,
                  const std::string& value_col) {
  KeyedValues k;
  std::vector<std::size_t> idx;
  for (const auto& c : key_cols) idx.push_back(t.column(c));
  const std::size_t vc = t.column(value_col), sc = t.column("soc");
  const bool has_field = std::find(t.header.begin(), t.header.end(), "field") != t.header.end();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    std::string key;
    for (auto i : idx) key += t.rows[r][i] + "|";
    k.keys.push_back(std::move(key));
    k.soc.push_back(t.number(r, sc));
    k.field.push_back(has_field ? t.rows[r][t.column("field")] : "");
    k.value.push_back(t.number(r, vc));
  }
  return k;
}

void require_same_keys(const KeyedValues& a, const KeyedValues& b, const std::string& what) {
  if (a.keys != b.keys) throw DomainError(what + ": sample locations differ between the inputs");
}

bool is_electrolyte(const std::string& field) {
  return field == "phi_neg_l" || field == "phi_pos_l";
}

}  // namespace

ComparisonReport compare_dirs(const fs::path& a, const fs::path& b) {
  const VoltageCurve va = read_voltage_curve(a / kVoltageFile);
  const VoltageCurve vb = read_voltage_curve(b / kVoltageFile);
  require_same_grid(va.soc, vb.soc);

  ComparisonReport r;
  r.soc = vb.soc;
  r.rel_l2_voltage = relative_l2(va.voltage, vb.voltage);

  const KeyedValues oa = keyed(read_csv(a / kOutletFile), {"soc", "x", "field"}, "value");
  const KeyedValues ob = keyed(read_csv(b / kOutletFile), {"soc", "x", "field"}, "value");
  require_same_keys(oa, ob, kOutletFile);
  std::map<std::string, std::pair<double, std::size_t>> by_field;
  std::vector<double> soc_sq(r.soc.size(), 0.0);
  std::vector<std::size_t> soc_n(r.soc.size(), 0);
  // signed offsets per (soc, side) line
  std::map<std::pair<double, std::string>, std::pair<double, std::size_t>> line_shift;
  double sq = 0.0, shift = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < oa.value.size(); ++i) {
    const double d = oa.value[i] - ob.value[i];
    auto& f = by_field[ob.field[i]];
    f.first += d * d;
    ++f.second;
    if (!is_electrolyte(ob.field[i])) continue;
    sq += d * d;
    shift += d;
    ++n;
    const auto k = static_cast<std::size_t>(
        std::lower_bound(r.soc.begin(), r.soc.end(), ob.soc[i]) - r.soc.begin());
    if (k >= r.soc.size() || r.soc[k] != ob.soc[i]) {
      throw DomainError(std::string(kOutletFile) + ": soc " + format_double(ob.soc[i]) +
                        " is not on the voltage grid");
    }
    soc_sq[k] += d * d;
    ++soc_n[k];
    auto& ls = line_shift[{ob.soc[i], ob.field[i]}];
    ls.first += d;
    ++ls.second;
  }
  if (n == 0) throw DomainError(std::string(kOutletFile) + ": no electrolyte potential rows");
  r.profile_rmse = std::sqrt(sq / static_cast<double>(n));
  r.mean_shift = shift / static_cast<double>(n);
  for (const auto& [field, acc] : by_field) {
    r.profile_rmse_by_field[field] = std::sqrt(acc.first / static_cast<double>(acc.second));
  }
  for (std::size_t k = 0; k < soc_sq.size(); ++k) {
    r.profile_rmse_per_soc.push_back(soc_n[k] ? std::sqrt(soc_sq[k] / static_cast<double>(soc_n[k])) : 0.0);
  }
  for (const auto& [key, acc] : line_shift) {
    r.mean_abs_shift += std::abs(acc.first / static_cast<double>(acc.second));
  }
  r.mean_abs_shift /= static_cast<double>(line_shift.size());

  const KeyedValues ca = keyed(read_csv(a / kCurrentFile), {"soc", "y"}, "j");
  const KeyedValues cb = keyed(read_csv(b / kCurrentFile), {"soc", "y"}, "j");
  require_same_keys(ca, cb, kCurrentFile);
  double csq = 0.0;
  for (std::size_t i = 0; i < ca.value.size(); ++i) {
    csq += (ca.value[i] - cb.value[i]) * (ca.value[i] - cb.value[i]);
  }
  r.current_rmse = std::sqrt(csq / static_cast<double>(ca.value.size()));
  r.current_rel_l2 = relative_l2(ca.value, cb.value);
  return r;
}

std::string to_json_string(const ComparisonReport& r) {
  nlohmann::ordered_json j;
  j["rel_l2_voltage"] = r.rel_l2_voltage;
  j["profile_rmse"] = r.profile_rmse;
  j["current_rmse"] = r.current_rmse;
  j["mean_shift"] = r.mean_shift;
  j["mean_abs_shift"] = r.mean_abs_shift;
  j["current_rel_l2"] = r.current_rel_l2;
  j["profile_rmse_by_field"] = r.profile_rmse_by_field;
  j["profile_rmse_per_soc"] = r.profile_rmse_per_soc;
  j["soc"] = r.soc;
  j["voltage_definition"] =
      "y-average of phi_s at x = L minus y-average of phi_s at x = -L (trapezoid rule)";
  return j.dump(2) + "\n";
}

LineInterpolator::LineInterpolator(const CsvTable& t, double x, const model::CellParameters& p) {
  if (x != 0.0 && x != -p.L) throw DomainError("LineInterpolator: x must be 0 or -L");
  const auto cs = t.column("soc"), cside = t.column("side"), cx = t.column("x"),
             cy = t.column("y"), cl = t.column("phi_l");
  std::map<double, std::map<double, double>> grid;  // soc -> y -> phi_l
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][cside] != "negative" || t.number(r, cx) != x) continue;
    grid[t.number(r, cs)][t.number(r, cy)] = t.number(r, cl);
  }
  if (grid.size() < 2) throw ConfigError("reference fields: need at least two SOC values on the line");
  for (const auto& [soc, line] : grid) {
    std::vector<double> ys, vals;
    for (const auto& [y, v] : line) {
      ys.push_back(y);
      vals.push_back(v);
    }
    if (y_.empty()) y_ = ys;
    if (ys != y_) throw ConfigError("reference fields: y grid differs between SOC values");
    soc_.push_back(soc);
    phi_l_.push_back(std::move(vals));
  }
  if (y_.size() < 2) throw ConfigError("reference fields: need at least two y values on the line");
}

double LineInterpolator::operator()(double y, double soc) const {
  auto bracket = [](const std::vector<double>& g, double v, const char* what) {
    if (v < g.front() || v > g.back()) {
      throw DomainError(std::string("interpolation: ") + what + " " + format_double(v) +
                        " outside the reference grid");
    }
    std::size_t i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), v) - g.begin());
    i = std::clamp<std::size_t>(i, 1, g.size() - 1) - 1;
    return std::pair{i, (v - g[i]) / (g[i + 1] - g[i])};
  };
  const auto [j, ty] = bracket(y_, y, "y");
  const auto [k, ts] = bracket(soc_, soc, "soc");
  auto at = [&](std::size_t kk) { return (1 - ty) * phi_l_[kk][j] + ty * phi_l_[kk][j + 1]; };
  return (1 - ts) * at(k) + ts * at(k + 1);
}

CsvTable to_table(const pinn::LabeledSet& s) {
  CsvTable t;
  t.header = {"x", "y", "soc", "phi_l"};
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    t.add_row({format_double(s.points(i, 0)), format_double(s.points(i, 1)),
               format_double(s.points(i, 2)), format_double(s.phi_l[i])});
  }
  return t;
}

pinn::LabeledSet read_labeled(const fs::path& path, const model::CellParameters& p) {
  if (!fs::exists(path)) throw ConfigError("labeled data file not found: " + path.string());
  const CsvTable t = read_csv(path);
  const std::size_t cx = t.column("x"), cy = t.column("y"), cs = t.column("soc"),
                    cl = t.column("phi_l");
  pinn::LabeledSet s;
  const auto n = static_cast<Eigen::Index>(t.rows.size());
  s.points.resize(n, 3);
  s.phi_l.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto rr = static_cast<std::size_t>(r);
    s.points.row(r) << t.number(rr, cx), t.number(rr, cy), t.number(rr, cs);
    s.phi_l[r] = t.number(rr, cl);
  }
  try {
    s.validate(p);
  } catch (const DomainError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return s;
}

fs::path run_dir(const RunConfig& c) {
  std::string v(pinn::to_string(c.train.variant));
  std::replace(v.begin(), v.end(), '+', '-');
  return c.stage_dir(c.train.stage) / v;
}

namespace {

CsvTable fields_table(const std::vector<double>& soc, const std::vector<solver::FieldState>& states) {
  CsvTable t;
  t.header = {"soc", "side", "x", "y", "c", "phi_l", "phi_s"};
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    const auto& g = s.grid();
    for (Side side : {Side::Negative, Side::Positive}) {
      for (int j = 0; j <= g.ny(); ++j) {
        for (int i = 0; i <= g.nx(); ++i) {
          t.add_row({format_double(soc[k]), std::string(model::to_string(side)),
                     format_double(g.x(side, i)), format_double(g.y(j)),
                     format_double(s(side, solver::Field::Concentration, i, j)),
                     format_double(s(side, solver::Field::PhiL, i, j)),
                     format_double(s(side, solver::Field::PhiS, i, j))});
        }
      }
    }
  }
  return t;
}

}  // namespace

void cmd_solve_ref(const RunConfig& c, std::span<const Stage> stages) {
  c.validate();
  const solver::Grid grid = c.make_grid();
  solver::SweepOptions opt;
  opt.solver = c.solver;
  opt.warm_start = c.warm_start;
  for (Stage stage : stages) {
    // solve first, write after: a failed sweep leaves no partial files
    const solver::SweepResult sweep = solver::sweep_soc(stage, c.params, grid, c.soc_grid, opt);
    const fs::path dir = c.stage_dir(stage) / "reference";
    const std::array files{kVoltageFile, kOutletFile, kCurrentFile, kFieldsFile};
    try {
      fs::create_directories(dir);
      VoltageCurve curve{stage, c.params.I, sweep.soc, sweep.voltage, "reference"};
      write_csv(dir / kVoltageFile, to_table(curve));
      write_csv(dir / kOutletFile, outlet_table(sweep.soc, sweep.states));
      write_csv(dir / kCurrentFile, current_table(sweep.soc, sweep.states));
      write_csv(dir / kFieldsFile, fields_table(sweep.soc, sweep.states));
    } catch (...) {
      for (const char* f : files) fs::remove(dir / f);
      throw;
    }
  }
}

pinn::LabeledSet cmd_gen_data(const RunConfig& c, Stage stage) {
  c.validate();
  const fs::path fields = c.stage_dir(stage) / "reference" / kFieldsFile;
  if (!fs::exists(fields)) {
    throw ConfigError("reference fields not found: " + fields.string() + " (run solve-ref first)");
  }
  const CsvTable t = read_csv(fields);
  const LineInterpolator membrane(t, 0.0, c.params), collector(t, -c.params.L, c.params);
  Rng rng(c.data.seed);
  const int n = c.data.points_per_line;
  pinn::LabeledSet s;
  s.points.resize(2 * n, 3);
  s.phi_l.resize(2 * n);
  for (int r = 0; r < 2 * n; ++r) {
    const bool on_membrane = r < n;
    const LineInterpolator& f = on_membrane ? membrane : collector;
    const double y = rng.uniform(0.0, c.params.H);
    const double soc = rng.uniform(f.soc_min(), f.soc_max());
    s.points.row(r) << (on_membrane ? 0.0 : -c.params.L), y, soc;
    s.phi_l[r] = f(y, soc);
  }
  s.validate(c.params);
  const fs::path out = c.labeled_path(stage);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_csv(out, to_table(s));
  return s;
}

void cmd_train(const RunConfig& c) {
  c.validate();
  pinn::LabeledSet labeled;
  if (pinn::uses_data(c.train.variant)) labeled = read_labeled(c.labeled_path(c.train.stage), c.params);
  const fs::path dir = run_dir(c);
  fs::create_directories(dir);
  write_atomic(dir / "run_config.json", to_json_string(c));
  const train::TrainResult r = train::train(c.train, c.params, labeled, dir);
  // result files next to the model for direct comparison with the reference
  cmd_predict(c, dir / "model.vrfb", dir);
  (void)r;
}

void cmd_predict(const RunConfig& c, const fs::path& model_path, const fs::path& out_dir,
                 const std::optional<fs::path>& points) {
  c.validate();
  const ModelContainer m = read_container(model_path);
  const nn::CompositeNet& net = m.net;
  const solver::Grid grid(c.grid.nx, c.grid.ny, net.params());
  for (double s : c.soc_grid) {
    if (s < net.params().soc_min || s > net.params().soc_max) {
      throw ConfigError("soc " + format_double(s) + " outside the model's SOC range");
    }
  }
  std::string source(pinn::to_string(m.variant));
  VoltageCurve curve{net.stage(), net.params().I, c.soc_grid,
                     pinn::voltage_curve(net, c.soc_grid, c.grid.ny), source};
  fs::create_directories(out_dir);
  write_csv(out_dir / kVoltageFile, to_table(curve));
  write_csv(out_dir / kOutletFile, outlet_table(c.soc_grid, net, grid));
  write_csv(out_dir / kCurrentFile, current_table(c.soc_grid, net, grid));
  if (!points) return;

  const CsvTable in = read_csv(*points);
  const std::size_t cx = in.column("x"), cy = in.column("y"), cs = in.column("soc");
  const auto& p = net.params();
  std::string errors;
  std::vector<Eigen::Index> neg, pos;
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(in.rows.size()), 3);
  for (std::size_t r = 0; r < in.rows.size(); ++r) {
    const double x = in.number(r, cx), y = in.number(r, cy), soc = in.number(r, cs);
    const auto rr = static_cast<Eigen::Index>(r);
    pts.row(rr) << x, y, soc;
    if (x < -p.L || x > p.L || y < 0.0 || y > p.H || soc < p.soc_min || soc > p.soc_max) {
      errors += "\n  row " + std::to_string(r + 1) + ": (" + format_double(x) + ", " +
                format_double(y) + ", " + format_double(soc) + ") outside the domain";
      continue;
    }
    (x <= 0.0 ? neg : pos).push_back(rr);
  }
  if (!errors.empty()) throw ConfigError(points->string() + ": points outside the domain:" + errors);
  Eigen::MatrixXd out(pts.rows(), 3);
  for (auto [side, rows] : {std::pair{Side::Negative, &neg}, std::pair{Side::Positive, &pos}}) {
    if (rows->empty()) continue;
    const Eigen::MatrixXd v = net.predict(side, pts(*rows, Eigen::all));
    out(*rows, Eigen::all) = v;
  }
  CsvTable t;
  t.header = {"x", "y", "soc", "c", "phi_l", "phi_s"};
  for (Eigen::Index r = 0; r < pts.rows(); ++r) {
    t.add_row({format_double(pts(r, 0)), format_double(pts(r, 1)), format_double(pts(r, 2)),
               format_double(out(r, 0)), format_double(out(r, 1)), format_double(out(r, 2))});
  }
  write_csv(out_dir / "predictions.csv", t);
}

ComparisonReport cmd_compare(const fs::path& a, const fs::path& b,
                             const std::optional<fs::path>& report_path) {
  const ComparisonReport r = compare_dirs(a, b);
  if (report_path) write_atomic(*report_path, to_json_string(r));
  return r;
}

}  // namespace vrfb::io
