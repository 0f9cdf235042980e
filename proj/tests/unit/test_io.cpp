#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include <doctest.h>

#include "generators.hpp"
#include "vrfb/error.hpp"
#include "vrfb/io/commands.hpp"
#include "vrfb/io/container.hpp"
#include "vrfb/io/csv.hpp"
#include "vrfb/io/run_config.hpp"

using namespace vrfb;
using model::Stage;
namespace fs = std::filesystem;

namespace {

const model::CellParameters P{};

fs::path scratch_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("vrfb_io_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

// A synthetic result directory: V = 1.3 + soc, phi_l = 0.1 x-index, j = y.
void write_result_dir(const fs::path& d, double v_factor, double phi_l_offset) {
  fs::create_directories(d);
  io::VoltageCurve c;
  c.soc = {0.2, 0.4, 0.6};
  for (double s : c.soc) c.voltage.push_back(v_factor * (1.3 + s));
  io::write_csv(d / io::kVoltageFile, io::to_table(c));
  io::CsvTable o;
  o.header = {"soc", "x", "field", "value"};
  io::CsvTable j;
  j.header = {"soc", "y", "j"};
  for (double s : c.soc) {
    for (int i = 0; i < 4; ++i) {
      for (const std::string& f : io::outlet_field_names()) {
        const bool electrolyte = f.find("_l") != std::string::npos;
        const double v = electrolyte ? 0.1 * i + phi_l_offset : 100.0 * i;
        o.add_row({io::format_double(s), io::format_double(1e-3 * i), f, io::format_double(v)});
      }
      j.add_row({io::format_double(s), io::format_double(0.01 * i), io::format_double(200.0 + i)});
    }
  }
  io::write_csv(d / io::kOutletFile, o);
  io::write_csv(d / io::kCurrentFile, j);
}

io::RunConfig tiny_run(const fs::path& out) {
  io::RunConfig c = io::RunConfig::defaults();
  c.grid = {8, 20};
  c.soc_grid = {0.2, 0.4, 0.6};
  c.output_dir = out;
  c.train = train::TrainConfig::desk();
  c.train.arch.hidden_layers = 1;
  c.train.arch.width = 4;
  c.train.sampling.interior_per_side = 10;
  c.train.sampling.vertical_boundary = 6;
  c.train.sampling.horizontal_boundary = 3;
  c.train.sampling.epinn_soc = 3;
  c.train.sampling.epinn_y = 5;
  c.train.adam_iters = 3;
  c.train.lbfgs_iters = 2;
  return c;
}

}  // namespace

TEST_CASE("CSV numbers round-trip exactly") {
  testing::Gen g(61);
  io::CsvTable t;
  t.header = {"a", "b"};
  std::vector<double> vals;
  for (int i = 0; i < 100; ++i) {
    const double a = g.log_uniform(1e-300, 1e300) * (i % 2 ? -1 : 1);
    const double b = g.uniform(-1, 1);
    vals.push_back(a);
    vals.push_back(b);
    t.add_row({io::format_double(a), io::format_double(b)});
  }
  const io::CsvTable back = io::parse_csv(io::to_string(t));
  REQUIRE(back.rows.size() == 100);
  for (std::size_t r = 0; r < 100; ++r) {
    CHECK(back.number(r, 0) == vals[2 * r]);
    CHECK(back.number(r, 1) == vals[2 * r + 1]);
  }
}

TEST_CASE("CSV errors") {
  CHECK_THROWS_AS(io::parse_csv("a,b\n1,2,3\n"), ConfigError);
  CHECK_THROWS_AS(io::read_csv("/nonexistent/file.csv"), ConfigError);
  const io::CsvTable t = io::parse_csv("a,b\n1,x\n");
  CHECK_THROWS_AS((void)t.column("c"), ConfigError);
  CHECK_THROWS_AS((void)t.number(0, 1), ConfigError);
}

TEST_CASE("model container round-trips bit for bit") {
  const fs::path d = scratch_dir("container");
  testing::Gen g(62);
  io::ModelContainer c{testing::random_net(g, Stage::Discharging, P, 2, 5), pinn::Variant::Epinn,
                       std::nullopt, {{"phase", "final"}}};
  auto plan = pinn::SamplingPlan::sample(pinn::SamplingConfig::desk_scale(), P, 1);
  pinn::SAWeights w = pinn::SAWeights::ones(plan, pinn::Variant::Epinn);
  for (auto& grp : w.groups) grp = g.vector(grp.size(), 0, 3);
  c.weights = w;
  io::write_container(d / "m.vrfb", c);
  const io::ModelContainer back = io::read_container(d / "m.vrfb");
  CHECK(back.net.flat_parameters() == c.net.flat_parameters());
  CHECK(back.net.stage() == Stage::Discharging);
  CHECK(back.net.architecture() == c.net.architecture());
  CHECK(back.variant == pinn::Variant::Epinn);
  REQUIRE(back.weights.has_value());
  CHECK(*back.weights == w);
  CHECK(back.metadata.at("phase") == "final");
  // the same container always serializes to the same bytes
  io::write_container(d / "m2.vrfb", back);
  CHECK(slurp(d / "m.vrfb") == slurp(d / "m2.vrfb"));
  CHECK_FALSE(fs::exists(d / "m.vrfb.tmp"));
}

TEST_CASE("malformed containers are rejected") {
  const fs::path d = scratch_dir("container_bad");
  testing::Gen g(63);
  io::write_container(d / "m.vrfb", {testing::random_net(g, Stage::Charging, P, 1, 3),
                                     pinn::Variant::Pinn, std::nullopt, {}});
  const std::string bytes = slurp(d / "m.vrfb");
  spit(d / "short.vrfb", bytes.substr(0, bytes.size() - 4));
  spit(d / "long.vrfb", bytes + "x");
  spit(d / "magic.vrfb", "NOTAVRFB" + bytes.substr(8));
  for (const char* f : {"short.vrfb", "long.vrfb", "magic.vrfb", "absent.vrfb"}) {
    INFO(f);
    CHECK_THROWS_AS(io::read_container(d / f), ConfigError);
  }
}

TEST_CASE("run config errors name the offending field") {
  CHECK(error_of([] { io::parse_run_config(R"({"grid": {"nx": 0}})"); }).find("grid.nx") !=
        std::string::npos);
  CHECK(error_of([] { io::parse_run_config(R"({"params": {"sigma_m": -1}})"); })
            .find("sigma_m") != std::string::npos);
  CHECK(error_of([] { io::parse_run_config(R"({"train": {"rho": "fast"}})"); })
            .find("train.rho") != std::string::npos);
  CHECK(error_of([] { io::parse_run_config(R"({"nonsense": 1})"); }).find("nonsense") !=
        std::string::npos);
  CHECK(error_of([] { io::parse_run_config(R"({"soc_grid": [0.5, 0.3]})"); }).find("soc_grid") !=
        std::string::npos);
  CHECK_THROWS_AS(io::parse_run_config("{not json"), ConfigError);
}

TEST_CASE("run config round-trips through JSON") {
  io::RunConfig c = tiny_run("somewhere");
  c.params.I = 3.0;
  c.train.variant = pinn::Variant::EpinnData;
  c.train.stage = Stage::Discharging;
  const io::RunConfig back = io::parse_run_config(io::to_json_string(c));
  CHECK(io::to_json_string(back) == io::to_json_string(c));
  CHECK(back.params.I == 3.0);
  CHECK(back.train.arch.width == 4);
  CHECK(back.train.variant == pinn::Variant::EpinnData);
  CHECK(io::run_dir(back) == fs::path("somewhere") / "discharge" / "epinn-data");
}

TEST_CASE("desk_scale in a config is applied before explicit overrides") {
  const io::RunConfig c = io::parse_run_config(R"({"train": {"adam_iters": 7, "desk_scale": true}})");
  CHECK(c.train.adam_iters == 7);
  CHECK(c.train.lbfgs_iters == 500);
  CHECK(c.train.arch.width == 32);
}

TEST_CASE("relative L2") {
  const std::vector<double> b{3, 4};
  CHECK(io::relative_l2(b, b) == 0.0);
  CHECK(io::relative_l2(std::vector<double>{3.03, 4.04}, b) == doctest::Approx(0.01));
  CHECK_THROWS_AS(io::relative_l2(std::vector<double>{1}, b), DomainError);
}

TEST_CASE("compare examples") {
  const fs::path d = scratch_dir("compare");
  write_result_dir(d / "ref", 1.0, 0.0);
  write_result_dir(d / "same", 1.0, 0.0);
  write_result_dir(d / "scaled", 1.01, 0.0);
  write_result_dir(d / "shifted", 1.0, 0.05);

  const auto same = io::compare_dirs(d / "same", d / "ref");
  CHECK(same.rel_l2_voltage == 0.0);
  CHECK(same.profile_rmse == 0.0);
  CHECK(same.current_rmse == 0.0);
  CHECK(same.mean_abs_shift == 0.0);

  CHECK(io::compare_dirs(d / "scaled", d / "ref").rel_l2_voltage == doctest::Approx(0.01));

  const auto shifted = io::compare_dirs(d / "shifted", d / "ref");
  CHECK(shifted.mean_shift == doctest::Approx(0.05));
  CHECK(shifted.mean_abs_shift == doctest::Approx(0.05));
  CHECK(shifted.profile_rmse == doctest::Approx(0.05));
  CHECK(shifted.profile_rmse_by_field.at("c2") == 0.0);

  const auto rep = io::cmd_compare(d / "shifted", d / "ref", d / "report.json");
  CHECK(slurp(d / "report.json").find("voltage_definition") != std::string::npos);
  CHECK(rep.mean_shift == shifted.mean_shift);
}

TEST_CASE("compare rejects mismatched SOC grids by naming them") {
  const fs::path d = scratch_dir("compare_grid");
  write_result_dir(d / "ref", 1.0, 0.0);
  fs::create_directories(d / "other");
  io::VoltageCurve c;
  c.soc = {0.2, 0.5};
  c.voltage = {1.5, 1.8};
  io::write_csv(d / "other" / io::kVoltageFile, io::to_table(c));
  const std::string msg = error_of([&] { io::compare_dirs(d / "other", d / "ref"); });
  CHECK(msg.find("0.5") != std::string::npos);
}

TEST_CASE("solve-ref and gen-data on a coarse grid") {
  const fs::path d = scratch_dir("pipeline");
  const io::RunConfig c = tiny_run(d);
  const Stage stages[] = {Stage::Charging};
  io::cmd_solve_ref(c, stages);
  const fs::path ref = c.stage_dir(Stage::Charging) / "reference";
  for (const char* f : {io::kVoltageFile, io::kOutletFile, io::kCurrentFile, io::kFieldsFile}) {
    CHECK(fs::exists(ref / f));
  }
  const io::VoltageCurve v = io::read_voltage_curve(ref / io::kVoltageFile);
  CHECK(v.soc == c.soc_grid);

  const pinn::LabeledSet lab = io::cmd_gen_data(c, Stage::Charging);
  REQUIRE(lab.size() == 80);
  for (Eigen::Index i = 0; i < 40; ++i) CHECK(lab.points(i, 0) == 0.0);
  for (Eigen::Index i = 40; i < 80; ++i) CHECK(lab.points(i, 0) == -P.L);
  CHECK(lab.points.col(2).minCoeff() >= 0.2);
  CHECK(lab.points.col(2).maxCoeff() <= 0.6);
  const pinn::LabeledSet back = io::read_labeled(c.labeled_path(Stage::Charging), P);
  CHECK(back.points == lab.points);
  CHECK(back.phi_l == lab.phi_l);

  // membrane labels interpolate the reference at grid nodes exactly
  const io::CsvTable fields = io::read_csv(ref / io::kFieldsFile);
  const io::LineInterpolator line(fields, 0.0, P);
  CHECK(line.soc_min() == 0.2);
  CHECK(line.soc_max() == 0.6);
  CHECK_THROWS_AS(line(0.01, 0.7), DomainError);

  // gen-data is reproducible
  const pinn::LabeledSet again = io::cmd_gen_data(c, Stage::Charging);
  CHECK(again.points == lab.points);
}

TEST_CASE("train, predict and compare end to end") {
  const fs::path d = scratch_dir("end_to_end");
  io::RunConfig c = tiny_run(d);
  const Stage stages[] = {Stage::Discharging};
  c.train.stage = Stage::Discharging;
  io::cmd_solve_ref(c, stages);
  c.train.variant = pinn::Variant::EpinnData;
  CHECK(error_of([&] { io::cmd_train(c); }).find("labeled") != std::string::npos);
  io::cmd_gen_data(c, Stage::Discharging);
  io::cmd_train(c);
  const fs::path run = io::run_dir(c);
  for (const char* f : {"model.vrfb", "history.csv", "run_config.json", io::kVoltageFile,
                        io::kOutletFile, io::kCurrentFile}) {
    INFO(f);
    CHECK(fs::exists(run / f));
  }
  const auto rep = io::compare_dirs(run, c.stage_dir(Stage::Discharging) / "reference");
  CHECK(std::isfinite(rep.rel_l2_voltage));
  CHECK(rep.soc == c.soc_grid);

  // points outside the domain are reported by row
  spit(d / "points.csv", "x,y,soc\n-0.001,0.01,0.3\n0.01,0.01,0.3\n");
  const std::string msg = error_of([&] { io::cmd_predict(c, run / "model.vrfb", d / "pred", d / "points.csv"); });
  CHECK(msg.find("row 2") != std::string::npos);
  spit(d / "points.csv", "x,y,soc\n-0.001,0.01,0.3\n0.002,0.04,0.5\n");
  io::cmd_predict(c, run / "model.vrfb", d / "pred", d / "points.csv");
  CHECK(io::read_csv(d / "pred" / "predictions.csv").rows.size() == 2);
}
