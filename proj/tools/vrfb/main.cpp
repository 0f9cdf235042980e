// vrfb: reference solves, labeled-data extraction, training, prediction and
// comparison. Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vrfb/error.hpp"
#include "vrfb/io/commands.hpp"
#include "vrfb/io/run_config.hpp"

namespace {

using namespace vrfb;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonFlags {
  std::string config;
  std::string variant;
  std::string stage;
  std::optional<long long> seed;
  std::string out;
  bool desk_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool training_flags) {
  cmd->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--stage", f.stage, "charge or discharge");
  cmd->add_option("--out", f.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", f.seed, "seed (training init and sampling, or data sampling)");
  if (training_flags) {
    cmd->add_option("--variant", f.variant, "pinn, epinn or epinn-data");
    cmd->add_flag("--desk-scale", f.desk_scale, "reduced nets, sampling and iteration counts");
  }
}

io::RunConfig resolve(const CommonFlags& f) {
  io::RunConfig c = f.config.empty() ? io::RunConfig::defaults() : io::load_run_config(f.config);
  if (f.desk_scale) {
    const train::TrainConfig d = train::TrainConfig::desk();
    c.train.adam_iters = d.adam_iters;
    c.train.lbfgs_iters = d.lbfgs_iters;
    c.train.arch = d.arch;
    c.train.sampling = d.sampling;
    c.train.desk_scale = true;
  }
  if (!f.variant.empty()) c.train.variant = pinn::parse_variant(f.variant);
  if (!f.stage.empty()) c.train.stage = model::parse_stage(f.stage);
  if (f.seed) {
    if (*f.seed < 0) throw ConfigError("--seed must be >= 0");
    const auto s = static_cast<std::uint64_t>(*f.seed);
    c.train.init_seed = s;
    c.train.sample_seed = s + 1;
    c.data.seed = s;
  }
  if (!f.out.empty()) c.output_dir = f.out;
  c.validate();
  return c;
}

std::vector<model::Stage> stages_of(const CommonFlags& f, const io::RunConfig& c) {
  if (f.stage.empty()) return {model::Stage::Charging, model::Stage::Discharging};
  return {c.train.stage};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vanadium redox flow battery reference solver and PINN trainer"};
  app.require_subcommand(1);

  CommonFlags solve_f, data_f, train_f, predict_f;
  auto* solve = app.add_subcommand("solve-ref", "finite-difference sweep over the SOC grid");
  add_common(solve, solve_f, false);

  auto* gen = app.add_subcommand("gen-data", "sample labeled electrolyte potentials from a reference run");
  add_common(gen, data_f, false);

  auto* trn = app.add_subcommand("train", "train a network for one stage");
  add_common(trn, train_f, true);

  auto* pred = app.add_subcommand("predict", "evaluate a trained model container");
  add_common(pred, predict_f, true);
  std::string model_path, points_path;
  pred->add_option("--model", model_path, "model container")->required()->check(CLI::ExistingFile);
  pred->add_option("--points", points_path, "CSV with columns x,y,soc")->check(CLI::ExistingFile);

  auto* cmp = app.add_subcommand("compare", "compare a result directory against a reference directory");
  std::string dir_a, dir_b, report;
  cmp->add_option("a", dir_a, "result directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("b", dir_b, "reference directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--report", report, "write the JSON report here as well as to stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve) {
      const io::RunConfig c = resolve(solve_f);
      io::cmd_solve_ref(c, stages_of(solve_f, c));
    } else if (*gen) {
      const io::RunConfig c = resolve(data_f);
      for (model::Stage s : stages_of(data_f, c)) io::cmd_gen_data(c, s);
    } else if (*trn) {
      io::cmd_train(resolve(train_f));
    } else if (*pred) {
      const io::RunConfig c = resolve(predict_f);
      std::optional<std::filesystem::path> pts;
      if (!points_path.empty()) pts = points_path;
      io::cmd_predict(c, model_path, c.output_dir, pts);
    } else if (*cmp) {
      std::optional<std::filesystem::path> rp;
      if (!report.empty()) rp = report;
      std::cout << io::to_json_string(io::cmd_compare(dir_a, dir_b, rp));
    }
  } catch (const ConfigError& e) {
    std::cerr << "vrfb: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "vrfb: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
