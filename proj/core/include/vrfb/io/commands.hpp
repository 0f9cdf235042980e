#pragma once

#include <filesystem>
#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vrfb/io/csv.hpp"
#include "vrfb/io/run_config.hpp"
#include "vrfb/nn/composite_net.hpp"
#include "vrfb/pinn/sampling.hpp"
#include "vrfb/solver/reference_solver.hpp"

namespace vrfb::io {

// Result directory layout, shared by reference and network outputs:
//   voltage_curve.csv     soc,voltage
//   outlet_profile.csv    soc,x,field,value      (y = H)
//   collector_current.csv soc,y,j                 (x = -L)
// Reference directories also hold fields.csv (soc,side,x,y,c,phi_l,phi_s).
inline constexpr const char* kVoltageFile = "voltage_curve.csv";
inline constexpr const char* kOutletFile = "outlet_profile.csv";
inline constexpr const char* kCurrentFile = "collector_current.csv";
inline constexpr const char* kFieldsFile = "fields.csv";
inline constexpr const char* kLabeledFile = "labeled.csv";

/// Outlet field names in file order; concentrations are c2 and c4.
const std::array<std::string, 6>& outlet_field_names();

struct VoltageCurve {
  model::Stage stage = model::Stage::Charging;
  double current = 0.0;  // A
  std::vector<double> soc;
  std::vector<double> voltage;
  std::string source;  // reference | pinn | epinn | epinn+data

  /// Throws DomainError unless soc is strictly increasing and voltages finite.
  void validate() const;
};

CsvTable to_table(const VoltageCurve& c);
VoltageCurve read_voltage_curve(const std::filesystem::path& path);

/// Outlet values of all six fields at each x of the grid, for one SOC.
CsvTable outlet_table(const std::vector<double>& soc, const std::vector<solver::FieldState>& states);
CsvTable outlet_table(const std::vector<double>& soc, const nn::CompositeNet& net,
                      const solver::Grid& grid);
CsvTable current_table(const std::vector<double>& soc, const std::vector<solver::FieldState>& states);
CsvTable current_table(const std::vector<double>& soc, const nn::CompositeNet& net,
                       const solver::Grid& grid);

/// ||a - b||_2 / ||b||_2 with b the reference.
double relative_l2(std::span<const double> a, std::span<const double> b);

struct ComparisonReport {
  double rel_l2_voltage = 0.0;
  /// RMSE of the outlet electrolyte potentials (both sides, all SOC).
  double profile_rmse = 0.0;
  std::map<std::string, double> profile_rmse_by_field;
  std::vector<double> profile_rmse_per_soc;  // electrolyte potentials
  double current_rmse = 0.0;
  double current_rel_l2 = 0.0;
  /// Mean signed offset a - b of the outlet electrolyte potentials.
  double mean_shift = 0.0;
  /// Mean over (SOC, side) of |mean signed offset| along the outlet line.
  double mean_abs_shift = 0.0;
  std::vector<double> soc;
};

/// Compares result directory a against reference directory b. Throws
/// DomainError listing the differing SOC values when the grids disagree.
ComparisonReport compare_dirs(const std::filesystem::path& a, const std::filesystem::path& b);
std::string to_json_string(const ComparisonReport& r);

/// Bilinear interpolation of phi_l in (y, soc) along one line of a reference
/// fields table. x must be 0 (membrane, negative side) or -L.
class LineInterpolator {
 public:
  LineInterpolator(const CsvTable& fields, double x, const model::CellParameters& p);
  double operator()(double y, double soc) const;
  double soc_min() const { return soc_.front(); }
  double soc_max() const { return soc_.back(); }

 private:
  std::vector<double> soc_;
  std::vector<double> y_;
  std::vector<std::vector<double>> phi_l_;  // [soc][y]
};

// Commands. They throw ConfigError for usage problems and other exceptions
// for runtime failures.
void cmd_solve_ref(const RunConfig& c, std::span<const model::Stage> stages);
pinn::LabeledSet cmd_gen_data(const RunConfig& c, model::Stage stage);
void cmd_train(const RunConfig& c);
/// Writes the three result files for the container over the config's SOC
/// grid into out_dir; with a points file also writes predictions.csv.
void cmd_predict(const RunConfig& c, const std::filesystem::path& model_path,
                 const std::filesystem::path& out_dir,
                 const std::optional<std::filesystem::path>& points = std::nullopt);
ComparisonReport cmd_compare(const std::filesystem::path& a, const std::filesystem::path& b,
                             const std::optional<std::filesystem::path>& report_path);

/// Run directory of a training run: <output_dir>/<stage>/<variant>.
std::filesystem::path run_dir(const RunConfig& c);

CsvTable to_table(const pinn::LabeledSet& s);
pinn::LabeledSet read_labeled(const std::filesystem::path& path, const model::CellParameters& p);

}  // namespace vrfb::io
