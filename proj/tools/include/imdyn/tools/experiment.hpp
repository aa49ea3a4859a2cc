#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "imdyn/dynamics.hpp"

namespace imdyn::tools {

/// Flat experiment description as stored in config files. Missing keys take
/// the defaults below; alpha, l, m and n are required.
struct ExperimentConfig {
  std::string objective = "l1";  ///< l1 | elastic_abs | diag_quadratic
  std::vector<double> weights;   ///< diag_quadratic only
  std::vector<double> center;    ///< diag_quadratic only
  double alpha = 0.0;
  double t0 = 1.0;
  double lambda0 = 1.0;
  double l = 0.0;
  double beta0 = 1.0;
  double m = 0.0;
  double n = 0.0;
  std::optional<double> b0;  ///< nullopt means "auto"
  std::vector<double> x0 = {10.0};
  std::vector<double> u0 = {0.0};
  double t_end = 100.0;
  double rel_tol = 1e-10;
  double abs_tol = 1e-20;
  int sample_count = 1000;
  std::string output = "trajectory.csv";

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Throws InvalidInput naming the field for unknown keys, wrong types and
/// missing required keys.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json to_json(const ExperimentConfig& c);

/// Resolves "auto" b0 and builds a validated SystemConfig.
SystemConfig to_system(const ExperimentConfig& c);
PolynomialSchedule to_schedule(const ExperimentConfig& c);

/// Field-by-field equality of two simulation setups.
bool same_system(const SystemConfig& a, const SystemConfig& b);

/// Header plus one row per sample, numbers with 17 significant digits.
void write_csv(std::ostream& out, const Trajectory& traj);
std::vector<std::string> csv_columns(std::size_t dimension);

/// One member of a figure sweep.
struct FigureMember {
  std::string label;  ///< e.g. "n=4.99"
  double value = 0.0;
  ExperimentConfig config;
};

struct FigurePreset {
  std::string id;
  std::string parameter;  ///< swept parameter name
  std::vector<FigureMember> members;
  bool expect_divergence = false;
  std::string note;
};

/// Presets for ids 1, 2, 3, 4a, 4b; nullopt for anything else.
std::optional<FigurePreset> figure_preset(const std::string& id);

}  // namespace imdyn::tools
