#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecd/engine.hpp"
#include "ecd/models.hpp"

namespace ecd {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Experiment {
  LzmDynamics,
  EcdDynamics,
  StandaloneSweep,
  OntopSweep,
  IntnormSweep,
  TwoQubit,
  ThreeLevel,
  Robustness,
  ScalingOrder,
};

std::string to_string(Experiment e);
Experiment parse_experiment(const std::string& name);

// One experiment family configuration list entry: name plus one-line summary.
std::vector<std::pair<std::string, std::string>> experiment_catalog();

enum class SynthOrder { First, Third };

// Declarative experiment description, parsed from a plain key = value file.
// Fully deterministic: no seeds anywhere.
struct ExperimentConfig {
  Experiment experiment = Experiment::LzmDynamics;

  ModelParams params;
  ScheduleMode mode = ScheduleMode::Standalone;
  SynthOrder order = SynthOrder::First;
  NormConvention convention = NormConvention::Literal;

  std::vector<double> k_list;          // budget factors for sweeps
  std::optional<double> omega;
  std::optional<int> n_periods;

  // sweep grids
  double tau_min = 2.0, tau_max = 100.0;
  int tau_points = 40;
  int nt_min = 2, nt_max = 1024, nt_points = 20;  // intnorm ECD curve
  double ecd_tau = 5.0;                           // intnorm fixed-duration side
  double delta_min = 1e-4, delta_max = 1e-2;
  int delta_points = 9;
  double t_min = 1e-3, t_max = 1e-1;
  int t_points = 13;
  double s0 = 0.35;  // scaling-order segment start

  int steps_per_period = 64;
  int steps = 2000;
  int threads = 1;
  std::string out_dir = "out";

  int schema = 1;
  std::string source_text;   // raw config file contents
  std::uint64_t config_hash = 0;

  // Parses and validates; unknown keys and keys not used by the chosen
  // experiment are rejected.
  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
};

struct ResultRow {
  std::string sweep_var;
  double value = 0.0;
  double infidelity = 0.0;
  double strength_base = 0.0;
  double strength_corr = 0.0;
  double integral_norm = 0.0;
  int n_periods = 0;
  double cert_delta = 0.0;
};

// Plot-ready multi-column series destined for a .dat file.
struct DataSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ResultSet {
  std::vector<ResultRow> rows;           // sorted by (sweep_var, value)
  std::map<std::string, DataSeries> series;  // file stem -> table
  std::string metadata_json;             // results.json payload
};

// Executes the configured experiment. Throws ConfigError / NumericsError /
// BudgetError; identical configs produce identical ResultSets.
ResultSet run(const ExperimentConfig& config);

// Direct entry points for the two specialised experiment families (run()
// dispatches to these for the matching enum values).
ResultSet robustness_sweep(const ExperimentConfig& config);
ResultSet scaling_order_experiment(const ExperimentConfig& config);

// Writes results.csv, results.json and one <name>.dat per series into dir
// (created if needed). Byte-deterministic for identical ResultSets.
void write_outputs(const ResultSet& results, const std::string& dir);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace ecd
