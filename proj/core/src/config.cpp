#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "ecd/experiment.hpp"

namespace ecd {

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::LzmDynamics: return "lzm_dynamics";
    case Experiment::EcdDynamics: return "ecd_dynamics";
    case Experiment::StandaloneSweep: return "standalone_sweep";
    case Experiment::OntopSweep: return "ontop_sweep";
    case Experiment::IntnormSweep: return "intnorm_sweep";
    case Experiment::TwoQubit: return "two_qubit";
    case Experiment::ThreeLevel: return "three_level";
    case Experiment::Robustness: return "robustness";
    case Experiment::ScalingOrder: return "scaling_order";
  }
  throw std::logic_error("to_string(Experiment)");
}

Experiment parse_experiment(const std::string& name) {
  for (int e = 0; e <= static_cast<int>(Experiment::ScalingOrder); ++e)
    if (to_string(static_cast<Experiment>(e)) == name) return static_cast<Experiment>(e);
  throw ConfigError("unknown experiment '" + name + "'");
}

std::vector<std::pair<std::string, std::string>> experiment_catalog() {
  return {
      {"lzm_dynamics", "uncorrected avoided-crossing sweep, populations and infidelity series"},
      {"ecd_dynamics", "oscillating-correction sweep run, populations and infidelity series"},
      {"standalone_sweep", "infidelity vs duration for the correction alone, per budget factor"},
      {"ontop_sweep", "infidelity vs duration for base plus correction, per budget factor"},
      {"intnorm_sweep", "infidelity vs integrated field norm, corrected vs plain driving"},
      {"two_qubit", "Bell-state preparation run with adiabatic comparator"},
      {"three_level", "double avoided-crossing run with adiabatic comparator and speedup scan"},
      {"robustness", "relative fidelity error under amplitude and phase offsets"},
      {"scaling_order", "single-period stroboscopic infidelity vs period length"},
  };
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

struct RawConfig {
  std::map<std::string, std::string> kv;
  std::set<std::string> consumed;

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string take(const std::string& key) {
    consumed.insert(key);
    return kv.at(key);
  }
};

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (...) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  const int i = static_cast<int>(std::llround(x));
  if (std::abs(x - i) > 1e-9) throw ConfigError("key '" + key + "': expected an integer");
  return i;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ConfigError("key '" + key + "': empty list element");
    out.push_back(to_double(key, item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

void require_positive(const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError("key '" + key + "' must be positive");
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  RawConfig raw;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    auto trim = [](std::string s) {
      const auto x = s.find_first_not_of(" \t\r");
      const auto y = s.find_last_not_of(" \t\r");
      return x == std::string::npos ? std::string() : s.substr(x, y - x + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
    if (raw.kv.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    raw.kv[key] = val;
  }

  if (!raw.has("schema")) throw ConfigError("missing required key 'schema'");
  if (!raw.has("experiment")) throw ConfigError("missing required key 'experiment'");

  ExperimentConfig cfg;
  cfg.source_text = text;
  cfg.config_hash = fnv1a64(text);
  cfg.schema = to_int("schema", raw.take("schema"));
  if (cfg.schema != 1) throw ConfigError("unsupported schema version");
  cfg.experiment = parse_experiment(raw.take("experiment"));

  // Defaults per experiment family.
  switch (cfg.experiment) {
    case Experiment::LzmDynamics:
    case Experiment::EcdDynamics:
    case Experiment::Robustness:
      cfg.params = {20.0, 20.0, 0.0};
      break;
    case Experiment::StandaloneSweep:
    case Experiment::OntopSweep:
      cfg.params = {20.0, 20.0, 0.0};
      cfg.k_list = {1.0};
      break;
    case Experiment::IntnormSweep:
      cfg.params = {40.0, 5.0, 0.0};
      break;
    case Experiment::TwoQubit:
      cfg.params = {5.0, 5.0, 0.0};
      break;
    case Experiment::ThreeLevel:
      cfg.params = {40.0, 25.0, 2.5};
      cfg.k_list = {1.0};
      break;
    case Experiment::ScalingOrder:
      cfg.params = {20.0, 2.0, 0.0};
      break;
  }
  if (cfg.experiment == Experiment::Robustness) cfg.n_periods = 40;
  if (cfg.experiment == Experiment::EcdDynamics) cfg.n_periods = 40;
  if (cfg.experiment == Experiment::TwoQubit) cfg.n_periods = 10;

  // Key applicability by experiment.
  const std::set<std::string> common = {"schema", "experiment", "epsilon", "tau",
                                        "steps_per_period", "steps", "out", "threads",
                                        "norm_convention"};
  std::set<std::string> allowed = common;
  switch (cfg.experiment) {
    case Experiment::LzmDynamics:
      break;
    case Experiment::EcdDynamics:
      allowed.insert({"mode", "order", "omega", "n_periods"});
      break;
    case Experiment::StandaloneSweep:
    case Experiment::OntopSweep:
      allowed.insert({"k", "order", "tau_min", "tau_max", "tau_points"});
      break;
    case Experiment::IntnormSweep:
      allowed.insert({"tau_min", "tau_max", "tau_points", "nt_min", "nt_max", "nt_points",
                      "ecd_tau", "order"});
      break;
    case Experiment::TwoQubit:
      allowed.insert({"mode", "omega", "n_periods"});
      break;
    case Experiment::ThreeLevel:
      allowed.insert({"d", "mode", "k", "tau_min", "tau_max", "tau_points"});
      break;
    case Experiment::Robustness:
      allowed.insert({"mode", "omega", "n_periods", "delta_min", "delta_max", "delta_points"});
      break;
    case Experiment::ScalingOrder:
      allowed.insert({"order", "t_min", "t_max", "t_points", "s0"});
      break;
  }
  for (const auto& [key, value] : raw.kv) {
    (void)value;
    if (!allowed.count(key))
      throw ConfigError("key '" + key + "' is not recognised for experiment '" +
                        to_string(cfg.experiment) + "'");
  }

  if (raw.has("epsilon")) cfg.params.epsilon = to_double("epsilon", raw.take("epsilon"));
  if (raw.has("tau")) cfg.params.tau = to_double("tau", raw.take("tau"));
  if (raw.has("d")) cfg.params.d = to_double("d", raw.take("d"));
  require_positive("epsilon", cfg.params.epsilon);
  require_positive("tau", cfg.params.tau);
  if (cfg.params.d < 0) throw ConfigError("key 'd' must be non-negative");

  // grid defaults that depend on the experiment / parsed parameters
  if (cfg.experiment == Experiment::IntnormSweep) {
    cfg.tau_max = 300.0;
    cfg.tau_points = 25;
  } else if (cfg.experiment == Experiment::ThreeLevel) {
    cfg.tau_min = cfg.params.tau;
    cfg.tau_max = 6.0 * cfg.params.tau;
    cfg.tau_points = 40;
  }

  if (raw.has("mode")) {
    const std::string m = raw.take("mode");
    if (m == "standalone") cfg.mode = ScheduleMode::Standalone;
    else if (m == "ontop") cfg.mode = ScheduleMode::OnTop;
    else throw ConfigError("key 'mode': expected standalone|ontop");
  }
  if (raw.has("order")) {
    const std::string o = raw.take("order");
    if (o == "first") cfg.order = SynthOrder::First;
    else if (o == "third") cfg.order = SynthOrder::Third;
    else throw ConfigError("key 'order': expected first|third");
  }
  if (raw.has("norm_convention"))
    cfg.convention = parse_norm_convention(raw.take("norm_convention"));

  if (raw.has("omega") && raw.has("n_periods"))
    throw ConfigError("give either 'omega' or 'n_periods', not both");
  if (raw.has("omega")) {
    cfg.omega = to_double("omega", raw.take("omega"));
    require_positive("omega", *cfg.omega);
    cfg.n_periods.reset();
  }
  if (raw.has("n_periods")) {
    cfg.n_periods = to_int("n_periods", raw.take("n_periods"));
    if (*cfg.n_periods < 1) throw ConfigError("key 'n_periods' must be >= 1");
  }
  if (raw.has("k")) {
    cfg.k_list = to_list("k", raw.take("k"));
    for (double k : cfg.k_list) require_positive("k", k);
  }

  if (raw.has("tau_min")) cfg.tau_min = to_double("tau_min", raw.take("tau_min"));
  if (raw.has("tau_max")) cfg.tau_max = to_double("tau_max", raw.take("tau_max"));
  if (raw.has("tau_points")) cfg.tau_points = to_int("tau_points", raw.take("tau_points"));
  require_positive("tau_min", cfg.tau_min);
  if (!(cfg.tau_max >= cfg.tau_min)) throw ConfigError("'tau_max' must be >= 'tau_min'");
  if (cfg.tau_points < 2) throw ConfigError("'tau_points' must be >= 2");

  if (raw.has("nt_min")) cfg.nt_min = to_int("nt_min", raw.take("nt_min"));
  if (raw.has("nt_max")) cfg.nt_max = to_int("nt_max", raw.take("nt_max"));
  if (raw.has("nt_points")) cfg.nt_points = to_int("nt_points", raw.take("nt_points"));
  if (cfg.nt_min < 1 || cfg.nt_max < cfg.nt_min || cfg.nt_points < 2)
    throw ConfigError("invalid nt grid");
  if (raw.has("ecd_tau")) cfg.ecd_tau = to_double("ecd_tau", raw.take("ecd_tau"));
  require_positive("ecd_tau", cfg.ecd_tau);

  if (raw.has("delta_min")) cfg.delta_min = to_double("delta_min", raw.take("delta_min"));
  if (raw.has("delta_max")) cfg.delta_max = to_double("delta_max", raw.take("delta_max"));
  if (raw.has("delta_points")) cfg.delta_points = to_int("delta_points", raw.take("delta_points"));
  require_positive("delta_min", cfg.delta_min);
  if (!(cfg.delta_max >= cfg.delta_min) || cfg.delta_max > 0.5)
    throw ConfigError("delta grid must satisfy delta_min <= delta_max <= 0.5");
  if (cfg.delta_points < 2) throw ConfigError("'delta_points' must be >= 2");

  if (raw.has("t_min")) cfg.t_min = to_double("t_min", raw.take("t_min"));
  if (raw.has("t_max")) cfg.t_max = to_double("t_max", raw.take("t_max"));
  if (raw.has("t_points")) cfg.t_points = to_int("t_points", raw.take("t_points"));
  require_positive("t_min", cfg.t_min);
  if (!(cfg.t_max > cfg.t_min)) throw ConfigError("'t_max' must exceed 't_min'");
  if (cfg.t_points < 3) throw ConfigError("'t_points' must be >= 3");
  if (raw.has("s0")) cfg.s0 = to_double("s0", raw.take("s0"));
  if (cfg.s0 < 0.0 || cfg.s0 >= 1.0) throw ConfigError("'s0' must lie in [0, 1)");

  if (raw.has("steps_per_period")) {
    cfg.steps_per_period = to_int("steps_per_period", raw.take("steps_per_period"));
    if (cfg.steps_per_period < 32) throw ConfigError("'steps_per_period' must be >= 32");
  }
  if (raw.has("steps")) {
    cfg.steps = to_int("steps", raw.take("steps"));
    if (cfg.steps < 1000) throw ConfigError("'steps' must be >= 1000");
  }
  if (raw.has("threads")) {
    cfg.threads = to_int("threads", raw.take("threads"));
    if (cfg.threads < 1) throw ConfigError("'threads' must be >= 1");
  }
  if (raw.has("out")) cfg.out_dir = raw.take("out");

  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_text(ss.str());
}

}  // namespace ecd
