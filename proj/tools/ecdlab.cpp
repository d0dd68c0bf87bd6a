// Command-line front end for the effective counterdiabatic driving library.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
// 4 infeasible strength budget.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ecd/experiment.hpp"

namespace {

int run_config(const std::string& path, const std::string& out_override, int threads_override,
               const std::string& convention_override) {
  ecd::ExperimentConfig cfg = ecd::ExperimentConfig::parse_file(path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (threads_override > 0) cfg.threads = threads_override;
  if (!convention_override.empty())
    cfg.convention = ecd::parse_norm_convention(convention_override);

  const ecd::ResultSet results = ecd::run(cfg);
  ecd::write_outputs(results, cfg.out_dir);
  std::cout << "wrote " << results.rows.size() << " result rows and " << results.series.size()
            << " data series to " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ecdlab - effective counterdiabatic driving experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir, convention;
  int threads = 0;

  CLI::App* cmd_run = app.add_subcommand("run", "execute an experiment config");
  cmd_run->add_option("config", config_path, "experiment config file")->required();
  cmd_run->add_option("--out", out_dir, "output directory (overrides config)");
  cmd_run->add_option("--threads", threads, "worker threads for sweep points");
  cmd_run->add_option("--norm-convention", convention, "literal|sqrt");

  CLI::App* cmd_list = app.add_subcommand("list-experiments", "list experiment families");

  CLI::App* cmd_validate = app.add_subcommand("validate", "parse and validate a config");
  cmd_validate->add_option("config", config_path, "experiment config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_list->parsed()) {
      for (const auto& [name, blurb] : ecd::experiment_catalog())
        std::cout << name << "\n    " << blurb << "\n";
      return 0;
    }
    if (cmd_validate->parsed()) {
      ecd::ExperimentConfig::parse_file(config_path);
      std::cout << "OK\n";
      return 0;
    }
    return run_config(config_path, out_dir, threads, convention);
  } catch (const ecd::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ecd::BudgetError& e) {
    std::cerr << "infeasible budget: " << e.what() << "\n";
    return 4;
  } catch (const ecd::NumericsError& e) {
    std::cerr << "numerical non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
