#include "ecd/experiment.hpp"

#include "ecd/magnus.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "json.hpp"

namespace ecd {

namespace {

using nlohmann::json;

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

// Deterministic parallel map: worker threads pull indices from a counter,
// results land in a pre-sized vector keyed by index.
void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> counter{0};
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = counter.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                     double y_floor = 0.0) {
  LinearFit f;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > y_floor) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  f.points = static_cast<int>(lx.size());
  if (f.points < 2) return f;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < f.points; ++i) {
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double n = f.points;
  f.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  f.intercept = (sy - f.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (int i = 0; i < f.points; ++i) {
    const double pred = f.slope * lx[i] + f.intercept;
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - mean) * (ly[i] - mean);
  }
  f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return f;
}

// Centered moving average over 20 surrounding samples (window of 21, trimmed
// at the edges).
std::vector<double> moving_average20(const std::vector<double>& y) {
  std::vector<double> out(y.size());
  const int half = 10;
  for (int i = 0; i < static_cast<int>(y.size()); ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(static_cast<int>(y.size()) - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += y[j];
    out[i] = acc / (hi - lo + 1);
  }
  return out;
}

std::string format_k(double k) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", k);
  return buf;
}

int uncorrected_steps(const ExperimentConfig& cfg, double tau) {
  return std::max(cfg.steps, static_cast<int>(std::ceil(100.0 * tau)));
}

void sort_rows(ResultSet& rs) {
  std::stable_sort(rs.rows.begin(), rs.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    if (a.sweep_var != b.sweep_var) return a.sweep_var < b.sweep_var;
    return a.value < b.value;
  });
}

json base_metadata(const ExperimentConfig& cfg) {
  json meta;
  meta["experiment"] = to_string(cfg.experiment);
  meta["schema"] = cfg.schema;
  meta["config_hash"] = cfg.config_hash;
  meta["version"] = "0.1.0";
  meta["norm_convention"] = to_string(cfg.convention);
  meta["tolerances"] = {{"convergence_certificate", 1e-8},
                        {"tail_window_fraction", 0.1},
                        {"gap_tol", 1e-8}};
  meta["epsilon"] = cfg.params.epsilon;
  meta["tau"] = cfg.params.tau;
  return meta;
}

double resolve_omega(const ExperimentConfig& cfg, double tau) {
  if (cfg.omega) {
    const SnappedOmega snap = snap_omega(*cfg.omega, tau);
    if (snap.n_periods < 1) throw BudgetError("omega too small: no full period fits");
    return snap.omega;
  }
  const int nt = cfg.n_periods.value_or(40);
  return 2.0 * M_PI * nt / tau;
}

ECDSchedule synth_lzm(const ExperimentConfig& cfg, const ModelParams& p, double omega,
                      ScheduleMode mode) {
  if (cfg.order == SynthOrder::Third)
    return synth_su2_third_order(lzm(p), lzm_fcd(p), omega, mode);
  return synth_su2_first_order(lzm(p), lzm_fcd(p), omega, mode);
}

void append_run_row(ResultSet& rs, const ExperimentConfig& cfg, const std::string& name,
                    double value, const ECDSchedule& sched, const Trajectory& traj) {
  ResultRow row;
  row.sweep_var = name;
  row.value = value;
  row.infidelity = traj.final_infidelity;
  row.strength_base = strength(sched, Component::Base, cfg.convention);
  row.strength_corr =
      sched.has_correction ? strength(sched, Component::Correction, cfg.convention) : 0.0;
  row.integral_norm = integral_norm(sched, Component::Total, cfg.convention);
  row.n_periods = sched.n_periods();
  row.cert_delta = traj.cert_delta;
  rs.rows.push_back(row);
}

// ---------------------------------------------------------------------------
// dynamics experiments

ResultSet run_lzm_dynamics(const ExperimentConfig& cfg) {
  const ControlSystem sys = lzm(cfg.params);
  const ECDSchedule sched = ECDSchedule::uncorrected(sys);

  PropagateOptions opts;
  opts.min_steps = uncorrected_steps(cfg, cfg.params.tau);
  const Trajectory traj = propagate(sched, ground_state(evaluate_H(sys, 0.0)), opts);
  if (!traj.certified)
    throw NumericsError("lzm_dynamics: propagation not converged under step halving");

  const auto targets = adiabatic_path(sys, traj.s_grid, 0);

  ResultSet rs;
  append_run_row(rs, cfg, "tau", cfg.params.tau, sched, traj);

  DataSeries pop{{"s", "p0", "p1", "target_p0", "target_p1"}, {}};
  DataSeries inf{{"s", "infidelity", "lz_formula"}, {}};
  const double plz = lz_formula(cfg.params);
  for (size_t i = 0; i < traj.s_grid.size(); ++i) {
    pop.rows.push_back({traj.s_grid[i], traj.populations[i][0], traj.populations[i][1],
                        std::norm(targets[i][0]), std::norm(targets[i][1])});
    inf.rows.push_back({traj.s_grid[i], traj.infidelity_series[i], plz});
  }
  rs.series["populations"] = std::move(pop);
  rs.series["infidelity"] = std::move(inf);

  json meta = base_metadata(cfg);
  meta["final_infidelity"] = traj.final_infidelity;
  meta["tail_avg_infidelity"] = traj.tail_avg_infidelity;
  meta["lz_formula"] = plz;
  meta["cert_delta"] = traj.cert_delta;
  rs.metadata_json = meta.dump(2);
  return rs;
}

ResultSet run_ecd_dynamics(const ExperimentConfig& cfg) {
  const double omega = resolve_omega(cfg, cfg.params.tau);
  const ECDSchedule sched = synth_lzm(cfg, cfg.params, omega, cfg.mode);
  const ControlSystem& sys = sched.base;

  PropagateOptions opts;
  opts.steps_per_period = cfg.steps_per_period;
  const Trajectory traj = propagate(sched, ground_state(evaluate_H(sys, 0.0)), opts);
  if (!traj.certified)
    throw NumericsError("ecd_dynamics: propagation not converged under step halving");

  const auto targets = adiabatic_path(sys, traj.s_grid, 0);

  ResultSet rs;
  append_run_row(rs, cfg, "tau", cfg.params.tau, sched, traj);

  DataSeries pop{{"s", "p0", "p1", "target_p0", "target_p1"}, {}};
  DataSeries inf{{"s", "infidelity"}, {}};
  for (size_t i = 0; i < traj.s_grid.size(); ++i) {
    pop.rows.push_back({traj.s_grid[i], traj.populations[i][0], traj.populations[i][1],
                        std::norm(targets[i][0]), std::norm(targets[i][1])});
    inf.rows.push_back({traj.s_grid[i], traj.infidelity_series[i]});
  }
  rs.series["populations"] = std::move(pop);
  rs.series["infidelity"] = std::move(inf);

  json meta = base_metadata(cfg);
  meta["omega"] = omega;
  meta["n_periods"] = sched.n_periods();
  meta["mode"] = cfg.mode == ScheduleMode::Standalone ? "standalone" : "ontop";
  meta["final_infidelity"] = traj.final_infidelity;
  meta["cert_delta"] = traj.cert_delta;
  rs.metadata_json = meta.dump(2);
  return rs;
}

// ---------------------------------------------------------------------------
// duration sweeps (standalone / on-top)

ResultSet run_duration_sweep(const ExperimentConfig& cfg, ScheduleMode mode) {
  const std::vector<double> taus = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.tau_points);

  struct Point {
    bool feasible = false;
    ResultRow row;
  };

  ResultSet rs;
  json meta = base_metadata(cfg);
  json curves = json::array();

  // adiabatic comparator
  {
    std::vector<Point> pts(taus.size());
    std::vector<double> tails(taus.size());
    parallel_for(static_cast<int>(taus.size()), cfg.threads, [&](int i) {
      ModelParams p = cfg.params;
      p.tau = taus[i];
      const ECDSchedule sched = ECDSchedule::uncorrected(lzm(p));
      PropagateOptions opts;
      opts.min_steps = uncorrected_steps(cfg, p.tau);
      opts.output_points = 201;
      const Trajectory traj = propagate(sched, ground_state(evaluate_H(sched.base, 0.0)), opts);
      Point pt;
      pt.feasible = true;
      pt.row = {"tau adiabatic", p.tau, traj.final_infidelity,
                strength(sched, Component::Base, cfg.convention), 0.0,
                integral_norm(sched, Component::Total, cfg.convention), 0, traj.cert_delta};
      pts[i] = pt;
      tails[i] = traj.tail_avg_infidelity;
    });
    DataSeries ds{{"tau", "infidelity", "tail_avg", "lz_formula"}, {}};
    for (size_t i = 0; i < taus.size(); ++i) {
      rs.rows.push_back(pts[i].row);
      ModelParams p = cfg.params;
      p.tau = taus[i];
      ds.rows.push_back({taus[i], pts[i].row.infidelity, tails[i], lz_formula(p)});
    }
    rs.series["adiabatic"] = std::move(ds);
  }

  for (double k : cfg.k_list) {
    std::vector<Point> pts(taus.size());
    parallel_for(static_cast<int>(taus.size()), cfg.threads, [&](int i) {
      ModelParams p = cfg.params;
      p.tau = taus[i];
      Point pt;
      try {
        const OmegaBudget budget = max_omega_for_budget(
            [&](double w) { return synth_lzm(cfg, p, w, mode); }, k, cfg.convention);
        const ECDSchedule sched = synth_lzm(cfg, p, budget.omega_snapped, mode);
        PropagateOptions opts;
        opts.steps_per_period = cfg.steps_per_period;
        opts.output_points = 2;
        const Trajectory traj =
            propagate(sched, ground_state(evaluate_H(sched.base, 0.0)), opts);
        pt.feasible = true;
        pt.row = {"tau k=" + format_k(k), p.tau, traj.final_infidelity,
                  strength(sched, Component::Base, cfg.convention),
                  strength(sched, Component::Correction, cfg.convention),
                  integral_norm(sched, Component::Total, cfg.convention), budget.n_periods,
                  traj.cert_delta};
      } catch (const BudgetError&) {
        pt.feasible = false;  // no N_T >= 1 under this budget; point skipped
      }
      pts[i] = pt;
    });

    DataSeries ds{{"tau", "infidelity", "n_periods"}, {}};
    std::vector<double> infs;
    int skipped = 0;
    for (const auto& pt : pts) {
      if (!pt.feasible) {
        ++skipped;
        continue;
      }
      rs.rows.push_back(pt.row);
      ds.rows.push_back({pt.row.value, pt.row.infidelity,
                         static_cast<double>(pt.row.n_periods)});
      infs.push_back(pt.row.infidelity);
    }
    if (mode == ScheduleMode::OnTop) {
      // smoothing used for presentation of the strongly oscillating curve
      const auto smooth = moving_average20(infs);
      ds.columns.push_back("smoothed");
      for (size_t i = 0; i < smooth.size(); ++i) ds.rows[i].push_back(smooth[i]);
    }
    const std::string stem =
        (mode == ScheduleMode::OnTop ? "ontop_k" : "standalone_k") + format_k(k);
    rs.series[stem] = std::move(ds);
    curves.push_back({{"k", k}, {"infeasible_points", skipped}});
  }

  sort_rows(rs);
  meta["curves"] = curves;
  rs.metadata_json = meta.dump(2);
  return rs;
}

// ---------------------------------------------------------------------------
// integral-norm comparison

ResultSet run_intnorm(const ExperimentConfig& cfg) {
  ResultSet rs;
  json meta = base_metadata(cfg);

  const std::vector<double> taus = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.tau_points);
  std::vector<ResultRow> adiab(taus.size());
  parallel_for(static_cast<int>(taus.size()), cfg.threads, [&](int i) {
    ModelParams p = cfg.params;
    p.tau = taus[i];
    const ECDSchedule sched = ECDSchedule::uncorrected(lzm(p));
    PropagateOptions opts;
    opts.min_steps = uncorrected_steps(cfg, p.tau);
    opts.output_points = 2;
    const Trajectory traj = propagate(sched, ground_state(evaluate_H(sched.base, 0.0)), opts);
    adiab[i] = {"intnorm adiabatic", p.tau, traj.final_infidelity,
                strength(sched, Component::Base, cfg.convention), 0.0,
                integral_norm(sched, Component::Total, cfg.convention), 0, traj.cert_delta};
  });

  // geometric grid of integer period counts, deduplicated
  std::vector<int> nts;
  for (double x : geometric_grid(cfg.nt_min, cfg.nt_max, cfg.nt_points)) {
    const int nt = std::max(1, static_cast<int>(std::llround(x)));
    if (nts.empty() || nts.back() != nt) nts.push_back(nt);
  }
  ModelParams pe = cfg.params;
  pe.tau = cfg.ecd_tau;
  std::vector<ResultRow> ecd(nts.size());
  parallel_for(static_cast<int>(nts.size()), cfg.threads, [&](int i) {
    const double omega = 2.0 * M_PI * nts[i] / pe.tau;
    const ECDSchedule sched = synth_lzm(cfg, pe, omega, ScheduleMode::Standalone);
    PropagateOptions opts;
    opts.steps_per_period = cfg.steps_per_period;
    opts.output_points = 2;
    const Trajectory traj = propagate(sched, ground_state(evaluate_H(sched.base, 0.0)), opts);
    ecd[i] = {"intnorm ecd", omega, traj.final_infidelity,
              strength(sched, Component::Base, cfg.convention),
              strength(sched, Component::Correction, cfg.convention),
              integral_norm(sched, Component::Total, cfg.convention), nts[i], traj.cert_delta};
  });

  DataSeries da{{"integral_norm", "infidelity", "tau"}, {}};
  for (const auto& r : adiab) {
    rs.rows.push_back(r);
    da.rows.push_back({r.integral_norm, r.infidelity, r.value});
  }
  DataSeries de{{"integral_norm", "infidelity", "n_periods"}, {}};
  for (const auto& r : ecd) {
    rs.rows.push_back(r);
    de.rows.push_back({r.integral_norm, r.infidelity, static_cast<double>(r.n_periods)});
  }
  rs.series["intnorm_adiabatic"] = std::move(da);
  rs.series["intnorm_ecd"] = std::move(de);

  // property: within the overlapping x-range the corrected curve lies below
  // the log-log interpolated adiabatic one
  bool all_below = true;
  int compared = 0;
  const auto& A = rs.series["intnorm_adiabatic"].rows;
  for (const auto& e : rs.series["intnorm_ecd"].rows) {
    const double x = e[0];
    if (x < A.front()[0] || x > A.back()[0]) continue;
    for (size_t j = 1; j < A.size(); ++j) {
      if (A[j][0] >= x) {
        const double w = std::log(x / A[j - 1][0]) / std::log(A[j][0] / A[j - 1][0]);
        const double ia =
            std::exp((1.0 - w) * std::log(A[j - 1][1]) + w * std::log(A[j][1]));
        ++compared;
        if (e[1] >= ia) all_below = false;
        break;
      }
    }
  }
  meta["ecd_below_adiabatic"] = all_below;
  meta["compared_points"] = compared;
  meta["ecd_tau"] = cfg.ecd_tau;

  sort_rows(rs);
  rs.metadata_json = meta.dump(2);
  return rs;
}

// ---------------------------------------------------------------------------
// two-qubit entangler

ResultSet run_two_qubit(const ExperimentConfig& cfg) {
  const ControlSystem sys = two_qubit(cfg.params);
  const double omega = resolve_omega(cfg, cfg.params.tau);
  const ECDSchedule sched = synth_two_qubit(sys, two_qubit_fcd(cfg.params), omega, cfg.mode);

  PropagateOptions opts;
  opts.steps_per_period = cfg.steps_per_period;
  const StateVector psi0 = ground_state(evaluate_H(sys, 0.0));
  const Trajectory ecd_traj = propagate(sched, psi0, opts);

  const ECDSchedule plain = ECDSchedule::uncorrected(sys);
  PropagateOptions aopts;
  aopts.min_steps = uncorrected_steps(cfg, cfg.params.tau);
  const Trajectory adiab_traj = propagate(plain, psi0, aopts);

  const auto targets = adiabatic_path(sys, ecd_traj.s_grid, 0);

  ResultSet rs;
  append_run_row(rs, cfg, "ecd", cfg.params.tau, sched, ecd_traj);
  append_run_row(rs, cfg, "adiabatic", cfg.params.tau, plain, adiab_traj);
  sort_rows(rs);

  DataSeries pop{{"s", "p00", "p01", "p10", "p11", "target_p00", "target_p11"}, {}};
  double sector_max = 0.0;
  for (size_t i = 0; i < ecd_traj.s_grid.size(); ++i) {
    const auto& p = ecd_traj.populations[i];
    sector_max = std::max(sector_max, p[1] + p[2]);
    pop.rows.push_back({ecd_traj.s_grid[i], p[0], p[1], p[2], p[3],
                        std::norm(targets[i][0]), std::norm(targets[i][3])});
  }
  rs.series["populations_ecd"] = std::move(pop);

  DataSeries pa{{"s", "p00", "p01", "p10", "p11"}, {}};
  for (size_t i = 0; i < adiab_traj.s_grid.size(); ++i) {
    const auto& p = adiab_traj.populations[i];
    pa.rows.push_back({adiab_traj.s_grid[i], p[0], p[1], p[2], p[3]});
  }
  rs.series["populations_adiabatic"] = std::move(pa);

  DataSeries inf{{"s", "infidelity_ecd", "infidelity_adiabatic"}, {}};
  for (size_t i = 0; i < ecd_traj.s_grid.size(); ++i)
    inf.rows.push_back({ecd_traj.s_grid[i], ecd_traj.infidelity_series[i],
                        adiab_traj.infidelity_series[i]});
  rs.series["infidelity"] = std::move(inf);

  json meta = base_metadata(cfg);
  meta["omega"] = omega;
  meta["n_periods"] = sched.n_periods();
  meta["ecd_final_infidelity"] = ecd_traj.final_infidelity;
  meta["adiabatic_final_infidelity"] = adiab_traj.final_infidelity;
  meta["decoupled_sector_population_max"] = sector_max;
  meta["strength_ratio"] =
      strength(sched, Component::Correction, cfg.convention) /
      strength(sched, Component::Base, cfg.convention);
  rs.metadata_json = meta.dump(2);
  return rs;
}

// ---------------------------------------------------------------------------
// three-level cascade

ResultSet run_three_level(const ExperimentConfig& cfg) {
  const ControlSystem sys = three_level(cfg.params);
  const auto f12 = [sys](double s) { return three_level_cd(sys, s).f12; };
  const auto f23 = [sys](double s) { return three_level_cd(sys, s).f23; };
  const auto f13 = [sys](double s) { return three_level_cd(sys, s).f13; };

  const double k = cfg.k_list.empty() ? 1.0 : cfg.k_list.front();
  const OmegaBudget budget = max_omega_for_budget(
      [&](double w) { return synth_three_level(sys, f12, f23, f13, w, cfg.mode); }, k,
      cfg.convention);
  const ECDSchedule sched =
      synth_three_level(sys, f12, f23, f13, budget.omega_snapped, cfg.mode);

  PropagateOptions opts;
  opts.steps_per_period = cfg.steps_per_period;
  const StateVector psi0 = ground_state(evaluate_H(sys, 0.0));
  const Trajectory ecd_traj = propagate(sched, psi0, opts);

  const ECDSchedule plain = ECDSchedule::uncorrected(sys);
  PropagateOptions aopts;
  aopts.min_steps = uncorrected_steps(cfg, cfg.params.tau);
  const Trajectory adiab_traj = propagate(plain, psi0, aopts);

  ResultSet rs;
  append_run_row(rs, cfg, "ecd", cfg.params.tau, sched, ecd_traj);
  append_run_row(rs, cfg, "adiabatic", cfg.params.tau, plain, adiab_traj);

  // equal-infidelity speedup: smallest scanned duration at which the plain
  // protocol matches the corrected run's final infidelity
  const std::vector<double> taus = geometric_grid(cfg.tau_min, cfg.tau_max, cfg.tau_points);
  std::vector<ResultRow> scan(taus.size());
  parallel_for(static_cast<int>(taus.size()), cfg.threads, [&](int i) {
    ModelParams p = cfg.params;
    p.tau = taus[i];
    const ECDSchedule s2 = ECDSchedule::uncorrected(three_level(p));
    PropagateOptions o2;
    o2.min_steps = uncorrected_steps(cfg, p.tau);
    o2.output_points = 2;
    const Trajectory t2 = propagate(s2, ground_state(evaluate_H(s2.base, 0.0)), o2);
    scan[i] = {"adiabatic scan", p.tau, t2.final_infidelity,
               strength(s2, Component::Base, cfg.convention), 0.0,
               integral_norm(s2, Component::Total, cfg.convention), 0, t2.cert_delta};
  });
  double speedup = 0.0;
  for (const auto& r : scan) {
    rs.rows.push_back(r);
    if (speedup == 0.0 && r.infidelity <= ecd_traj.final_infidelity)
      speedup = r.value / cfg.params.tau;
  }

  const auto targets = adiabatic_path(sys, ecd_traj.s_grid, 0);
  DataSeries pop{{"s", "p1_ecd", "p2_ecd", "p3_ecd", "p1_target", "p2_target", "p3_target"}, {}};
  for (size_t i = 0; i < ecd_traj.s_grid.size(); ++i) {
    const auto& p = ecd_traj.populations[i];
    pop.rows.push_back({ecd_traj.s_grid[i], p[0], p[1], p[2], std::norm(targets[i][0]),
                        std::norm(targets[i][1]), std::norm(targets[i][2])});
  }
  rs.series["populations_ecd"] = std::move(pop);

  DataSeries pa{{"s", "p1", "p2", "p3"}, {}};
  for (size_t i = 0; i < adiab_traj.s_grid.size(); ++i) {
    const auto& p = adiab_traj.populations[i];
    pa.rows.push_back({adiab_traj.s_grid[i], p[0], p[1], p[2]});
  }
  rs.series["populations_adiabatic"] = std::move(pa);

  sort_rows(rs);
  json meta = base_metadata(cfg);
  meta["d"] = cfg.params.d;
  meta["k"] = k;
  meta["omega"] = budget.omega_snapped;
  meta["n_periods"] = budget.n_periods;
  meta["ecd_final_infidelity"] = ecd_traj.final_infidelity;
  meta["adiabatic_final_infidelity"] = adiab_traj.final_infidelity;
  meta["equal_infidelity_speedup"] = speedup;  // 0 when never reached in the scan
  rs.metadata_json = meta.dump(2);
  return rs;
}

}  // namespace

// ---------------------------------------------------------------------------
// robustness

ResultSet robustness_sweep(const ExperimentConfig& cfg) {
  const double omega = resolve_omega(cfg, cfg.params.tau);
  const ControlSystem sys = lzm(cfg.params);
  const ScalarFn fcd = lzm_fcd(cfg.params);

  const auto run_offset = [&](double amp_delta, double phase_delta) {
    ECDSchedule sched = synth_su2_first_order(sys, fcd, omega, cfg.mode);
    perturb_sin_channel(sched, 0, amp_delta, phase_delta);
    PropagateOptions opts;
    opts.steps_per_period = cfg.steps_per_period;
    opts.output_points = 2;
    const Trajectory traj = propagate(sched, ground_state(evaluate_H(sys, 0.0)), opts);
    return std::pair<double, double>(1.0 - traj.final_infidelity, traj.cert_delta);
  };

  const double f0 = run_offset(0.0, 0.0).first;

  const std::vector<double> deltas = geometric_grid(cfg.delta_min, cfg.delta_max, cfg.delta_points);
  struct Pt {
    double delta, fidelity, cert;
  };
  // four branches: (amplitude|phase) x (sign)
  std::vector<Pt> amp_p(deltas.size()), amp_m(deltas.size()), ph_p(deltas.size()),
      ph_m(deltas.size());
  parallel_for(static_cast<int>(deltas.size()) * 4, cfg.threads, [&](int idx) {
    const int i = idx % static_cast<int>(deltas.size());
    const int branch = idx / static_cast<int>(deltas.size());
    const double d = deltas[i];
    switch (branch) {
      case 0: { auto r = run_offset(d, 0.0); amp_p[i] = {d, r.first, r.second}; break; }
      case 1: { auto r = run_offset(-d, 0.0); amp_m[i] = {-d, r.first, r.second}; break; }
      case 2: { auto r = run_offset(0.0, d); ph_p[i] = {d, r.first, r.second}; break; }
      case 3: { auto r = run_offset(0.0, -d); ph_m[i] = {-d, r.first, r.second}; break; }
    }
  });

  ResultSet rs;
  const auto emit = [&](const char* name, const std::vector<Pt>& pts) {
    for (const auto& p : pts)
      rs.rows.push_back({name, p.delta, 1.0 - p.fidelity, 0.0, 0.0, 0.0, 0, p.cert});
  };
  emit("delta amplitude", amp_m);
  emit("delta amplitude", amp_p);
  emit("delta phase", ph_m);
  emit("delta phase", ph_p);
  sort_rows(rs);

  const auto rel_err = [&](const Pt& p) { return std::abs(1.0 - p.fidelity / f0); };
  DataSeries da{{"delta", "rel_error"}, {}};
  for (auto it = amp_m.rbegin(); it != amp_m.rend(); ++it) da.rows.push_back({it->delta, rel_err(*it)});
  for (const auto& p : amp_p) da.rows.push_back({p.delta, rel_err(p)});
  DataSeries dp{{"delta", "rel_error"}, {}};
  for (auto it = ph_m.rbegin(); it != ph_m.rend(); ++it) dp.rows.push_back({it->delta, rel_err(*it)});
  for (const auto& p : ph_p) dp.rows.push_back({p.delta, rel_err(p)});
  rs.series["robustness_amplitude"] = std::move(da);
  rs.series["robustness_phase"] = std::move(dp);

  // slope fits over the configured |delta| window (positive branch)
  std::vector<double> xs, ya, yp;
  for (size_t i = 0; i < deltas.size(); ++i) {
    xs.push_back(deltas[i]);
    ya.push_back(rel_err(amp_p[i]));
    yp.push_back(rel_err(ph_p[i]));
  }
  const LinearFit fa = fit_loglog(xs, ya);
  const LinearFit fp = fit_loglog(xs, yp);
  double sym = 0.0;
  for (size_t i = 0; i < deltas.size(); ++i)
    sym = std::max(sym, std::abs(rel_err(ph_p[i]) - rel_err(ph_m[i])));

  json meta = base_metadata(cfg);
  meta["omega"] = omega;
  meta["base_fidelity"] = f0;
  meta["amplitude_slope"] = fa.slope;
  meta["amplitude_fit_r2"] = fa.r2;
  meta["phase_slope"] = fp.slope;
  meta["phase_fit_r2"] = fp.r2;
  meta["phase_sign_asymmetry"] = sym;
  rs.metadata_json = meta.dump(2);
  return rs;
}

// ---------------------------------------------------------------------------
// stroboscopic scaling order

ResultSet scaling_order_experiment(const ExperimentConfig& cfg) {
  const ModelParams p = cfg.params;
  const ControlSystem sys = lzm(p);
  const ScalarFn fcd = lzm_fcd(p);
  const double t0 = cfg.s0 * p.tau;

  // CD reference system: single sigma_y channel carrying f_CD(s)
  ControlSystem cd_sys;
  cd_sys.controls = ControlSet({pauli_y()}, {"sigma_y"});
  cd_sys.u = {fcd};
  cd_sys.du = {[](double) { return 0.0; }};
  cd_sys.tau = p.tau;
  const ECDSchedule cd_sched = ECDSchedule::uncorrected(cd_sys);

  const std::vector<double> Ts = geometric_grid(cfg.t_min, cfg.t_max, cfg.t_points);
  const StateVector gs = ground_state(evaluate_H(sys, cfg.s0));
  const int seg_steps = std::max(256, cfg.steps_per_period);

  std::vector<ResultRow> rows(Ts.size());
  parallel_for(static_cast<int>(Ts.size()), cfg.threads, [&](int i) {
    const double T = Ts[i];
    const double omega = 2.0 * M_PI / T;
    const double fm = fcd((t0 + 0.5 * T) / p.tau);
    const double a = std::sqrt(std::abs(fm));
    const double b = (fm >= 0 ? 1.0 : -1.0) * a;

    ECDSchedule es;
    es.base = sys;
    es.mode = ScheduleMode::Standalone;
    es.has_correction = true;
    es.channel_map = {0, 1};
    es.ansatz.omega = omega;
    es.ansatz.scaling_exponent = 0.5;
    es.ansatz.t_origin = t0;
    es.ansatz.harmonics = cfg.order == SynthOrder::Third ? 2 : 1;
    es.ansatz.channels.resize(2);
    es.ansatz.channels[0].A = {[a](double) { return a; }};
    es.ansatz.channels[0].B = {nullptr};
    es.ansatz.channels[1].A = {nullptr};
    es.ansatz.channels[1].B = {[b](double) { return b; }};
    if (cfg.order == SynthOrder::Third) {
      es.ansatz.channels[0].A.push_back([a](double) { return -4.0 * a; });
      es.ansatz.channels[0].B.push_back(nullptr);
      es.ansatz.channels[1].A.push_back(nullptr);
      es.ansatz.channels[1].B.push_back(nullptr);
    }

    const double s1 = cfg.s0 + T / p.tau;
    const StateVector pe = propagate_state(es, gs, seg_steps, cfg.s0, s1);
    const StateVector pc = propagate_state(cd_sched, gs, seg_steps, cfg.s0, s1);
    const StateVector pe2 = propagate_state(es, gs, 2 * seg_steps, cfg.s0, s1);
    const StateVector pc2 = propagate_state(cd_sched, gs, 2 * seg_steps, cfg.s0, s1);
    const double infid_coarse = 1.0 - std::norm(dot(pc, pe));
    const double infid_fine = 1.0 - std::norm(dot(pc2, pe2));

    rows[i] = {"period", T, std::max(infid_fine, 0.0), 0.0, 0.0, 0.0, 1,
               std::abs(infid_fine - infid_coarse)};
  });

  ResultSet rs;
  DataSeries ds{{"T", "infidelity"}, {}};
  std::vector<double> xs, ys;
  constexpr double kFloor = 1e-12;  // below this the 1-|<.,.>|^2 subtraction is noise
  for (const auto& r : rows) {
    rs.rows.push_back(r);
    ds.rows.push_back({r.value, r.infidelity});
    if (r.infidelity > kFloor && r.cert_delta < 1e-8) {
      xs.push_back(r.value);
      ys.push_back(r.infidelity);
    }
  }
  rs.series["scaling"] = std::move(ds);
  sort_rows(rs);

  const LinearFit fit = fit_loglog(xs, ys);
  json meta = base_metadata(cfg);
  meta["order"] = cfg.order == SynthOrder::Third ? "third" : "first";
  meta["s0"] = cfg.s0;
  meta["slope"] = fit.slope;
  meta["fit_r2"] = fit.r2;
  meta["fit_points"] = fit.points;
  meta["fit_flagged"] = fit.r2 < 0.99;
  meta["predicted_exponent"] = infidelity_order(cfg.order == SynthOrder::Third ? 2 : 1);
  rs.metadata_json = meta.dump(2);
  return rs;
}

ResultSet run(const ExperimentConfig& config) {
  switch (config.experiment) {
    case Experiment::LzmDynamics: return run_lzm_dynamics(config);
    case Experiment::EcdDynamics: return run_ecd_dynamics(config);
    case Experiment::StandaloneSweep: return run_duration_sweep(config, ScheduleMode::Standalone);
    case Experiment::OntopSweep: return run_duration_sweep(config, ScheduleMode::OnTop);
    case Experiment::IntnormSweep: return run_intnorm(config);
    case Experiment::TwoQubit: return run_two_qubit(config);
    case Experiment::ThreeLevel: return run_three_level(config);
    case Experiment::Robustness: return robustness_sweep(config);
    case Experiment::ScalingOrder: return scaling_order_experiment(config);
  }
  throw std::logic_error("run: bad experiment");
}

}  // namespace ecd
