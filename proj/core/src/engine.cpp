#include "ecd/engine.hpp"

#include <algorithm>
#include <cmath>

namespace ecd {

namespace {

// Fourth-order commutator-free coefficients (two Gauss nodes).
constexpr double kNode1 = 0.5 - 0.28867513459481287;  // 1/2 - sqrt(3)/6
constexpr double kNode2 = 0.5 + 0.28867513459481287;
constexpr double kWPlus = 0.25 + 0.28867513459481287;  // 1/4 + sqrt(3)/6
constexpr double kWMinus = 0.25 - 0.28867513459481287;

StateVector cf4_run(const ECDSchedule& sched, StateVector psi, int steps, double s0, double s1,
                    const std::function<void(int, double, const StateVector&)>& observer) {
  const double tau = sched.base.tau;
  const double h = (s1 - s0) / steps;
  if (observer) observer(0, s0, psi);
  for (int n = 0; n < steps; ++n) {
    const double s = s0 + n * h;
    const CMatrix h1 = sched.hamiltonian(s + kNode1 * h);
    const CMatrix h2 = sched.hamiltonian(s + kNode2 * h);
    const CMatrix g1 = kWPlus * h1 + kWMinus * h2;   // first (right) exponential
    const CMatrix g2 = kWMinus * h1 + kWPlus * h2;   // second (left) exponential
    psi = mat_vec(expm_skew(tau * g1, h), psi);
    psi = mat_vec(expm_skew(tau * g2, h), psi);
    if (observer) observer(n + 1, s0 + (n + 1) * h, psi);
  }
  return psi;
}

int choose_steps(const ECDSchedule& sched, const PropagateOptions& opts) {
  if (sched.has_correction) {
    const int spp = std::max(32, opts.steps_per_period);
    const int nt = std::max(1, sched.n_periods());
    return spp * nt;
  }
  return std::max(1000, opts.min_steps);
}

}  // namespace

double infidelity(const StateVector& psi, const StateVector& gs) {
  const double p = std::norm(dot(gs, psi));
  return std::min(1.0, std::max(0.0, 1.0 - p));
}

StateVector ground_state(const CMatrix& h, int level) {
  const EigSystem es = hermitian_eig(h);
  StateVector v(h.dim());
  for (int i = 0; i < h.dim(); ++i) v[i] = es.vectors(i, level);
  return v;
}

StateVector propagate_state(const ECDSchedule& sched, const StateVector& psi0, int steps,
                            double s_begin, double s_end) {
  return cf4_run(sched, psi0, steps, s_begin, s_end, nullptr);
}

Trajectory propagate(const ECDSchedule& sched, const StateVector& psi0,
                     const PropagateOptions& opts) {
  if (std::abs(norm(psi0) - 1.0) > 1e-9)
    throw std::invalid_argument("propagate: psi0 must be unit norm");

  const int steps = choose_steps(sched, opts);
  const int n_out = std::max(2, std::min(opts.output_points, steps + 1));

  // Output indices on the step grid, endpoints always included.
  std::vector<int> out_idx(n_out);
  for (int i = 0; i < n_out; ++i)
    out_idx[i] = static_cast<int>(std::llround(static_cast<double>(i) * steps / (n_out - 1)));

  Trajectory traj;
  traj.s_grid.reserve(n_out);
  traj.states.reserve(n_out);

  size_t next = 0;
  const auto observer = [&](int step, double s, const StateVector& psi) {
    if (next < out_idx.size() && step == out_idx[next]) {
      traj.s_grid.push_back(s);
      traj.states.push_back(psi);
      ++next;
    }
  };
  cf4_run(sched, psi0, steps, opts.s_begin, opts.s_end, observer);

  const int dim = sched.base.dim();
  for (size_t i = 0; i < traj.states.size(); ++i) {
    const StateVector& psi = traj.states[i];
    std::vector<double> pops(dim);
    for (int j = 0; j < dim; ++j) pops[j] = std::norm(psi[j]);
    traj.populations.push_back(std::move(pops));
    traj.infidelity_series.push_back(
        infidelity(psi, ground_state(evaluate_H(sched.base, traj.s_grid[i]))));
  }
  traj.final_infidelity = traj.infidelity_series.back();

  const double tail_from = opts.s_begin + 0.9 * (opts.s_end - opts.s_begin);
  double acc = 0.0;
  int cnt = 0;
  for (size_t i = 0; i < traj.s_grid.size(); ++i) {
    if (traj.s_grid[i] >= tail_from - 1e-12) {
      acc += traj.infidelity_series[i];
      ++cnt;
    }
  }
  traj.tail_avg_infidelity = cnt ? acc / cnt : traj.final_infidelity;

  if (opts.check_certificate) {
    const StateVector fine =
        cf4_run(sched, psi0, 2 * steps, opts.s_begin, opts.s_end, nullptr);
    const double i_fine = infidelity(fine, ground_state(evaluate_H(sched.base, opts.s_end)));
    traj.cert_delta = std::abs(i_fine - traj.final_infidelity);
    traj.certified = traj.cert_delta < opts.cert_tol;
  } else {
    traj.certified = true;
  }
  return traj;
}

namespace {

CMatrix component_matrix(const ECDSchedule& sched, Component component, double s) {
  switch (component) {
    case Component::Base:
      return evaluate_H(sched.base, s);
    case Component::Correction:
      return sched.correction(s);
    case Component::Total:
      return sched.hamiltonian(s);
  }
  throw std::logic_error("component_matrix: bad component");
}

int sampling_points(const ECDSchedule& sched, int samples) {
  const int per_period = sched.has_correction ? 8 * sched.n_periods() : 0;
  return std::max({samples, 1000, per_period}) + 1;
}

}  // namespace

double strength(const ECDSchedule& sched, Component component, NormConvention convention,
                int samples) {
  const int n = sampling_points(sched, samples);
  double best = 0.0;
  for (int i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    best = std::max(best, frobenius(component_matrix(sched, component, s), convention));
  }
  return best;
}

double integral_norm(const ECDSchedule& sched, Component component, NormConvention convention,
                     int samples) {
  const int n = sampling_points(sched, samples);
  double acc = 0.0;
  double prev = frobenius(component_matrix(sched, component, 0.0), convention);
  for (int i = 1; i < n; ++i) {
    const double s = static_cast<double>(i) / (n - 1);
    const double cur = frobenius(component_matrix(sched, component, s), convention);
    acc += 0.5 * (prev + cur) / (n - 1);
    prev = cur;
  }
  return sched.base.tau * acc;
}

OmegaBudget max_omega_for_budget(const std::function<ECDSchedule(double)>& make_schedule,
                                 double k, NormConvention convention, double rel_tol) {
  if (!(k > 0.0)) throw BudgetError("max_omega_for_budget: budget factor k must be positive");

  const auto corr_strength = [&](double omega) {
    const ECDSchedule sched = make_schedule(omega);
    return strength(sched, Component::Correction, convention);
  };

  // Probe at the smallest omega the template accepts (grows until one period fits).
  double probe_omega = 1.0;
  ECDSchedule probe = [&] {
    for (int i = 0; i < 80; ++i) {
      try {
        return make_schedule(probe_omega);
      } catch (const BudgetError&) {
        probe_omega *= 2.0;
      }
    }
    throw BudgetError("max_omega_for_budget: schedule template rejected every probe omega");
  }();
  const double s_base = strength(probe, Component::Base, convention);
  const double budget = k * s_base;
  const double tau = probe.base.tau;

  double lo = 2.0 * M_PI / tau;  // one full period
  if (corr_strength(lo) > budget)
    throw BudgetError("max_omega_for_budget: budget admits no omega with N_T >= 1");

  double hi = lo;
  for (int i = 0; i < 80 && corr_strength(hi) <= budget; ++i) hi *= 2.0;
  if (corr_strength(hi) <= budget)
    throw BudgetError("max_omega_for_budget: budget did not bound omega");

  while ((hi - lo) > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (corr_strength(mid) <= budget ? lo : hi) = mid;
  }

  OmegaBudget out;
  out.omega_max = lo;
  const SnappedOmega snap = snap_omega(lo, tau);
  out.n_periods = snap.n_periods;
  out.omega_snapped = snap.omega;
  if (out.n_periods < 1)
    throw BudgetError("max_omega_for_budget: budget admits no omega with N_T >= 1");
  return out;
}

}  // namespace ecd
