#pragma once

#include <functional>
#include <vector>

#include "ecd/synthesis.hpp"

namespace ecd {

class NumericsError : public std::runtime_error {
 public:
  explicit NumericsError(const std::string& what) : std::runtime_error(what) {}
};

// One propagated run. Infidelity series is measured against the instantaneous
// ground state of the base Hamiltonian on the output grid; the tail average
// covers the final 10% of that grid.
struct Trajectory {
  std::vector<double> s_grid;
  std::vector<StateVector> states;
  std::vector<std::vector<double>> populations;  // per grid point, per bare state
  std::vector<double> infidelity_series;
  double final_infidelity = 0.0;
  double tail_avg_infidelity = 0.0;
  double cert_delta = 0.0;  // |final infidelity shift| under step halving
  bool certified = false;
};

struct PropagateOptions {
  int steps_per_period = 64;   // when a correction oscillates (floor 32)
  int min_steps = 2000;        // uncorrected runs
  int output_points = 401;
  double s_begin = 0.0;
  double s_end = 1.0;
  double cert_tol = 1e-8;
  bool check_certificate = true;  // run the step-halving certificate
};

// Propagates i dpsi/ds = tau * H(s) psi with the 4th-order commutator-free
// scheme (two midpoint-weighted exponentials per step, each computed through
// the eigendecomposition). The convergence certificate re-runs the final
// state at half step size and records the infidelity shift.
Trajectory propagate(const ECDSchedule& sched, const StateVector& psi0,
                     const PropagateOptions& opts = {});

// Plain final-state propagation without trajectory bookkeeping.
StateVector propagate_state(const ECDSchedule& sched, const StateVector& psi0, int steps,
                            double s_begin = 0.0, double s_end = 1.0);

double infidelity(const StateVector& psi, const StateVector& gs);

StateVector ground_state(const CMatrix& h, int level = 0);

enum class Component { Base, Correction, Total };

// max_t of the Frobenius norm of the chosen component, sampled on a uniform
// grid of at least max(samples, 1000) points refined to >= 8 per oscillation
// period.
double strength(const ECDSchedule& sched, Component component, NormConvention convention,
                int samples = 0);

// Trapezoidal integral of the norm over the run, tau * int_0^1 ||.|| ds,
// same sampling contract as strength().
double integral_norm(const ECDSchedule& sched, Component component, NormConvention convention,
                     int samples = 0);

struct OmegaBudget {
  double omega_max = 0.0;      // largest feasible omega (bisection, rel 1e-6)
  double omega_snapped = 0.0;  // 2 pi N_T / tau
  int n_periods = 0;
};

// Largest omega such that the correction built by `make_schedule` satisfies
// strength(correction) <= k * strength(base), then snapped down to an integer
// number of periods. Throws BudgetError when not even one period is feasible.
OmegaBudget max_omega_for_budget(const std::function<ECDSchedule(double)>& make_schedule,
                                 double k, NormConvention convention, double rel_tol = 1e-6);

}  // namespace ecd
