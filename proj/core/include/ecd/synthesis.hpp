#pragma once

#include <functional>
#include <vector>

#include "ecd/cdfield.hpp"
#include "ecd/fourier.hpp"

namespace ecd {

enum class ScheduleMode {
  Standalone,  // apply H_E alone
  OnTop,       // apply H + H_E
};

class BudgetError : public std::runtime_error {
 public:
  explicit BudgetError(const std::string& what) : std::runtime_error(what) {}
};

// A driven run: the base system plus (optionally) an oscillating correction
// H_E(s) = sum_k c_k(s, t = s tau) H_{map(k)} built from channels of the base
// control set. The engine integrates i dU/ds = tau * hamiltonian(s) U.
struct ECDSchedule {
  ControlSystem base;
  FourierAnsatz ansatz;
  std::vector<int> channel_map;  // ansatz channel -> base control index
  ScheduleMode mode = ScheduleMode::Standalone;
  bool has_correction = false;

  static ECDSchedule uncorrected(ControlSystem base_system);

  int n_periods() const { return has_correction ? ansatz.n_periods(base.tau) : 0; }

  CMatrix correction(double s) const;   // H_E(s); zero matrix when absent
  CMatrix hamiltonian(double s) const;  // field the engine integrates
};

// First-order su(2)-style synthesis: sine on channel `sin_channel`, cosine on
// channel `cos_channel`, envelope sqrt(|f_CD|), the sign of f_CD carried by
// the cosine channel. Emulates the CD field to first order per period.
// Requires at least one full oscillation period in [0,1] (N_T >= 1).
ECDSchedule synth_su2_first_order(ControlSystem base, const ScalarFn& fcd, double omega,
                                  ScheduleMode mode = ScheduleMode::Standalone,
                                  int sin_channel = 0, int cos_channel = 1);

// As above plus a second-harmonic sine term of amplitude -4 A on the sine
// channel, cancelling the third Magnus term of the correction per period.
ECDSchedule synth_su2_third_order(ControlSystem base, const ScalarFn& fcd, double omega,
                                  ScheduleMode mode = ScheduleMode::Standalone,
                                  int sin_channel = 0, int cos_channel = 1);

// Two-qubit schedule: c1 = -sqrt(|f| w) cos(w s tau) on the local channel,
// c2 = +sqrt(|f| w) sin(w s tau) on the interaction channel.
ECDSchedule synth_two_qubit(ControlSystem base, const ScalarFn& fcd, double omega,
                            ScheduleMode mode = ScheduleMode::Standalone);

// Three-level schedule on channels (coupling12, coupling23, sweep):
//   c1 = A cos(wt) - B cos(2wt),  c2 = C sin(wt) - D cos(3wt),
//   c3 = B sin(2wt) + D sin(3wt),
// with A = -sign(f13) sqrt(2|f13|), B = 2 sqrt(|f12|), C = sqrt(2|f13|),
// D = sqrt(6|f23|). f12 and f23 must be <= 0 on [0,1]; a sign violation is a
// hard error.
ECDSchedule synth_three_level(ControlSystem base, const ScalarFn& fcd12, const ScalarFn& fcd23,
                              const ScalarFn& fcd13, double omega,
                              ScheduleMode mode = ScheduleMode::Standalone);

// Amplitude/phase offsets of a sine channel (robustness studies):
//   sin(w s tau) -> (1 + amp_delta) sin(w s tau + 2 pi phase_delta).
// Rewrites the first-harmonic envelopes of `channel` in place.
void perturb_sin_channel(ECDSchedule& schedule, int channel, double amp_delta,
                         double phase_delta);

// Per-period least-squares synthesis against arbitrary targets.
// targets[n] is the first CD Magnus term -i int_{period n} H_CD dt
// (skew-Hermitian). Active commutator directions [H_k, H_l] get one harmonic
// each, sine on the earlier channel, cosine (carrying the sign) on the later
// one; amplitudes are interpolated linearly across period midpoints. A target
// component outside the span of reachable directions above `tol` is an error
// naming the residual.
struct ConstraintSolution {
  FourierAnsatz ansatz;
  std::vector<int> channel_map;
  std::vector<double> period_residuals;  // norm of unreachable component per period
};

ConstraintSolution solve_constraints_numeric(const std::vector<CMatrix>& targets,
                                             const ControlSet& channels, double omega,
                                             int harmonics, double tau, double tol = 1e-8);

// Coefficient of [H_k, H_l] in the frozen-envelope second Magnus term of a
// schedule over one period (envelopes held at s). Used to compare syntheses.
double pair_content(const FourierAnsatz& ansatz, const std::vector<int>& channel_map,
                    double s, int base_k, int base_l, double period);

}  // namespace ecd
