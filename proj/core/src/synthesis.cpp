#include "ecd/synthesis.hpp"

#include <cmath>
#include <memory>

namespace ecd {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

void require_periods(const FourierAnsatz& ansatz, double tau) {
  if (ansatz.n_periods(tau) < 1)
    throw BudgetError("omega too small: no full oscillation period fits in the run");
}

}  // namespace

ECDSchedule ECDSchedule::uncorrected(ControlSystem base_system) {
  base_system.validate();
  ECDSchedule s;
  s.base = std::move(base_system);
  s.has_correction = false;
  s.mode = ScheduleMode::OnTop;
  return s;
}

CMatrix ECDSchedule::correction(double s) const {
  CMatrix he(base.dim());
  if (!has_correction) return he;
  const double t = s * base.tau;
  for (size_t k = 0; k < ansatz.channels.size(); ++k)
    he += ansatz.channel_value(static_cast<int>(k), s, t) * base.controls.matrices[channel_map[k]];
  return he;
}

CMatrix ECDSchedule::hamiltonian(double s) const {
  if (!has_correction) return evaluate_H(base, s);
  if (mode == ScheduleMode::Standalone) return correction(s);
  return evaluate_H(base, s) + correction(s);
}

ECDSchedule synth_su2_first_order(ControlSystem base, const ScalarFn& fcd, double omega,
                                  ScheduleMode mode, int sin_channel, int cos_channel) {
  base.validate();
  if (sin_channel == cos_channel || sin_channel >= base.controls.size() ||
      cos_channel >= base.controls.size() || sin_channel < 0 || cos_channel < 0)
    throw std::invalid_argument("synth_su2_first_order: bad channel indices");

  ECDSchedule out;
  out.base = std::move(base);
  out.mode = mode;
  out.has_correction = true;
  out.channel_map = {sin_channel, cos_channel};
  out.ansatz.omega = omega;
  out.ansatz.harmonics = 1;
  out.ansatz.scaling_exponent = 0.5;
  out.ansatz.channels.resize(2);
  out.ansatz.channels[0].A = {[fcd](double s) { return std::sqrt(std::abs(fcd(s))); }};
  out.ansatz.channels[0].B = {nullptr};
  out.ansatz.channels[1].A = {nullptr};
  out.ansatz.channels[1].B = {[fcd](double s) { return sgn(fcd(s)) * std::sqrt(std::abs(fcd(s))); }};
  require_periods(out.ansatz, out.base.tau);
  return out;
}

ECDSchedule synth_su2_third_order(ControlSystem base, const ScalarFn& fcd, double omega,
                                  ScheduleMode mode, int sin_channel, int cos_channel) {
  ECDSchedule out =
      synth_su2_first_order(std::move(base), fcd, omega, mode, sin_channel, cos_channel);
  out.ansatz.harmonics = 2;
  out.ansatz.channels[0].A.push_back(
      [fcd](double s) { return -4.0 * std::sqrt(std::abs(fcd(s))); });
  out.ansatz.channels[0].B.push_back(nullptr);
  out.ansatz.channels[1].A.push_back(nullptr);
  out.ansatz.channels[1].B.push_back(nullptr);
  return out;
}

ECDSchedule synth_two_qubit(ControlSystem base, const ScalarFn& fcd, double omega,
                            ScheduleMode mode) {
  base.validate();
  if (base.controls.size() < 2)
    throw std::invalid_argument("synth_two_qubit: expected two control channels");

  ECDSchedule out;
  out.base = std::move(base);
  out.mode = mode;
  out.has_correction = true;
  out.channel_map = {0, 1};
  out.ansatz.omega = omega;
  out.ansatz.harmonics = 1;
  out.ansatz.scaling_exponent = 0.5;
  out.ansatz.channels.resize(2);
  // c1 = -sqrt(|f| w) cos(w s tau), c2 = +sqrt(|f| w) sin(w s tau)
  out.ansatz.channels[0].A = {nullptr};
  out.ansatz.channels[0].B = {[fcd](double s) { return -std::sqrt(std::abs(fcd(s))); }};
  out.ansatz.channels[1].A = {[fcd](double s) { return std::sqrt(std::abs(fcd(s))); }};
  out.ansatz.channels[1].B = {nullptr};
  require_periods(out.ansatz, out.base.tau);
  return out;
}

ECDSchedule synth_three_level(ControlSystem base, const ScalarFn& fcd12, const ScalarFn& fcd23,
                              const ScalarFn& fcd13, double omega, ScheduleMode mode) {
  base.validate();
  if (base.controls.size() < 3)
    throw std::invalid_argument("synth_three_level: expected the three-level control layout");

  // f12 and f23 must stay non-positive; scan a fixed validation grid.
  for (int i = 0; i <= 512; ++i) {
    const double s = static_cast<double>(i) / 512.0;
    if (fcd12(s) > 1e-9 || fcd23(s) > 1e-9)
      throw std::domain_error("synth_three_level: fcd12/fcd23 must be non-positive (violated at s = " +
                              std::to_string(s) + ")");
  }

  const auto ampA = [fcd13](double s) {
    return -sgn(fcd13(s)) * std::sqrt(2.0 * std::abs(fcd13(s)));
  };
  const auto ampB = [fcd12](double s) { return 2.0 * std::sqrt(std::abs(fcd12(s))); };
  const auto ampC = [fcd13](double s) { return std::sqrt(2.0 * std::abs(fcd13(s))); };
  const auto ampD = [fcd23](double s) { return std::sqrt(6.0 * std::abs(fcd23(s))); };

  ECDSchedule out;
  out.base = std::move(base);
  out.mode = mode;
  out.has_correction = true;
  // base layout: 0 sweep, 1 coupling12, 2 coupling23 (splitting unused)
  out.channel_map = {1, 2, 0};
  out.ansatz.omega = omega;
  out.ansatz.harmonics = 3;
  out.ansatz.scaling_exponent = 0.5;
  out.ansatz.channels.resize(3);

  auto& c1 = out.ansatz.channels[0];  // coupling12: A cos(wt) - B cos(2wt)
  c1.A = {nullptr, nullptr, nullptr};
  c1.B = {ampA, [ampB](double s) { return -ampB(s); }, nullptr};

  auto& c2 = out.ansatz.channels[1];  // coupling23: C sin(wt) - D cos(3wt)
  c2.A = {ampC, nullptr, nullptr};
  c2.B = {nullptr, nullptr, [ampD](double s) { return -ampD(s); }};

  auto& c3 = out.ansatz.channels[2];  // sweep: B sin(2wt) + D sin(3wt)
  c3.A = {nullptr, ampB, ampD};
  c3.B = {nullptr, nullptr, nullptr};

  require_periods(out.ansatz, out.base.tau);
  return out;
}

void perturb_sin_channel(ECDSchedule& schedule, int channel, double amp_delta,
                         double phase_delta) {
  if (!schedule.has_correction)
    throw std::invalid_argument("perturb_sin_channel: schedule has no correction");
  auto& ch = schedule.ansatz.channels.at(channel);
  const auto oldA = ch.A.at(0);
  if (!oldA) throw std::invalid_argument("perturb_sin_channel: channel has no sine component");
  const auto oldB = ch.B.at(0);
  const double gain = 1.0 + amp_delta;
  const double phi = 2.0 * M_PI * phase_delta;
  ch.A[0] = [oldA, gain, phi](double s) { return gain * std::cos(phi) * oldA(s); };
  ch.B[0] = [oldA, oldB, gain, phi](double s) {
    return (oldB ? oldB(s) : 0.0) + gain * std::sin(phi) * oldA(s);
  };
}

ConstraintSolution solve_constraints_numeric(const std::vector<CMatrix>& targets,
                                             const ControlSet& channels, double omega,
                                             int harmonics, double tau, double tol) {
  if (targets.empty()) throw std::invalid_argument("solve_constraints_numeric: no targets");
  const int m = channels.size();
  const double period = 2.0 * M_PI / omega;

  struct Pair {
    int k, l;
    CMatrix comm;
    double norm;
  };
  std::vector<Pair> pairs;
  for (int k = 0; k < m; ++k)
    for (int l = k + 1; l < m; ++l) {
      CMatrix c = commutator(channels.matrices[k], channels.matrices[l]);
      const double n = frobenius(c, NormConvention::Sqrt);
      if (n > 1e-12) pairs.push_back({k, l, std::move(c), n});
    }
  if (pairs.empty())
    throw std::runtime_error("solve_constraints_numeric: control set is abelian, no reachable "
                             "second-order directions");

  const int np = static_cast<int>(pairs.size());
  // Gram matrix of the commutator directions (real for skew-Hermitian spans).
  CMatrix gram(np);
  for (int p = 0; p < np; ++p)
    for (int q = 0; q < np; ++q) gram(p, q) = hs_inner(pairs[p].comm, pairs[q].comm).real();
  const EigSystem ge = hermitian_eig(gram);
  const double gmax = std::max(ge.values.back(), 1e-300);

  const int n_periods = static_cast<int>(targets.size());
  std::vector<std::vector<double>> gamma(n_periods, std::vector<double>(np, 0.0));
  std::vector<double> residuals(n_periods, 0.0);

  for (int n = 0; n < n_periods; ++n) {
    const CMatrix& target = targets[n];
    if (hermiticity_error(complexd(0, 1) * target) > 1e-9 * std::max(1.0, target.max_abs()))
      throw std::invalid_argument("solve_constraints_numeric: target is not skew-Hermitian");
    std::vector<double> b(np);
    for (int p = 0; p < np; ++p) b[p] = hs_inner(pairs[p].comm, target).real();
    // min-norm solution through the eigen-pseudo-inverse of the Gram matrix
    for (int p = 0; p < np; ++p) {
      for (int e = 0; e < np; ++e) {
        if (ge.values[e] < 1e-12 * gmax) continue;
        double proj = 0.0;
        for (int q = 0; q < np; ++q) proj += ge.vectors(q, e).real() * b[q];
        gamma[n][p] += ge.vectors(p, e).real() * proj / ge.values[e];
      }
    }
    CMatrix resid = target;
    for (int p = 0; p < np; ++p) resid -= gamma[n][p] * pairs[p].comm;
    residuals[n] = frobenius(resid, NormConvention::Sqrt);
    if (residuals[n] > tol * std::max(1.0, frobenius(target, NormConvention::Sqrt)))
      throw std::runtime_error(
          "solve_constraints_numeric: target of period " + std::to_string(n) +
          " has an unreachable component of norm " + std::to_string(residuals[n]));
  }

  // Harmonic assignment: one harmonic per pair active in any period.
  std::vector<int> harmonic_of(np, 0);
  int next = 1;
  for (int p = 0; p < np; ++p) {
    bool active = false;
    for (int n = 0; n < n_periods; ++n)
      if (std::abs(gamma[n][p]) * pairs[p].norm > 1e-10 * (1.0 + targets[n].max_abs())) {
        active = true;
        break;
      }
    if (active) {
      if (next > harmonics)
        throw std::runtime_error("solve_constraints_numeric: more active commutator directions "
                                 "than harmonics available");
      harmonic_of[p] = next++;
    }
  }

  // Per-period amplitudes: A on the earlier channel, signed B on the later.
  // A_k B_l = -2 j gamma / T.
  auto midpoints = std::make_shared<std::vector<double>>();
  for (int n = 0; n < n_periods; ++n) midpoints->push_back((n + 0.5) * period / tau);

  ConstraintSolution out;
  out.period_residuals = residuals;
  out.channel_map.resize(m);
  for (int k = 0; k < m; ++k) out.channel_map[k] = k;
  out.ansatz.omega = omega;
  out.ansatz.harmonics = harmonics;
  out.ansatz.scaling_exponent = 0.5;
  out.ansatz.channels.resize(m);
  for (int k = 0; k < m; ++k) {
    out.ansatz.channels[k].A.assign(harmonics, nullptr);
    out.ansatz.channels[k].B.assign(harmonics, nullptr);
  }

  const auto interp = [midpoints](std::shared_ptr<std::vector<double>> vals) {
    return [midpoints, vals](double s) {
      const auto& xs = *midpoints;
      const auto& ys = *vals;
      if (s <= xs.front()) return ys.front();
      if (s >= xs.back()) return ys.back();
      size_t hi = 1;
      while (hi < xs.size() && xs[hi] < s) ++hi;
      const double w = (s - xs[hi - 1]) / (xs[hi] - xs[hi - 1]);
      return (1.0 - w) * ys[hi - 1] + w * ys[hi];
    };
  };

  for (int p = 0; p < np; ++p) {
    const int j = harmonic_of[p];
    if (j == 0) continue;
    auto a_vals = std::make_shared<std::vector<double>>();
    auto b_vals = std::make_shared<std::vector<double>>();
    for (int n = 0; n < n_periods; ++n) {
      const double g = gamma[n][p];
      const double amp = std::sqrt(2.0 * j * std::abs(g) / period);
      a_vals->push_back(amp);
      b_vals->push_back(-sgn(g) * amp);
    }
    out.ansatz.channels[pairs[p].k].A[j - 1] = interp(a_vals);
    out.ansatz.channels[pairs[p].l].B[j - 1] = interp(b_vals);
  }
  return out;
}

double pair_content(const FourierAnsatz& ansatz, const std::vector<int>& channel_map, double s,
                    int base_k, int base_l, double period) {
  int ck = -1, cl = -1;
  for (size_t i = 0; i < channel_map.size(); ++i) {
    if (channel_map[i] == base_k) ck = static_cast<int>(i);
    if (channel_map[i] == base_l) cl = static_cast<int>(i);
  }
  if (ck < 0 || cl < 0) return 0.0;
  double acc = 0.0;
  for (int j = 1; j <= ansatz.harmonics; ++j)
    acc += (ansatz.amp_A(ck, j, s) * ansatz.amp_B(cl, j, s) -
            ansatz.amp_B(ck, j, s) * ansatz.amp_A(cl, j, s)) /
           j;
  return -0.5 * period * std::pow(ansatz.omega, 2.0 * ansatz.scaling_exponent - 1.0) * acc;
}

}  // namespace ecd
