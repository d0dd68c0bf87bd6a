#include "ecd/cdfield.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ecd {

void ControlSystem::validate() const {
  const size_t m = controls.matrices.size();
  if (u.size() != m || du.size() != m)
    throw std::invalid_argument("ControlSystem: control function count mismatch");
  if (!(tau > 0.0)) throw std::invalid_argument("ControlSystem: tau must be positive");
}

namespace {

void check_s(double s) {
  if (s < -1e-12 || s > 1.0 + 1e-12)
    throw std::domain_error("rescaled time s out of [0,1]");
}

}  // namespace

CMatrix evaluate_H(const ControlSystem& sys, double s) {
  check_s(s);
  CMatrix h(sys.dim());
  for (size_t k = 0; k < sys.u.size(); ++k) h += sys.u[k](s) * sys.controls.matrices[k];
  return h;
}

CMatrix evaluate_dH(const ControlSystem& sys, double s) {
  check_s(s);
  CMatrix h(sys.dim());
  for (size_t k = 0; k < sys.du.size(); ++k) h += sys.du[k](s) * sys.controls.matrices[k];
  return h;
}

DegenerateSpectrum::DegenerateSpectrum(double gap_, double s_)
    : std::runtime_error("degenerate spectrum: gap " + std::to_string(gap_) + " at s = " +
                         std::to_string(s_)),
      gap(gap_),
      s(s_) {}

CMatrix cd_exact(const ControlSystem& sys, double s, double gap_tol) {
  const CMatrix h = evaluate_H(sys, s);
  const CMatrix dh_dt = (1.0 / sys.tau) * evaluate_dH(sys, s);
  const EigSystem es = hermitian_eig(h);
  const int n = h.dim();

  for (int a = 0; a < n - 1; ++a) {
    const double gap = es.values[a + 1] - es.values[a];
    if (gap <= gap_tol) throw DegenerateSpectrum(gap, s);
  }

  // W = V^dag (dH/dt) V, kernel K_mn = W_mn / (E_n - E_m) off the diagonal,
  // H_CD = i V K V^dag.
  CMatrix w(n);
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q) {
      complexd acc{};
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          acc += std::conj(es.vectors(i, m)) * dh_dt(i, j) * es.vectors(j, q);
      w(m, q) = acc;
    }
  CMatrix k(n);
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q)
      if (m != q) k(m, q) = w(m, q) / (es.values[q] - es.values[m]);

  CMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      complexd acc{};
      for (int m = 0; m < n; ++m)
        for (int q = 0; q < n; ++q)
          acc += es.vectors(i, m) * k(m, q) * std::conj(es.vectors(j, q));
      out(i, j) = complexd(0, 1) * acc;
    }
  // Clean up roundoff so the result is exactly Hermitian.
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const complexd v = 0.5 * (out(i, j) + std::conj(out(j, i)));
      out(i, j) = v;
      out(j, i) = std::conj(v);
    }
  return out;
}

double cd_su2_analytic(double ux, double uz, double dux, double duz) {
  const double denom = ux * ux + uz * uz;
  if (denom <= 0.0) throw std::domain_error("cd_su2_analytic: zero field");
  return -0.5 * (ux * duz - dux * uz) / denom;
}

double generator_residual(const ControlSystem& sys, double s, double fd_step) {
  const CMatrix h = evaluate_H(sys, s);
  const CMatrix dh_dt = (1.0 / sys.tau) * evaluate_dH(sys, s);
  const CMatrix hcd = cd_exact(sys, s);
  const EigSystem es = hermitian_eig(h);
  const int n = h.dim();

  // dE_n/dt via central differences in s (one-sided at the interval ends).
  double hlo = std::min(fd_step, s);
  double hhi = std::min(fd_step, 1.0 - s);
  if (hlo + hhi <= 0.0) throw std::domain_error("generator_residual: degenerate stencil");
  const EigSystem lo = hermitian_eig(evaluate_H(sys, s - hlo));
  const EigSystem hi = hermitian_eig(evaluate_H(sys, s + hhi));
  std::vector<double> dE(n);
  for (int a = 0; a < n; ++a) dE[a] = (hi.values[a] - lo.values[a]) / ((hlo + hhi) * sys.tau);

  CMatrix dD(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      complexd acc{};
      for (int a = 0; a < n; ++a)
        acc += es.vectors(i, a) * dE[a] * std::conj(es.vectors(j, a));
      dD(i, j) = acc;
    }

  const CMatrix resid = dh_dt - complexd(0, 1) * commutator(h, hcd) - dD;
  return frobenius(resid, NormConvention::Sqrt);
}

std::vector<StateVector> adiabatic_path(const ControlSystem& sys,
                                        const std::vector<double>& s_points, int label,
                                        int walk_points) {
  if (label < 0 || label >= sys.dim())
    throw std::invalid_argument("adiabatic_path: label out of range");
  double s_max = 0.0;
  for (double s : s_points) {
    check_s(s);
    s_max = std::max(s_max, s);
  }

  // Walk grid: uniform points up to the farthest request, with the requested
  // points merged in so outputs are hit exactly.
  std::set<double> grid{0.0};
  for (int i = 1; i < walk_points; ++i)
    grid.insert(s_max * static_cast<double>(i) / (walk_points - 1));
  for (double s : s_points) grid.insert(s);

  const int n = sys.dim();
  std::vector<StateVector> results(s_points.size());

  StateVector prev(n);
  double prev_s = 0.0, prev_E = 0.0, phase = 0.0;
  bool first = true;
  for (double s : grid) {
    const EigSystem es = hermitian_eig(evaluate_H(sys, s));
    StateVector v(n);
    for (int i = 0; i < n; ++i) v[i] = es.vectors(i, label);

    if (first) {
      // canonical gauge at the start: largest component real positive
      int imax = 0;
      for (int i = 1; i < n; ++i)
        if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
      const double amax = std::abs(v[imax]);
      if (amax > 0) {
        const complexd ph = std::conj(v[imax]) / amax;
        for (auto& c : v) c *= ph;
      }
      phase = 0.0;
      first = false;
    } else {
      complexd ov{};
      for (int i = 0; i < n; ++i) ov += std::conj(prev[i]) * v[i];
      const double mag = std::abs(ov);
      if (mag < 0.5)
        throw GaugeTrackingError("adiabatic_path: eigenvector overlap below 0.5 near s = " +
                                 std::to_string(s));
      const complexd ph = std::conj(ov) / mag;
      for (auto& c : v) c *= ph;
      phase += sys.tau * 0.5 * (prev_E + es.values[label]) * (s - prev_s);
    }
    prev = v;
    prev_s = s;
    prev_E = es.values[label];

    for (size_t k = 0; k < s_points.size(); ++k) {
      if (s_points[k] == s) {
        StateVector out = v;
        const complexd dyn = std::polar(1.0, -phase);
        for (auto& c : out) c *= dyn;
        results[k] = out;
      }
    }
  }
  return results;
}

StateVector adiabatic_target(const ControlSystem& sys, double s, int label, double ds) {
  const int walk = std::max(2, static_cast<int>(std::ceil(s / std::max(ds, 1e-9))) + 1);
  return adiabatic_path(sys, {s}, label, walk).front();
}

}  // namespace ecd
