#pragma once

#include <functional>
#include <vector>

#include "ecd/algebra.hpp"
#include "ecd/linalg.hpp"

namespace ecd {

using ScalarFn = std::function<double(double)>;

// Driven system H(s) = sum_k u_k(s) H_k on rescaled time s in [0,1].
// tau is the total duration in units of the problem's base frequency; the
// propagation equation used throughout is  i dU/ds = tau H(s) U.  Control
// derivatives du are with respect to s.
struct ControlSystem {
  ControlSet controls;
  std::vector<ScalarFn> u;
  std::vector<ScalarFn> du;
  double tau = 1.0;

  int dim() const { return controls.dim; }
  void validate() const;
};

CMatrix evaluate_H(const ControlSystem& sys, double s);
CMatrix evaluate_dH(const ControlSystem& sys, double s);  // d/ds of H

class DegenerateSpectrum : public std::runtime_error {
 public:
  DegenerateSpectrum(double gap, double s);
  double gap;
  double s;
};

class GaugeTrackingError : public std::runtime_error {
 public:
  explicit GaugeTrackingError(const std::string& what) : std::runtime_error(what) {}
};

// Exact counterdiabatic field, projector form: gauge-free, Hermitian, zero
// diagonal in the instantaneous eigenbasis. The time derivative inside is the
// physical one, dH/dt = (1/tau) dH/ds, so the result obeys i dU/ds = tau H_CD U
// alongside the base system. Throws DegenerateSpectrum when any instantaneous
// gap falls below gap_tol.
CMatrix cd_exact(const ControlSystem& sys, double s, double gap_tol = 1e-8);

// Two-channel su(2) closed form: coefficient of sigma_y for
// H = u_x sigma_x + u_z sigma_z, derivatives taken in the caller's time
// variable (pass physical-time derivatives to get the physical coefficient).
double cd_su2_analytic(double ux, double uz, double dux, double duz);

// Frobenius norm (sqrt convention) of  dH/dt - i[H, H_CD] - dD  at s, where
// dD carries the eigenvalue motion, estimated by central finite differences
// of step fd_step in s. Small residual certifies the generator identity.
double generator_residual(const ControlSystem& sys, double s, double fd_step = 1e-6);

// CD field as a reusable evaluator.
struct CDField {
  ControlSystem system;
  double gap_tol = 1e-8;

  CMatrix evaluate(double s) const { return cd_exact(system, s, gap_tol); }
};

// Adiabatic target states: instantaneous eigenvector number `label` carried
// continuously from s=0 with the dynamic phase exp(-i tau int_0^s E ds').
// Gauge: largest-magnitude component of the s=0 vector made real-positive,
// later points phase-aligned to their predecessor by maximal overlap; an
// overlap below 0.5 between consecutive walk points is a tracking failure.
std::vector<StateVector> adiabatic_path(const ControlSystem& sys,
                                        const std::vector<double>& s_points,
                                        int label, int walk_points = 2001);

StateVector adiabatic_target(const ControlSystem& sys, double s, int label,
                             double ds = 1e-3);

}  // namespace ecd
