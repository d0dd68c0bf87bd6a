#pragma once

#include "ecd/cdfield.hpp"

namespace ecd {

// Benchmark-model parameters. epsilon is the sweep span over the gap scale,
// tau the dimensionless duration, d the three-level zero-field splitting.
struct ModelParams {
  double epsilon = 0.0;
  double tau = 0.0;
  double d = 0.0;

  void validate() const;
};

// Linear two-level sweep through an avoided crossing:
//   H(s) = (1/2)[ eps (s - 1/2) sigma_z + sigma_x ],
// channels ordered (sigma_z, sigma_x).
ControlSystem lzm(const ModelParams& p);

// Closed-form CD coefficient of sigma_y for the sweep above.
ScalarFn lzm_fcd(const ModelParams& p);

// Asymptotic nonadiabatic transition probability exp(-pi tau / 2 eps).
double lz_formula(const ModelParams& p);

// Two-qubit entangler: H = B(s) H1 + g H2 with B(s) = eps (1-s), g = 1,
//   H1 = -(sz x 1 + 1 x sz),  H2 = -(sx x sx + sz x sz),
// channels ordered (H1, H2). The ground state runs from |00> to the Bell
// state (|00> + |11>)/sqrt(2).
ControlSystem two_qubit(const ModelParams& p);

ScalarFn two_qubit_fcd(const ModelParams& p);

// Closed-form CD field f_CD(s) * (sx sy + sy sx) for the two-qubit sweep.
CMatrix two_qubit_cd_analytic(const ModelParams& p, double s);

CMatrix two_qubit_h3();  // sx x sy + sy x sx

// Three-level double avoided crossing,
//   H(s) = eps (s-1/2) diag(1,0,-1) + (couplings) + d diag(1,-2,1),
// with each nearest-neighbour coupling exposed as its own channel so the
// correction can drive them independently. Channel order below.
inline constexpr int kThreeLevelSweep = 0;
inline constexpr int kThreeLevelCoupling12 = 1;
inline constexpr int kThreeLevelCoupling23 = 2;
inline constexpr int kThreeLevelSplitting = 3;

ControlSystem three_level(const ModelParams& p);

// Numeric CD components of the three-level model in the bare basis:
// H_CD = f12 Y12 + f23 Y23 + f13 Y13 with Y_ab = -i|a><b| + i|b><a|.
struct ThreeLevelCd {
  double f12 = 0.0;
  double f23 = 0.0;
  double f13 = 0.0;
};
ThreeLevelCd three_level_cd(const ControlSystem& sys, double s);

}  // namespace ecd
