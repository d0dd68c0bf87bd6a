#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "ecd/fourier.hpp"
#include "ecd/linalg.hpp"

namespace ecd {

using MatrixFn = std::function<CMatrix(double)>;

// Gauss-Legendre nodes and weights on [-1, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n);

// First Magnus terms of U = exp(M1 + M2 + M3 + ...) over [t0, t0+T]:
//   M1 = -i int H,
//   M2 = -(1/2) int int [H(t1), H(t2)],
//   M3 = (i/6) int int int ([H1,[H2,H3]] + [H3,[H2,H1]]).
struct MagnusTerms {
  CMatrix m1, m2, m3;
  double t0 = 0.0;
  double T = 0.0;
  int quadrature_nodes = 0;
  int order = 0;

  CMatrix sum() const;
};

// Nested Gauss-Legendre evaluation of the terms up to `order` (1..3) with
// `nodes` points per level (>= 16). The computation is repeated with doubled
// nodes; a max-entry shift above check_tol counts as non-convergent quadrature.
MagnusTerms magnus_numeric(const MatrixFn& hfun, double t0, double T, int order,
                           int nodes, double check_tol = 1e-8);

// Closed-form second Magnus term over one full period for a two-channel su(2)
// ansatz with X = 1/2: channels couple to sigma_{gen_i} and sigma_{gen_j}
// (indices 1..3), envelopes frozen at s. Errors on gen_i == gen_j.
CMatrix magnus2_su2_analytic(const FourierAnsatz& ansatz, double s, int gen_i, int gen_j);

// Generalized second-order term Omega_2(t) = (1/2) int_0^t dt1 int_0^t1 dt2
// [A(t1), B(t2)], evaluated by the midpoint Taylor expansion truncated at the
// requested power of t (2..4). Midpoint derivatives use 4th-order central
// differences with step t/100.
CMatrix omega2_taylor(const MatrixFn& a, const MatrixFn& b, double t, int order);

// Direct nested quadrature of the same object (oracle-grade reference).
CMatrix omega2_numeric(const MatrixFn& a, const MatrixFn& b, double t, int nodes);

// Predicted stroboscopic infidelity exponent after matching m CD Magnus
// orders: I_F(T) = o(T^{2m+1}).
int infidelity_order(int m_solved);

}  // namespace ecd
