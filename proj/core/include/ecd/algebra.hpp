#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecd/linalg.hpp"

namespace ecd {

struct ControlSystem;  // cdfield.hpp

// Set of time-independent Hermitian control matrices. Construction validates
// hermiticity (1e-12) and removes any trace component, warning on stderr when
// it does; all downstream algebra assumes traceless generators.
struct ControlSet {
  int dim = 0;
  std::vector<CMatrix> matrices;
  std::vector<std::string> labels;

  ControlSet() = default;
  ControlSet(std::vector<CMatrix> mats, std::vector<std::string> names);

  int size() const { return static_cast<int>(matrices.size()); }
};

struct CartanPartition {
  std::vector<CMatrix> h_part;
  std::vector<CMatrix> p_part;
};

// Hilbert-Schmidt-orthonormal basis of a (real) Lie algebra of skew-Hermitian
// matrices.
struct AlgebraBasis {
  std::vector<CMatrix> basis;
  std::optional<CartanPartition> cartan;

  int dimension() const { return static_cast<int>(basis.size()); }
};

// Dynamical Lie algebra closure of -i*{H_1..H_M} under commutation.
// Breadth-first over (new x all) pairs with Gram-Schmidt rejection below tol.
AlgebraBasis lie_closure(const ControlSet& set, double tol = 1e-10);

// Norm (sqrt convention) of the component of -i X outside span(basis).
// Zero iff -iX is a member of the algebra.
double membership_residual(const CMatrix& x, const AlgebraBasis& basis);

struct CartanReport {
  double hh = 0.0;  // max leakage of [h,h] outside span(h)
  double hp = 0.0;  // max leakage of [h,p] outside span(p)
  double pp = 0.0;  // max leakage of [p,p] outside span(h)

  bool ok(double tol) const { return hh < tol && hp < tol && pp < tol; }
};

// Checks the commutation inclusions [h,h] in h, [h,p] in p, [p,p] in h by
// projecting each pairwise commutator onto the relevant span.
CartanReport cartan_verify(const std::vector<CMatrix>& h_part,
                           const std::vector<CMatrix>& p_part, double tol = 1e-10);

struct Theorem2Sample {
  double s = 0.0;
  bool degenerate = false;       // CD field not computable here
  double real_part_max = 0.0;    // max |Re entry| of H_CD
  double span_overlap = 0.0;     // max normalized |<H_CD, H_k>|
  bool ok = false;
};

struct Theorem2Report {
  std::vector<Theorem2Sample> samples;
  bool all_ok = false;
};

// For a system whose control matrices are all real symmetric, verifies at the
// given samples that H_CD is purely imaginary (real part below tol) and
// Hilbert-Schmidt-orthogonal to span of the control set. Samples where the CD
// computation hits a degeneracy are flagged rather than fatal.
Theorem2Report theorem2_check(const ControlSystem& system,
                              const std::vector<double>& s_samples,
                              double tol = 1e-9);

}  // namespace ecd
