#include "ecd/algebra.hpp"

#include <cmath>
#include <iostream>

#include "ecd/cdfield.hpp"

namespace ecd {

namespace {

double sqrt_norm(const CMatrix& a) { return frobenius(a, NormConvention::Sqrt); }

// Real-span Gram-Schmidt step: subtract projections of x onto the (already
// orthonormal) basis. The inner products are real for skew-Hermitian inputs.
CMatrix reject(const CMatrix& x, const std::vector<CMatrix>& basis) {
  CMatrix y = x;
  for (const auto& e : basis) y -= hs_inner(e, y).real() * e;
  return y;
}

std::vector<CMatrix> orthonormalize(const std::vector<CMatrix>& span, double tol = 1e-12) {
  std::vector<CMatrix> basis;
  for (const auto& v : span) {
    CMatrix y = reject(v, basis);
    const double n = sqrt_norm(y);
    if (n > tol) basis.push_back((1.0 / n) * y);
  }
  return basis;
}

void require_skew_hermitian(const std::vector<CMatrix>& mats, const char* who) {
  for (const auto& m : mats) {
    // skew-Hermitian iff iM is Hermitian
    if (hermiticity_error(complexd(0, 1) * m) > 1e-10 * std::max(1.0, m.max_abs()))
      throw std::invalid_argument(std::string(who) + ": span element not skew-Hermitian");
  }
}

}  // namespace

ControlSet::ControlSet(std::vector<CMatrix> mats, std::vector<std::string> names)
    : matrices(std::move(mats)), labels(std::move(names)) {
  if (matrices.empty()) throw std::invalid_argument("ControlSet: empty control set");
  dim = matrices.front().dim();
  if (labels.empty()) {
    for (size_t k = 0; k < matrices.size(); ++k) labels.push_back("H" + std::to_string(k + 1));
  }
  if (labels.size() != matrices.size())
    throw std::invalid_argument("ControlSet: label count mismatch");
  for (size_t k = 0; k < matrices.size(); ++k) {
    CMatrix& m = matrices[k];
    if (m.dim() != dim) throw std::invalid_argument("ControlSet: mixed matrix dimensions");
    if (hermiticity_error(m) > 1e-12 * std::max(1.0, m.max_abs()))
      throw std::invalid_argument("ControlSet: control '" + labels[k] + "' not Hermitian");
    const complexd tr = m.trace();
    if (std::abs(tr) > 1e-12 * std::max(1.0, m.max_abs())) {
      std::cerr << "ControlSet: removed trace component " << tr.real() << " from control '"
                << labels[k] << "'\n";
      const complexd shift = tr / static_cast<double>(dim);
      for (int i = 0; i < dim; ++i) m(i, i) -= shift;
    }
  }
}

AlgebraBasis lie_closure(const ControlSet& set, double tol) {
  const int n = set.dim;
  const int max_dim = n * n - 1;

  std::vector<CMatrix> basis;
  std::vector<int> fresh;  // indices added in the previous round
  for (const auto& h : set.matrices) {
    CMatrix y = reject(complexd(0, -1) * h, basis);
    const double nn = sqrt_norm(y);
    if (nn > tol) {
      basis.push_back((1.0 / nn) * y);
      fresh.push_back(static_cast<int>(basis.size()) - 1);
    }
  }

  while (!fresh.empty() && static_cast<int>(basis.size()) < max_dim) {
    std::vector<int> next;
    const int n_known = static_cast<int>(basis.size());
    for (int fi : fresh) {
      for (int bi = 0; bi < n_known; ++bi) {
        CMatrix c = reject(commutator(basis[fi], basis[bi]), basis);
        const double nn = sqrt_norm(c);
        if (nn > tol) {
          basis.push_back((1.0 / nn) * c);
          next.push_back(static_cast<int>(basis.size()) - 1);
          if (static_cast<int>(basis.size()) == max_dim) break;
        }
      }
      if (static_cast<int>(basis.size()) == max_dim) break;
    }
    fresh = std::move(next);
  }
  return AlgebraBasis{std::move(basis), std::nullopt};
}

double membership_residual(const CMatrix& x, const AlgebraBasis& basis) {
  if (!basis.basis.empty() && basis.basis.front().dim() != x.dim())
    throw std::invalid_argument("membership_residual: dimension mismatch");
  return sqrt_norm(reject(complexd(0, -1) * x, basis.basis));
}

CartanReport cartan_verify(const std::vector<CMatrix>& h_part,
                           const std::vector<CMatrix>& p_part, double /*tol*/) {
  if (h_part.empty() || p_part.empty())
    throw std::invalid_argument("cartan_verify: both parts must be nonempty");
  require_skew_hermitian(h_part, "cartan_verify");
  require_skew_hermitian(p_part, "cartan_verify");

  const auto h_basis = orthonormalize(h_part);
  const auto p_basis = orthonormalize(p_part);

  CartanReport r;
  for (const auto& a : h_part)
    for (const auto& b : h_part)
      r.hh = std::max(r.hh, sqrt_norm(reject(commutator(a, b), h_basis)));
  for (const auto& a : h_part)
    for (const auto& b : p_part)
      r.hp = std::max(r.hp, sqrt_norm(reject(commutator(a, b), p_basis)));
  for (const auto& a : p_part)
    for (const auto& b : p_part)
      r.pp = std::max(r.pp, sqrt_norm(reject(commutator(a, b), h_basis)));
  return r;
}

Theorem2Report theorem2_check(const ControlSystem& system,
                              const std::vector<double>& s_samples, double tol) {
  for (size_t k = 0; k < system.controls.matrices.size(); ++k) {
    const CMatrix& m = system.controls.matrices[k];
    double im = 0.0;
    for (int i = 0; i < m.dim(); ++i)
      for (int j = 0; j < m.dim(); ++j) im = std::max(im, std::abs(m(i, j).imag()));
    if (im > 1e-12)
      throw std::invalid_argument("theorem2_check: control '" + system.controls.labels[k] +
                                  "' is not real symmetric");
  }

  Theorem2Report report;
  report.all_ok = true;
  for (double s : s_samples) {
    Theorem2Sample sample;
    sample.s = s;
    try {
      const CMatrix hcd = cd_exact(system, s);
      for (int i = 0; i < hcd.dim(); ++i)
        for (int j = 0; j < hcd.dim(); ++j)
          sample.real_part_max = std::max(sample.real_part_max, std::abs(hcd(i, j).real()));
      const double ncd = sqrt_norm(hcd);
      if (ncd > 1e-300) {
        for (const auto& h : system.controls.matrices) {
          const double ov = std::abs(hs_inner(hcd, h).real()) / (ncd * sqrt_norm(h));
          sample.span_overlap = std::max(sample.span_overlap, ov);
        }
      }
      sample.ok = sample.real_part_max < tol && sample.span_overlap < tol;
    } catch (const DegenerateSpectrum&) {
      sample.degenerate = true;
      sample.ok = false;
    }
    report.all_ok = report.all_ok && sample.ok;
    report.samples.push_back(sample);
  }
  return report;
}

}  // namespace ecd
