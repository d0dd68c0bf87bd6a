#include "ecd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ecd {

CMatrix::CMatrix(int dim, std::initializer_list<complexd> entries) : CMatrix(dim) {
  if (entries.size() != a_.size())
    throw std::invalid_argument("CMatrix: entry count does not match dim*dim");
  std::copy(entries.begin(), entries.end(), a_.begin());
}

CMatrix CMatrix::identity(int dim) {
  CMatrix m(dim);
  for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (dim_ != o.dim_) throw std::invalid_argument("CMatrix: dimension mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (dim_ != o.dim_) throw std::invalid_argument("CMatrix: dimension mismatch");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(complexd z) {
  for (auto& v : a_) v *= z;
  return *this;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
  if (a.dim_ != b.dim_) throw std::invalid_argument("CMatrix: dimension mismatch");
  const int n = a.dim_;
  CMatrix c(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const complexd aik = a(i, k);
      if (aik == complexd{}) continue;
      for (int j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

CMatrix CMatrix::adjoint() const {
  CMatrix c(dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) c(i, j) = std::conj((*this)(j, i));
  return c;
}

complexd CMatrix::trace() const {
  complexd t{};
  for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

double CMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : a_) m = std::max(m, std::abs(v));
  return m;
}

NormConvention parse_norm_convention(const std::string& name) {
  if (name == "literal") return NormConvention::Literal;
  if (name == "sqrt") return NormConvention::Sqrt;
  throw std::invalid_argument("unknown norm convention '" + name + "' (expected literal|sqrt)");
}

std::string to_string(NormConvention c) {
  return c == NormConvention::Literal ? "literal" : "sqrt";
}

CMatrix commutator(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("commutator: dimension mismatch");
  return a * b - b * a;
}

double frobenius(const CMatrix& a, NormConvention convention) {
  double s = 0.0;
  for (const auto& v : a.data()) s += std::norm(v);
  return convention == NormConvention::Literal ? s : std::sqrt(s);
}

complexd hs_inner(const CMatrix& a, const CMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("hs_inner: dimension mismatch");
  complexd s{};
  for (size_t i = 0; i < a.data().size(); ++i) s += std::conj(a.data()[i]) * b.data()[i];
  return s;
}

double hermiticity_error(const CMatrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      m = std::max(m, std::abs(a(i, j) - std::conj(a(j, i))));
  return m;
}

namespace {

double offdiag_mass(const CMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

}  // namespace

EigSystem hermitian_eig(const CMatrix& input) {
  const int n = input.dim();
  const double scale = std::max(input.max_abs(), 1.0);
  if (hermiticity_error(input) > 1e-12 * scale)
    throw std::invalid_argument("hermitian_eig: input not Hermitian within 1e-12");

  // Symmetrize defensively, then run cyclic Jacobi sweeps.
  CMatrix a(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));
  CMatrix v = CMatrix::identity(n);

  const double fnorm = std::max(frobenius(a, NormConvention::Sqrt), 1e-300);
  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (offdiag_mass(a) <= 1e-14 * fnorm) break;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double m = std::abs(a(p, q));
        if (m <= 1e-300) continue;
        const complexd phase = a(p, q) / m;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double zeta = (aqq - app) / (2.0 * m);
        const double t = (zeta >= 0.0) ? 1.0 / (zeta + std::sqrt(1.0 + zeta * zeta))
                                       : -1.0 / (-zeta + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        const complexd spq = s * phase;        // G(p,q) entry
        const complexd sqp = -s * std::conj(phase);

        // A <- G^dag A G, columns then rows touching p,q.
        for (int i = 0; i < n; ++i) {
          const complexd aip = a(i, p), aiq = a(i, q);
          a(i, p) = aip * c + aiq * sqp;
          a(i, q) = aip * spq + aiq * c;
        }
        for (int j = 0; j < n; ++j) {
          const complexd apj = a(p, j), aqj = a(q, j);
          a(p, j) = c * apj + std::conj(sqp) * aqj;
          a(q, j) = std::conj(spq) * apj + c * aqj;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        for (int i = 0; i < n; ++i) {
          const complexd vip = v(i, p), viq = v(i, q);
          v(i, p) = vip * c + viq * sqp;
          v(i, q) = vip * spq + viq * c;
        }
      }
    }
  }
  if (offdiag_mass(a) > 1e-12 * fnorm)
    throw std::runtime_error("hermitian_eig: Jacobi iteration failed to converge");

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return a(i, i).real() < a(j, j).real(); });

  EigSystem out;
  out.values.resize(n);
  out.vectors = CMatrix(n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]).real();
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
  }
  return out;
}

CMatrix expm_skew(const CMatrix& h, double t) {
  const EigSystem es = hermitian_eig(h);
  const int n = h.dim();
  CMatrix u(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      complexd s{};
      for (int k = 0; k < n; ++k)
        s += es.vectors(i, k) * std::polar(1.0, -es.values[k] * t) * std::conj(es.vectors(j, k));
      u(i, j) = s;
    }
  return u;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const int na = a.dim(), nb = b.dim();
  CMatrix c(na * nb);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      for (int k = 0; k < nb; ++k)
        for (int l = 0; l < nb; ++l)
          c(i * nb + k, j * nb + l) = a(i, j) * b(k, l);
  return c;
}

CMatrix pauli_x() { return CMatrix(2, {0, 1, 1, 0}); }
CMatrix pauli_y() { return CMatrix(2, {0, complexd(0, -1), complexd(0, 1), 0}); }
CMatrix pauli_z() { return CMatrix(2, {1, 0, 0, -1}); }

complexd dot(const StateVector& a, const StateVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  complexd s{};
  for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

double norm(const StateVector& a) { return std::sqrt(dot(a, a).real()); }

StateVector mat_vec(const CMatrix& m, const StateVector& v) {
  if (static_cast<size_t>(m.dim()) != v.size())
    throw std::invalid_argument("mat_vec: size mismatch");
  StateVector out(v.size());
  for (int i = 0; i < m.dim(); ++i) {
    complexd s{};
    for (int j = 0; j < m.dim(); ++j) s += m(i, j) * v[j];
    out[i] = s;
  }
  return out;
}

}  // namespace ecd
