#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecd {

using complexd = std::complex<double>;

// Dense complex matrix for small dimensions (intended N <= 8).
// Energies are dimensionless throughout (hbar = 1).
class CMatrix {
 public:
  CMatrix() = default;
  explicit CMatrix(int dim) : dim_(dim), a_(static_cast<size_t>(dim) * dim) {
    if (dim < 1) throw std::invalid_argument("CMatrix: dim must be >= 1");
  }
  CMatrix(int dim, std::initializer_list<complexd> entries);

  static CMatrix zero(int dim) { return CMatrix(dim); }
  static CMatrix identity(int dim);

  int dim() const { return dim_; }
  complexd& operator()(int i, int j) { return a_[static_cast<size_t>(i) * dim_ + j]; }
  const complexd& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(complexd z);
  friend CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
  friend CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
  friend CMatrix operator*(complexd z, CMatrix a) { return a *= z; }
  friend CMatrix operator*(CMatrix a, complexd z) { return a *= z; }
  friend CMatrix operator*(const CMatrix& a, const CMatrix& b);  // matrix product

  CMatrix adjoint() const;
  complexd trace() const;
  double max_abs() const;

  const std::vector<complexd>& data() const { return a_; }

 private:
  int dim_ = 0;
  std::vector<complexd> a_;
};

// Hermitian eigendecomposition result. Eigenvalues ascending, ties kept in
// the order the Jacobi iteration produced them; eigenvector k is column k.
struct EigSystem {
  std::vector<double> values;
  CMatrix vectors;
};

enum class NormConvention {
  Literal,  // tr(A A^dag), no square root
  Sqrt,     // sqrt(tr(A A^dag))
};

NormConvention parse_norm_convention(const std::string& name);
std::string to_string(NormConvention c);

CMatrix commutator(const CMatrix& a, const CMatrix& b);

// Frobenius "norm" in the requested convention. Literal returns tr(A A^dag)
// itself; Sqrt returns its square root.
double frobenius(const CMatrix& a, NormConvention convention);

// Hilbert-Schmidt inner product tr(A^dag B).
complexd hs_inner(const CMatrix& a, const CMatrix& b);

double hermiticity_error(const CMatrix& a);

// Cyclic Jacobi eigensolver for Hermitian matrices. The input is symmetrized
// before iterating; inputs farther than 1e-12 (relative) from Hermitian are
// rejected. Convergence: off-diagonal Frobenius mass below 1e-14 relative to
// the matrix norm.
EigSystem hermitian_eig(const CMatrix& a);

// exp(-i H t) for Hermitian H, via the eigendecomposition. Unitary to 1e-12.
CMatrix expm_skew(const CMatrix& h, double t);

// Kronecker product, row-major convention: (A (x) B)(i*n+k, j*n+l) = A_ij B_kl.
CMatrix kron(const CMatrix& a, const CMatrix& b);

CMatrix pauli_x();
CMatrix pauli_y();
CMatrix pauli_z();

// State helpers used across the library.
using StateVector = std::vector<complexd>;

complexd dot(const StateVector& a, const StateVector& b);  // <a|b>
double norm(const StateVector& a);
StateVector mat_vec(const CMatrix& m, const StateVector& v);

}  // namespace ecd
