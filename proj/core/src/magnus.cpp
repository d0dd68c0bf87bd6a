#include "ecd/magnus.hpp"

#include <cmath>

namespace ecd {

Quadrature gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  Quadrature q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration from the Chebyshev initial guess.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    q.weights[n - 1 - i] = q.weights[i];
  }
  return q;
}

CMatrix MagnusTerms::sum() const {
  CMatrix s = m1;
  if (order >= 2) s += m2;
  if (order >= 3) s += m3;
  return s;
}

namespace {

MagnusTerms magnus_once(const MatrixFn& hfun, double t0, double T, int order, int nodes) {
  const Quadrature q = gauss_legendre(nodes);
  const auto map = [](double a, double b, double x) { return 0.5 * (b - a) * x + 0.5 * (a + b); };
  const auto wgt = [](double a, double b, double w) { return 0.5 * (b - a) * w; };

  const int dim = hfun(t0).dim();
  MagnusTerms out;
  out.m1 = CMatrix(dim);
  out.m2 = CMatrix(dim);
  out.m3 = CMatrix(dim);
  out.t0 = t0;
  out.T = T;
  out.quadrature_nodes = nodes;
  out.order = order;

  std::vector<double> t1s(nodes), w1s(nodes);
  std::vector<CMatrix> h1(nodes);
  for (int i = 0; i < nodes; ++i) {
    t1s[i] = map(t0, t0 + T, q.nodes[i]);
    w1s[i] = wgt(t0, t0 + T, q.weights[i]);
    h1[i] = hfun(t1s[i]);
    out.m1 += w1s[i] * h1[i];
  }
  out.m1 *= complexd(0, -1);
  if (order < 2) return out;

  for (int i = 0; i < nodes; ++i) {
    for (int j = 0; j < nodes; ++j) {
      const double t2 = map(t0, t1s[i], q.nodes[j]);
      const double w2 = wgt(t0, t1s[i], q.weights[j]);
      const CMatrix h2 = hfun(t2);
      out.m2 += (w1s[i] * w2) * commutator(h1[i], h2);
      if (order >= 3) {
        for (int k = 0; k < nodes; ++k) {
          const double t3 = map(t0, t2, q.nodes[k]);
          const double w3 = wgt(t0, t2, q.weights[k]);
          const CMatrix h3 = hfun(t3);
          out.m3 += (w1s[i] * w2 * w3) *
                    (commutator(h1[i], commutator(h2, h3)) + commutator(h3, commutator(h2, h1[i])));
        }
      }
    }
  }
  out.m2 *= -0.5;
  out.m3 *= complexd(0, 1.0 / 6.0);
  return out;
}

}  // namespace

MagnusTerms magnus_numeric(const MatrixFn& hfun, double t0, double T, int order, int nodes,
                           double check_tol) {
  if (!(T > 0.0)) throw std::invalid_argument("magnus_numeric: T must be positive");
  if (order < 1 || order > 3) throw std::invalid_argument("magnus_numeric: order must be 1..3");
  nodes = std::max(nodes, 16);

  const MagnusTerms coarse = magnus_once(hfun, t0, T, order, nodes);
  const MagnusTerms fine = magnus_once(hfun, t0, T, order, 2 * nodes);
  double shift = (fine.m1 - coarse.m1).max_abs();
  if (order >= 2) shift = std::max(shift, (fine.m2 - coarse.m2).max_abs());
  if (order >= 3) shift = std::max(shift, (fine.m3 - coarse.m3).max_abs());
  if (shift > check_tol)
    throw std::runtime_error("magnus_numeric: node-doubling check failed, shift = " +
                             std::to_string(shift));
  return fine;
}

CMatrix magnus2_su2_analytic(const FourierAnsatz& ansatz, double s, int gen_i, int gen_j) {
  if (gen_i == gen_j)
    throw std::invalid_argument("magnus2_su2_analytic: generators must differ");
  if (gen_i < 1 || gen_i > 3 || gen_j < 1 || gen_j > 3)
    throw std::invalid_argument("magnus2_su2_analytic: generator index out of 1..3");
  if (ansatz.channels.size() != 2)
    throw std::invalid_argument("magnus2_su2_analytic: ansatz must have two channels");

  // epsilon_{ijk} and the remaining generator index
  const int k = 6 - gen_i - gen_j;
  const int eps = ((gen_j - gen_i + 3) % 3 == 1) ? 1 : -1;

  double acc = 0.0;
  for (int n = 1; n <= ansatz.harmonics; ++n) {
    const double ai = ansatz.amp_A(0, n, s), bi = ansatz.amp_B(0, n, s);
    const double aj = ansatz.amp_A(1, n, s), bj = ansatz.amp_B(1, n, s);
    acc += (ai * bj - bi * aj) / n;
  }
  const double pref = 2.0 * M_PI / std::pow(ansatz.omega, 2.0 - 2.0 * ansatz.scaling_exponent);
  const CMatrix sigma_k = (k == 1) ? pauli_x() : (k == 2) ? pauli_y() : pauli_z();
  return complexd(0, -1) * (eps * pref * acc) * sigma_k;
}

CMatrix omega2_taylor(const MatrixFn& a, const MatrixFn& b, double t, int order) {
  if (order < 2 || order > 4)
    throw std::invalid_argument("omega2_taylor: supported orders are 2..4");
  const double tm = 0.5 * t;
  const double h = t / 100.0;

  // 4th-order central differences at the midpoint; a_k = A^(k)(t*)/k!.
  const auto d0 = [&](const MatrixFn& f) { return f(tm); };
  const auto d1 = [&](const MatrixFn& f) {
    CMatrix num = f(tm - 2 * h);
    num -= 8.0 * f(tm - h);
    num += 8.0 * f(tm + h);
    num -= f(tm + 2 * h);
    return (1.0 / (12.0 * h)) * num;
  };
  const auto d2 = [&](const MatrixFn& f) {
    CMatrix num = -1.0 * f(tm - 2 * h);
    num += 16.0 * f(tm - h);
    num -= 30.0 * f(tm);
    num += 16.0 * f(tm + h);
    num -= f(tm + 2 * h);
    return (1.0 / (12.0 * h * h)) * num;
  };

  const CMatrix a0 = d0(a), b0 = d0(b);
  CMatrix out = (0.25 * t * t) * commutator(a0, b0);
  if (order >= 3) {
    const CMatrix a1 = d1(a), b1 = d1(b);
    out += (t * t * t / 24.0) * (commutator(a1, b0) - commutator(a0, b1));
    if (order >= 4) {
      const CMatrix a2 = 0.5 * d2(a), b2 = 0.5 * d2(b);
      out += (t * t * t * t / 48.0) * (commutator(a0, b2) + commutator(a2, b0));
    }
  }
  return out;
}

CMatrix omega2_numeric(const MatrixFn& a, const MatrixFn& b, double t, int nodes) {
  nodes = std::max(nodes, 16);
  const Quadrature q = gauss_legendre(nodes);
  const auto map = [](double lo, double hi, double x) { return 0.5 * (hi - lo) * x + 0.5 * (lo + hi); };
  const auto wgt = [](double lo, double hi, double w) { return 0.5 * (hi - lo) * w; };

  CMatrix acc(a(0.0).dim());
  for (int i = 0; i < nodes; ++i) {
    const double t1 = map(0.0, t, q.nodes[i]);
    const double w1 = wgt(0.0, t, q.weights[i]);
    const CMatrix a1 = a(t1);
    for (int j = 0; j < nodes; ++j) {
      const double t2 = map(0.0, t1, q.nodes[j]);
      const double w2 = wgt(0.0, t1, q.weights[j]);
      acc += (w1 * w2) * commutator(a1, b(t2));
    }
  }
  return 0.5 * acc;
}

int infidelity_order(int m_solved) {
  if (m_solved < 0) throw std::invalid_argument("infidelity_order: m must be >= 0");
  return 2 * m_solved + 1;
}

}  // namespace ecd
