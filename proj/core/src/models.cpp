#include "ecd/models.hpp"

#include <cmath>

namespace ecd {

void ModelParams::validate() const {
  if (!(epsilon > 0.0)) throw std::invalid_argument("ModelParams: epsilon must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("ModelParams: tau must be positive");
  if (d < 0.0) throw std::invalid_argument("ModelParams: d must be non-negative");
}

ControlSystem lzm(const ModelParams& p) {
  p.validate();
  ControlSystem sys;
  sys.controls = ControlSet({pauli_z(), pauli_x()}, {"sigma_z", "sigma_x"});
  const double eps = p.epsilon;
  sys.u = {[eps](double s) { return 0.5 * eps * (s - 0.5); }, [](double) { return 0.5; }};
  sys.du = {[eps](double) { return 0.5 * eps; }, [](double) { return 0.0; }};
  sys.tau = p.tau;
  return sys;
}

ScalarFn lzm_fcd(const ModelParams& p) {
  p.validate();
  const double eps = p.epsilon, tau = p.tau;
  return [eps, tau](double s) {
    const double x = s - 0.5;
    return -(0.5 / tau) * eps / (eps * eps * x * x + 1.0);
  };
}

double lz_formula(const ModelParams& p) {
  p.validate();
  return std::exp(-M_PI * p.tau / (2.0 * p.epsilon));
}

namespace {

CMatrix two_qubit_h1() {
  const CMatrix id = CMatrix::identity(2);
  return -1.0 * (kron(pauli_z(), id) + kron(id, pauli_z()));
}

CMatrix two_qubit_h2() {
  return -1.0 * (kron(pauli_x(), pauli_x()) + kron(pauli_z(), pauli_z()));
}

}  // namespace

CMatrix two_qubit_h3() { return kron(pauli_x(), pauli_y()) + kron(pauli_y(), pauli_x()); }

ControlSystem two_qubit(const ModelParams& p) {
  p.validate();
  ControlSystem sys;
  sys.controls = ControlSet({two_qubit_h1(), two_qubit_h2()}, {"local_z", "xx_zz"});
  const double eps = p.epsilon;
  sys.u = {[eps](double s) { return eps * (1.0 - s); }, [](double) { return 1.0; }};
  sys.du = {[eps](double) { return -eps; }, [](double) { return 0.0; }};
  sys.tau = p.tau;
  return sys;
}

ScalarFn two_qubit_fcd(const ModelParams& p) {
  p.validate();
  const double eps = p.epsilon, tau = p.tau;
  return [eps, tau](double s) {
    const double x = 1.0 - s;
    return 0.5 * eps / ((4.0 * eps * eps * x * x + 1.0) * tau);
  };
}

CMatrix two_qubit_cd_analytic(const ModelParams& p, double s) {
  return two_qubit_fcd(p)(s) * two_qubit_h3();
}

ControlSystem three_level(const ModelParams& p) {
  p.validate();
  CMatrix sweep(3, {1, 0, 0, 0, 0, 0, 0, 0, -1});
  CMatrix c12(3, {0, 1, 0, 1, 0, 0, 0, 0, 0});
  CMatrix c23(3, {0, 0, 0, 0, 0, 1, 0, 1, 0});
  CMatrix split(3, {1, 0, 0, 0, -2, 0, 0, 0, 1});

  ControlSystem sys;
  sys.controls = ControlSet({sweep, c12, c23, split},
                            {"sweep", "coupling_12", "coupling_23", "splitting"});
  const double eps = p.epsilon, d = p.d;
  sys.u = {[eps](double s) { return eps * (s - 0.5); }, [](double) { return 1.0; },
           [](double) { return 1.0; }, [d](double) { return d; }};
  sys.du = {[eps](double) { return eps; }, [](double) { return 0.0; }, [](double) { return 0.0; },
            [](double) { return 0.0; }};
  sys.tau = p.tau;
  return sys;
}

ThreeLevelCd three_level_cd(const ControlSystem& sys, double s) {
  const CMatrix hcd = cd_exact(sys, s);
  ThreeLevelCd f;
  f.f12 = -hcd(0, 1).imag();
  f.f23 = -hcd(1, 2).imag();
  f.f13 = -hcd(0, 2).imag();
  return f;
}

}  // namespace ecd
