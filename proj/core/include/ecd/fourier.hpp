#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ecd/linalg.hpp"

namespace ecd {

// Per-channel harmonic amplitudes of the oscillating correction,
//   c_k(t) = omega^X sum_j [ A_kj(s) sin(j w (t - t_origin))
//                          + B_kj(s) cos(j w (t - t_origin)) ],
// with slowly varying amplitude envelopes A,B parametrized by the rescaled
// time s and the fast phase running in physical time t. Every harmonic has
// zero mean over a period, so each c_k averages to zero per period whenever
// the envelopes are frozen.
struct FourierAnsatz {
  double omega = 0.0;
  int harmonics = 0;           // L
  double scaling_exponent = 0.5;  // X
  double t_origin = 0.0;       // phase anchor (physical time)

  struct Channel {
    // A[j], B[j] are the envelopes of harmonic j+1.
    std::vector<std::function<double(double)>> A;
    std::vector<std::function<double(double)>> B;
  };
  std::vector<Channel> channels;

  double period() const { return 2.0 * M_PI / omega; }
  int n_periods(double tau) const { return static_cast<int>(std::floor(omega * tau / (2.0 * M_PI))); }

  // Control value of channel k with envelopes at s and phase at physical t.
  double channel_value(int k, double s, double t) const {
    const Channel& ch = channels[k];
    const double x = omega * (t - t_origin);
    double acc = 0.0;
    for (size_t j = 0; j < ch.A.size(); ++j) {
      const int n = static_cast<int>(j) + 1;
      if (ch.A[j]) acc += ch.A[j](s) * std::sin(n * x);
      if (ch.B[j]) acc += ch.B[j](s) * std::cos(n * x);
    }
    return std::pow(omega, scaling_exponent) * acc;
  }

  // Frozen-envelope amplitude values at a fixed s (used for per-period work).
  double amp_A(int k, int harmonic, double s) const {
    const auto& f = channels[k].A[harmonic - 1];
    return f ? f(s) : 0.0;
  }
  double amp_B(int k, int harmonic, double s) const {
    const auto& f = channels[k].B[harmonic - 1];
    return f ? f(s) : 0.0;
  }
};

// Snap omega so that an integer number of periods fits in the duration tau:
// N_T = floor(omega tau / 2pi), omega_snapped = 2 pi N_T / tau.
struct SnappedOmega {
  double omega = 0.0;
  int n_periods = 0;
};

inline SnappedOmega snap_omega(double omega, double tau) {
  const int nt = static_cast<int>(std::floor(omega * tau / (2.0 * M_PI)));
  return SnappedOmega{nt >= 1 ? 2.0 * M_PI * nt / tau : 0.0, nt};
}

}  // namespace ecd
