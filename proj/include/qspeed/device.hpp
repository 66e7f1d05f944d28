#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qspeed/linalg.hpp"

namespace qspeed {

// Physical model of two capacitively coupled transmon qudits. All
// frequencies are angular (rad/s).
struct DeviceParams {
  double g = 2.0 * M_PI * 2.7e6;                  // coupling strength
  std::array<double, 2> omega{2.0 * M_PI * 5.4e9,  // bare qudit frequencies
                              2.0 * M_PI * 4.86e9};
  std::array<double, 2> alpha{2.0 * M_PI * 4.32e8,  // anharmonicities
                              2.0 * M_PI * 4.32e8};
  int d_site = 3;  // levels per qudit (2, 3 or 4)

  void validate() const {
    if (g <= 0) throw std::invalid_argument("DeviceParams: g must be positive");
    if (d_site < 2 || d_site > 4) {
      throw std::invalid_argument("DeviceParams: d_site must be 2, 3 or 4");
    }
  }
  int dim() const { return d_site * d_site; }
  // Default truncation of the anharmonic-oscillator model: one extra level
  // per site so that leakage out of the computational space is represented.
  int ort_levels() const { return d_site + 1; }
};

// Piecewise-constant drive amplitudes over M equal segments. One parameter
// per (qudit, quadrature, transition, segment). The amp()/index() accessors
// use 0-based segment indices into storage; the earliest-acting segment is
// index 0 (segment 1 in the 1-based convention of
// control_hamiltonian_segment).
struct PulseSchedule {
  double total_time = 0.0;
  int segments = 0;
  int transitions = 0;  // d_site - 1
  double cap = 0.0;     // |amplitude| bound, rad/s
  std::vector<double> amplitudes;

  static PulseSchedule zeros(double total_time, int segments, int d_site,
                             double cap) {
    PulseSchedule s;
    s.total_time = total_time;
    s.segments = segments;
    s.transitions = d_site - 1;
    s.cap = cap;
    s.amplitudes.assign(std::size_t(segments) * 4 * s.transitions, 0.0);
    return s;
  }

  int params_per_segment() const { return 4 * transitions; }

  std::size_t index(int qudit, Quadrature q, int j, int m) const {
    const int quad = (q == Quadrature::X) ? 0 : 1;
    return (std::size_t(m) * 4 + std::size_t(qudit) * 2 + quad) * transitions + j;
  }
  double& amp(int qudit, Quadrature q, int j, int m) {
    return amplitudes[index(qudit, q, j, m)];
  }
  double amp(int qudit, Quadrature q, int j, int m) const {
    return amplitudes[index(qudit, q, j, m)];
  }
  double max_abs_amplitude() const {
    double peak = 0.0;
    for (double a : amplitudes) peak = std::max(peak, std::abs(a));
    return peak;
  }
};

// One real drive envelope per qudit, piecewise constant over N fine steps.
struct OrtPulseSchedule {
  double total_time = 0.0;
  int steps = 0;
  std::vector<double> envelope;  // [step][qudit], 2 values per step

  static OrtPulseSchedule zeros(double total_time, int steps) {
    OrtPulseSchedule s;
    s.total_time = total_time;
    s.steps = steps;
    s.envelope.assign(std::size_t(steps) * 2, 0.0);
    return s;
  }
  double& env(int qudit, int n) { return envelope[std::size_t(n) * 2 + qudit]; }
  double env(int qudit, int n) const {
    return envelope[std::size_t(n) * 2 + qudit];
  }
};

// Static coupling g (a1 + a1^dag) (x) (a2 + a2^dag) at the given per-site
// dimension.
inline Matrix coupling_hamiltonian_at(double g, int levels) {
  Matrix a = annihilation(levels);
  Matrix x = a + Matrix(a.adjoint());
  return g * kron(x, x);
}

inline Matrix coupling_hamiltonian(const DeviceParams& p) {
  p.validate();
  return coupling_hamiltonian_at(p.g, p.d_site);
}

// Ordered list of two-site drive operators matching the parameter layout of
// PulseSchedule: qudit-major, then quadrature, then transition index.
inline std::vector<Matrix> control_operators(int d_site) {
  const Matrix id = Matrix::Identity(d_site, d_site);
  std::vector<Matrix> ops;
  ops.reserve(4 * (d_site - 1));
  for (int qudit = 0; qudit < 2; ++qudit) {
    for (Quadrature q : {Quadrature::X, Quadrature::Y}) {
      for (int j = 0; j + 1 < d_site; ++j) {
        Matrix site = transition_operator(d_site, j, q);
        ops.push_back(qudit == 0 ? kron(site, id) : kron(id, site));
      }
    }
  }
  return ops;
}

// Drive Hamiltonian of segment m (1-based, segment 1 acts first): the
// amplitude-weighted sum over both qudits, both quadratures and all
// neighboring transitions.
inline Matrix control_hamiltonian_segment(const DeviceParams& p,
                                          const PulseSchedule& s, int m) {
  p.validate();
  if (m < 1 || m > s.segments) {
    throw std::invalid_argument("control_hamiltonian_segment: segment " +
                                std::to_string(m) + " out of range");
  }
  const std::vector<Matrix> ops = control_operators(p.d_site);
  Matrix h = Matrix::Zero(p.dim(), p.dim());
  std::size_t k = std::size_t(m - 1) * s.params_per_segment();
  for (const Matrix& op : ops) h += s.amplitudes[k++] * op;
  return h;
}

// Total unitary of a segmented schedule. Segment 1 acts first:
// U = U_M ... U_2 U_1 with U_m = exp(-i (H0 + H1_m) T/M).
inline Matrix propagate_segmented(const DeviceParams& p,
                                  const PulseSchedule& s) {
  if (s.segments < 1) {
    throw std::invalid_argument("propagate_segmented: schedule has no segments");
  }
  if (s.total_time <= 0) {
    throw std::invalid_argument("propagate_segmented: total_time must be positive");
  }
  const Matrix h0 = coupling_hamiltonian(p);
  const double dt = s.total_time / s.segments;
  Matrix u = Matrix::Identity(p.dim(), p.dim());
  for (int m = 1; m <= s.segments; ++m) {
    u = matexp(h0 + control_hamiltonian_segment(p, s, m), dt) * u;
  }
  return u;
}

// Number operator diagonal -(alpha/2) n (n-1) of one weakly anharmonic
// site, in the frame rotating at the site's |0><->|1> frequency.
inline Matrix duffing_site(double alpha, int levels) {
  Matrix h = Matrix::Zero(levels, levels);
  for (int n = 0; n < levels; ++n) {
    h(n, n) = -0.5 * alpha * n * (n - 1);
  }
  return h;
}

// Drive-independent part of the anharmonic two-qudit model: per-site Duffing
// ladders plus the static coupling, truncated at `levels` per site.
inline Matrix ort_static_hamiltonian(const DeviceParams& p, int levels) {
  const Matrix id = Matrix::Identity(levels, levels);
  Matrix h = kron(duffing_site(p.alpha[0], levels), id) +
             kron(id, duffing_site(p.alpha[1], levels)) +
             coupling_hamiltonian_at(p.g, levels);
  return h;
}

// The two single-drive operators (a_j + a_j^dag), embedded on their sites.
inline std::array<Matrix, 2> ort_drive_operators(int levels) {
  Matrix a = annihilation(levels);
  Matrix x = a + Matrix(a.adjoint());
  const Matrix id = Matrix::Identity(levels, levels);
  return {kron(x, id), kron(id, x)};
}

// Full anharmonic-model Hamiltonian for one pair of drive amplitudes. Each
// qudit carries a single real drive that reaches every ladder transition,
// which is what makes off-resonant driving and leakage representable.
inline Matrix ort_hamiltonian(const DeviceParams& p, double drive1,
                              double drive2, int levels = 0) {
  p.validate();
  if (levels <= 0) levels = p.ort_levels();
  const std::array<Matrix, 2> d = ort_drive_operators(levels);
  return ort_static_hamiltonian(p, levels) + drive1 * d[0] + drive2 * d[1];
}

// Total unitary of a fine-step envelope schedule under the anharmonic model.
inline Matrix propagate_ort(const DeviceParams& p, const OrtPulseSchedule& s,
                            int levels = 0) {
  if (s.steps < 1) {
    throw std::invalid_argument("propagate_ort: schedule has no steps");
  }
  if (levels <= 0) levels = p.ort_levels();
  const Matrix h_static = ort_static_hamiltonian(p, levels);
  const std::array<Matrix, 2> d = ort_drive_operators(levels);
  const double dt = s.total_time / s.steps;
  const int dim = levels * levels;
  Matrix u = Matrix::Identity(dim, dim);
  for (int n = 0; n < s.steps; ++n) {
    u = matexp(h_static + s.env(0, n) * d[0] + s.env(1, n) * d[1], dt) * u;
  }
  return u;
}

}  // namespace qspeed
