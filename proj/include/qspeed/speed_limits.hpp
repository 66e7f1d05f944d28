#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qspeed/device.hpp"
#include "qspeed/fidelity.hpp"
#include "qspeed/linalg.hpp"

namespace qspeed {

// Canonical (Cartan) class of a two-qubit gate, ordered h1 >= h2 >= |h3|.
// The same triple doubles as the dimensionless multiples of g entering the
// two-qubit minimal gate time (h1 + h2 + |h3|) / g.
struct CanonicalCoefficients {
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;

  void validate() const {
    if (!(h1 >= h2 && h2 >= std::abs(h3))) {
      throw std::invalid_argument(
          "CanonicalCoefficients: require h1 >= h2 >= |h3|");
    }
  }
};

// Canonical class table for the gates this library targets. CZ is locally
// equivalent to [pi/4, 0, 0]; the identity class is all zeros.
inline CanonicalCoefficients canonical_class(const std::string& gate) {
  if (gate == "cz") return {M_PI / 4.0, 0.0, 0.0};
  if (gate == "identity") return {0.0, 0.0, 0.0};
  throw std::invalid_argument("canonical_class: unknown gate '" + gate + "'");
}

// Minimal time to realize a two-qubit gate of class [h1, h2, h3] under an
// XX-type coupling of strength g with unlimited single-qubit control.
inline double qubit_gate_tmin(const CanonicalCoefficients& c, double g) {
  c.validate();
  if (g <= 0) throw std::invalid_argument("qubit_gate_tmin: g must be positive");
  return (c.h1 + c.h2 + std::abs(c.h3)) / g;
}

// Lower bound on the time any interaction h can take a product state to an
// orthogonal state: T >= pi / (2 ||h||).
inline double qudit_lower_bound(const Matrix& h_interaction) {
  if (!is_hermitian(h_interaction, tol::hermitian)) {
    throw std::invalid_argument("qudit_lower_bound: interaction is not Hermitian");
  }
  const double norm = operator_norm(h_interaction);
  if (norm <= 0) {
    throw std::invalid_argument("qudit_lower_bound: interaction norm is zero");
  }
  return M_PI / (2.0 * norm);
}

// <psi| U |psi> for a normalized state. A vanishing overlap certifies that
// the gate maps |psi> to an orthogonal state, which is what activates the
// orthogonalization speed limit.
inline Complex orthogonal_transfer_witness(const TargetGate& target,
                                           const Vector& psi) {
  if (psi.size() != target.dim) {
    throw std::invalid_argument("witness: state dimension does not match gate");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("witness: state is not normalized");
  }
  return psi.dot(target.matrix * psi);
}

// The canonical product witness for the d-level CZ gate:
// |1> tensor (1/sqrt(d)) sum_l |l>. The phases e^{i 2 pi l / d} sum to zero,
// so CZ sends it to an orthogonal state.
inline Vector canonical_cz_witness(int d_site) {
  if (d_site < 2) throw std::invalid_argument("canonical_cz_witness: d_site < 2");
  Vector one = Vector::Zero(d_site);
  one(1) = 1.0;
  Vector uniform = Vector::Constant(d_site, 1.0 / std::sqrt(double(d_site)));
  Vector psi(d_site * d_site);
  for (int k = 0; k < d_site; ++k) {
    for (int l = 0; l < d_site; ++l) {
      psi(k * d_site + l) = one(k) * uniform(l);
    }
  }
  return psi;
}

namespace detail {

// Euclidean projection onto the probability simplex.
inline void project_simplex(std::vector<double>& x) {
  std::vector<double> u = x;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double prefix = 0.0, tau = 0.0;
  int rho = 0;
  for (int j = 0; j < int(u.size()); ++j) {
    prefix += u[j];
    const double t = (prefix - 1.0) / (j + 1);
    if (u[j] - t > 0) {
      rho = j;
      tau = t;
    }
  }
  (void)rho;
  for (double& v : x) v = std::max(0.0, v - tau);
}

// Enumerates all probability vectors of length d with entries k/denom.
inline void simplex_grid(int d, int denom, std::vector<std::vector<double>>& out) {
  std::vector<int> counts(d, 0);
  // iterate compositions of denom into d parts
  std::function<void(int, int)> rec = [&](int pos, int left) {
    if (pos == d - 1) {
      counts[pos] = left;
      std::vector<double> p(d);
      for (int i = 0; i < d; ++i) p[i] = double(counts[i]) / denom;
      out.push_back(std::move(p));
      return;
    }
    for (int c = 0; c <= left; ++c) {
      counts[pos] = c;
      rec(pos + 1, left - c);
    }
  };
  rec(0, denom);
}

}  // namespace detail

// Searches for a product state |a> tensor |b> whose witness overlap under a
// diagonal target vanishes. For diagonal gates the overlap depends only on
// the site probability vectors p, q:
//   <psi| U |psi> = sum_kl p_k q_l u_kl,
// so the search runs over the two probability simplices: a coarse grid pass
// followed by projected gradient refinement. Returns the witness state if the
// final overlap magnitude is at most 1e-8, nothing otherwise.
inline std::optional<Vector> witness_search(const TargetGate& target) {
  const int dim = target.dim;
  const int d = int(std::lround(std::sqrt(double(dim))));
  if (d * d != dim) {
    throw std::invalid_argument("witness_search: gate is not a two-site gate");
  }
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      if (r != c && std::abs(target.matrix(r, c)) > 1e-12) {
        throw std::invalid_argument("witness_search: gate is not diagonal");
      }
    }
  }

  auto overlap = [&](const std::vector<double>& p, const std::vector<double>& q) {
    Complex s{0.0, 0.0};
    for (int k = 0; k < d; ++k) {
      for (int l = 0; l < d; ++l) {
        s += p[k] * q[l] * target.matrix(k * d + l, k * d + l);
      }
    }
    return s;
  };

  std::vector<std::vector<double>> grid;
  detail::simplex_grid(d, 6, grid);
  std::vector<double> best_p, best_q;
  double best_mag = std::numeric_limits<double>::infinity();
  for (const auto& p : grid) {
    for (const auto& q : grid) {
      const double mag = std::abs(overlap(p, q));
      if (mag < best_mag) {
        best_mag = mag;
        best_p = p;
        best_q = q;
      }
    }
  }

  // projected gradient descent on |overlap|^2
  std::vector<double> p = best_p, q = best_q;
  for (int it = 0; it < 2000 && best_mag > 1e-14; ++it) {
    const Complex s = overlap(p, q);
    std::vector<double> gp(d, 0.0), gq(d, 0.0);
    for (int k = 0; k < d; ++k) {
      Complex row{0.0, 0.0}, col{0.0, 0.0};
      for (int l = 0; l < d; ++l) {
        row += q[l] * target.matrix(k * d + l, k * d + l);
        col += p[l] * target.matrix(l * d + k, l * d + k);
      }
      gp[k] = 2.0 * (std::conj(s) * row).real();
      gq[k] = 2.0 * (std::conj(s) * col).real();
    }
    const double step = 0.25;
    for (int k = 0; k < d; ++k) {
      p[k] -= step * gp[k];
      q[k] -= step * gq[k];
    }
    detail::project_simplex(p);
    detail::project_simplex(q);
    const double mag = std::abs(overlap(p, q));
    if (mag < best_mag) {
      best_mag = mag;
      best_p = p;
      best_q = q;
    }
  }

  if (best_mag > 1e-8) return std::nullopt;
  Vector psi(dim);
  for (int k = 0; k < d; ++k) {
    for (int l = 0; l < d; ++l) {
      psi(k * d + l) = std::sqrt(best_p[k]) * std::sqrt(best_q[l]);
    }
  }
  psi /= psi.norm();
  return psi;
}

// Summary of the analytic bounds for one device and gate, as printed by the
// `bound` command.
struct SpeedLimitReport {
  std::string gate_label;
  int d_site = 0;
  double g = 0.0;
  double qubit_tmin = 0.0;         // seconds
  double qudit_lower_bound = 0.0;  // seconds, pi / (2 ||H0||)
  double ratio = 0.0;              // qudit_lower_bound / qubit_tmin
  double coupling_norm = 0.0;      // ||H0||, rad/s
  Vector witness_state;            // empty when no witness was found
  Complex witness_overlap{0.0, 0.0};
  bool witness_found = false;
};

inline SpeedLimitReport speed_limit_report(const DeviceParams& p,
                                           const std::string& gate = "cz") {
  p.validate();
  SpeedLimitReport rep;
  rep.gate_label = gate;
  rep.d_site = p.d_site;
  rep.g = p.g;
  rep.qubit_tmin = qubit_gate_tmin(canonical_class(gate), p.g);
  const Matrix h0 = coupling_hamiltonian(p);
  rep.coupling_norm = operator_norm(h0);
  rep.qudit_lower_bound = qspeed::qudit_lower_bound(h0);
  rep.ratio = rep.qudit_lower_bound / rep.qubit_tmin;
  if (gate == "cz") {
    const TargetGate target = target_cz(p.d_site);
    if (auto psi = witness_search(target)) {
      rep.witness_found = true;
      rep.witness_state = *psi;
      rep.witness_overlap = orthogonal_transfer_witness(target, *psi);
    }
  }
  return rep;
}

}  // namespace qspeed
