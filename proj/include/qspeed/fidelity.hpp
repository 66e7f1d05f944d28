#pragma once

#include <cmath>
#include <string>

#include "qspeed/basis.hpp"
#include "qspeed/linalg.hpp"

namespace qspeed {

struct TargetGate {
  int dim = 0;
  Matrix matrix;
  std::string label;

  static TargetGate make(Matrix m, std::string label) {
    if (!is_unitary(m, 1e-12)) {
      throw std::invalid_argument("TargetGate: matrix is not unitary");
    }
    TargetGate t;
    t.dim = int(m.rows());
    t.matrix = std::move(m);
    t.label = std::move(label);
    return t;
  }
};

// Qudit CZ gate: diagonal with phase exp(i 2 pi k l / d_site) on |k>|l>.
inline TargetGate target_cz(int d_site) {
  if (d_site < 2 || d_site > 4) {
    throw std::invalid_argument("target_cz: unsupported site dimension " +
                                std::to_string(d_site));
  }
  const int dim = d_site * d_site;
  Matrix m = Matrix::Zero(dim, dim);
  for (int k = 0; k < d_site; ++k) {
    for (int l = 0; l < d_site; ++l) {
      m(k * d_site + l, k * d_site + l) =
          std::exp(IM * (2.0 * M_PI * k * l / d_site));
    }
  }
  return TargetGate::make(std::move(m), "cz" + std::to_string(d_site));
}

// Average gate fidelity of a unitary channel against a unitary target,
// closed form (|tr(T^dag R)|^2 + d) / (d (d+1)).
inline double avg_gate_fidelity_closed(const TargetGate& target,
                                       const Matrix& realized) {
  if (realized.rows() != target.dim || realized.cols() != target.dim) {
    throw std::invalid_argument("avg_gate_fidelity_closed: dimension mismatch");
  }
  const double d = double(target.dim);
  const double overlap = std::abs((target.matrix.adjoint() * realized).trace());
  return (overlap * overlap + d) / (d * (d + 1.0));
}

// Same quantity evaluated as the basis sum
//   F = [ sum_j tr(T B_j^dag T^dag R B_j R^dag) + d^2 ] / (d^2 (d+1)),
// over a complete trace-orthogonal operator basis. Kept as an independent
// route and cross-checked against the closed form.
inline double avg_gate_fidelity_basis(const TargetGate& target,
                                      const Matrix& realized,
                                      const OperatorBasis& basis) {
  if (realized.rows() != target.dim || realized.cols() != target.dim ||
      basis.dim != target.dim) {
    throw std::invalid_argument("avg_gate_fidelity_basis: dimension mismatch");
  }
  if (!is_unitary(realized, 1e-8)) {
    throw std::invalid_argument("avg_gate_fidelity_basis: realized gate is not unitary");
  }
  const double d = double(target.dim);
  const Matrix t_dag = target.matrix.adjoint();
  const Matrix r_dag = realized.adjoint();
  Complex sum = 0.0;
  for (const Matrix& b : basis.elements) {
    sum += (target.matrix * b.adjoint() * t_dag * realized * b * r_dag).trace();
  }
  if (std::abs(sum.imag()) > 1e-9) {
    throw std::runtime_error("avg_gate_fidelity_basis: basis sum has imaginary residue");
  }
  return (sum.real() + d * d) / (d * d * (d + 1.0));
}

inline double infidelity(const TargetGate& target, const Matrix& realized) {
  return 1.0 - avg_gate_fidelity_closed(target, realized);
}

// Row/column indices of the computational two-qudit product states inside a
// model with `levels` states per site.
inline std::vector<int> computational_indices(int d_site, int levels) {
  std::vector<int> idx;
  idx.reserve(d_site * d_site);
  for (int k = 0; k < d_site; ++k)
    for (int l = 0; l < d_site; ++l) idx.push_back(k * levels + l);
  return idx;
}

// Target gate embedded in the enlarged model space, zero on leakage rows
// and columns.
inline Matrix embed_target(const TargetGate& target, int d_site, int levels) {
  const std::vector<int> idx = computational_indices(d_site, levels);
  Matrix big = Matrix::Zero(levels * levels, levels * levels);
  for (int r = 0; r < target.dim; ++r)
    for (int c = 0; c < target.dim; ++c) big(idx[r], idx[c]) = target.matrix(r, c);
  return big;
}

// Average fidelity of a gate realized on an enlarged space that includes
// leakage levels. The realized unitary is projected onto the computational
// subspace and the basis-sum fidelity form is evaluated for the resulting
// trace-decreasing block, which reduces to the closed form with the
// projected block in place of the unitary.
inline double subspace_fidelity(const TargetGate& target,
                                const Matrix& realized, int d_site_model) {
  const int big_dim = d_site_model * d_site_model;
  if (realized.rows() != big_dim || realized.cols() != big_dim ||
      realized.rows() < target.dim) {
    throw std::invalid_argument("subspace_fidelity: dimension mismatch");
  }
  const int d_site = int(std::lround(std::sqrt(double(target.dim))));
  if (d_site * d_site != target.dim || d_site > d_site_model) {
    throw std::invalid_argument("subspace_fidelity: target is not a two-qudit gate "
                                "inside the model space");
  }
  const std::vector<int> idx = computational_indices(d_site, d_site_model);
  Matrix block(target.dim, target.dim);
  for (int r = 0; r < target.dim; ++r)
    for (int c = 0; c < target.dim; ++c) block(r, c) = realized(idx[r], idx[c]);
  const double d = double(target.dim);
  const double overlap = std::abs((target.matrix.adjoint() * block).trace());
  return (overlap * overlap + d) / (d * (d + 1.0));
}

}  // namespace qspeed
