#pragma once

#include <cmath>
#include <vector>

#include "qspeed/linalg.hpp"

namespace qspeed {

enum class BasisKind { GellMannProducts, WeylUnitaries };

// Trace-orthogonal operator basis for a two-site system. Every element e
// satisfies tr(e_j^dag e_k) = dim * delta_jk, the normalization assumed by
// the basis-sum form of the average gate fidelity.
struct OperatorBasis {
  int dim = 0;
  BasisKind kind = BasisKind::WeylUnitaries;
  std::vector<Matrix> elements;
};

// Generalized Gell-Mann matrices for one d-level site: the d^2-1 traceless
// Hermitian generators with tr(g_a g_b) = 2 delta_ab. For d=2 these are the
// Pauli matrices, for d=3 the standard Gell-Mann set.
inline std::vector<Matrix> gell_mann_matrices(int d) {
  std::vector<Matrix> gens;
  gens.reserve(d * d - 1);
  for (int j = 0; j < d; ++j) {
    for (int k = j + 1; k < d; ++k) {
      Matrix sym = Matrix::Zero(d, d);
      sym(j, k) = 1.0;
      sym(k, j) = 1.0;
      gens.push_back(sym);
      Matrix asym = Matrix::Zero(d, d);
      asym(j, k) = -IM;
      asym(k, j) = IM;
      gens.push_back(asym);
    }
  }
  for (int l = 1; l < d; ++l) {
    Matrix diag = Matrix::Zero(d, d);
    const double scale = std::sqrt(2.0 / (double(l) * (l + 1)));
    for (int j = 0; j < l; ++j) diag(j, j) = scale;
    diag(l, l) = -scale * l;
    gens.push_back(diag);
  }
  return gens;
}

// Clock-and-shift (Weyl) unitaries X^a Z^b for one d-level site, d^2 in
// total, pairwise trace-orthogonal.
inline std::vector<Matrix> weyl_unitaries(int d) {
  Matrix shift = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) shift((k + 1) % d, k) = 1.0;
  Matrix clock = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    clock(k, k) = std::exp(IM * (2.0 * M_PI * k / d));
  }
  std::vector<Matrix> elems;
  elems.reserve(d * d);
  Matrix xa = Matrix::Identity(d, d);
  for (int a = 0; a < d; ++a) {
    Matrix xazb = xa;
    for (int b = 0; b < d; ++b) {
      elems.push_back(xazb);
      xazb = xazb * clock;
    }
    xa = xa * shift;
  }
  return elems;
}

// Two-site operator basis of dimension d_site^2, with d_site^4 elements.
//
// GellMannProducts: tensor products over {identity, Gell-Mann generators},
// each factor rescaled to tr(e^dag e) = d_site. The generators alone do not
// close the operator space, so the identity factor is required for the
// fidelity basis sum to be complete.
//
// WeylUnitaries: products of single-site clock-and-shift unitaries; unitary
// elements, same trace normalization automatically.
inline OperatorBasis build_basis(int d_site, BasisKind kind) {
  if (d_site < 2 || d_site > 4) {
    throw std::invalid_argument("build_basis: unsupported site dimension " +
                                std::to_string(d_site));
  }
  std::vector<Matrix> site;
  if (kind == BasisKind::GellMannProducts) {
    site.push_back(Matrix::Identity(d_site, d_site));
    const double scale = std::sqrt(d_site / 2.0);
    for (const Matrix& g : gell_mann_matrices(d_site)) {
      site.push_back(scale * g);
    }
  } else {
    site = weyl_unitaries(d_site);
  }
  OperatorBasis basis;
  basis.dim = d_site * d_site;
  basis.kind = kind;
  basis.elements.reserve(site.size() * site.size());
  for (const Matrix& a : site) {
    for (const Matrix& b : site) {
      basis.elements.push_back(kron(a, b));
    }
  }
  return basis;
}

}  // namespace qspeed
