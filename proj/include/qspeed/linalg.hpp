#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace qspeed {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex IM{0.0, 1.0};

// Default numerical tolerances. Double precision at dims <= 25 leaves
// plenty of headroom below these.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double unitary = 1e-10;
inline constexpr double equality = 1e-9;
}  // namespace tol

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double tolerance = tol::hermitian) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tolerance;
}

inline bool is_unitary(const Matrix& m, double tolerance = tol::unitary) {
  if (m.rows() != m.cols()) return false;
  Matrix residual = m.adjoint() * m;
  residual -= Matrix::Identity(m.rows(), m.cols());
  return max_abs(residual) <= tolerance;
}

// Kronecker product: (a kron b)[i*bd+k, j*bd+l] = a[i,j] * b[k,l].
inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// exp(-i h t) for Hermitian h, via eigendecomposition h = V diag(w) V^dag.
// Keeps the result unitary to solver precision, which matters when long
// products of these factors are formed.
inline Matrix matexp(const Matrix& h, double t) {
  if (!is_hermitian(h)) {
    throw std::invalid_argument("matexp: input matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(h);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("matexp: eigendecomposition failed");
  }
  const Eigen::VectorXd& w = eig.eigenvalues();
  const Matrix& v = eig.eigenvectors();
  Vector phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    phases(k) = std::exp(-IM * (w(k) * t));
  }
  return v * phases.asDiagonal() * v.adjoint();
}

// Largest singular value.
inline double operator_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()(0);
}

// Truncated lowering operator, <k|a|l> = sqrt(l) delta_{k,l-1}.
inline Matrix annihilation(int d) {
  if (d < 2) {
    throw std::invalid_argument("annihilation: dimension must be at least 2");
  }
  Matrix a = Matrix::Zero(d, d);
  for (int l = 1; l < d; ++l) a(l - 1, l) = std::sqrt(double(l));
  return a;
}

enum class Quadrature { X, Y };

// Single-site drive operator for the |j> <-> |j+1> transition: the X
// quadrature has unit matrix elements, the Y quadrature -i/+i, matching
// the Gell-Mann matrices of the corresponding transition.
inline Matrix transition_operator(int d, int j, Quadrature q) {
  if (d < 2) {
    throw std::invalid_argument("transition_operator: dimension must be at least 2");
  }
  if (j < 0 || j > d - 2) {
    throw std::invalid_argument("transition_operator: transition index " +
                                std::to_string(j) + " out of range for d=" +
                                std::to_string(d));
  }
  Matrix op = Matrix::Zero(d, d);
  if (q == Quadrature::X) {
    op(j, j + 1) = 1.0;
    op(j + 1, j) = 1.0;
  } else {
    op(j, j + 1) = -IM;
    op(j + 1, j) = IM;
  }
  return op;
}

}  // namespace qspeed
