#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "test_util.hpp"

using namespace qspeed;

TEST_CASE("qudit CZ target", "[fidelity]") {
  SECTION("qubit case is diag(1,1,1,-1)") {
    const TargetGate cz = target_cz(2);
    REQUIRE(cz.dim == 4);
    REQUIRE(cz.label == "cz2");
    Matrix want = Matrix::Identity(4, 4);
    want(3, 3) = -1.0;
    REQUIRE(max_abs(cz.matrix - want) < 1e-15);
  }

  SECTION("qutrit phases follow k*l mod 3") {
    const TargetGate cz = target_cz(3);
    const int exponents[9] = {0, 0, 0, 0, 1, 2, 0, 2, 1};
    for (int i = 0; i < 9; ++i) {
      const Complex want = std::exp(IM * (2.0 * M_PI * exponents[i] / 3.0));
      REQUIRE(std::abs(cz.matrix(i, i) - want) < 1e-14);
      for (int j = 0; j < 9; ++j) {
        if (j != i) REQUIRE(cz.matrix(i, j) == Complex(0.0));
      }
    }
  }

  SECTION("ququart |22> picks up a full 2 pi") {
    const TargetGate cz = target_cz(4);
    REQUIRE(std::abs(cz.matrix(2 * 4 + 2, 2 * 4 + 2) - Complex(1.0)) < 1e-14);
  }

  SECTION("d-th power is the identity") {
    for (int d : {2, 3, 4}) {
      const TargetGate cz = target_cz(d);
      Matrix power = Matrix::Identity(cz.dim, cz.dim);
      for (int k = 0; k < d; ++k) power = power * cz.matrix;
      REQUIRE(max_abs(power - Matrix::Identity(cz.dim, cz.dim)) < 1e-12);
    }
  }

  SECTION("unsupported dimensions and non-unitary targets are rejected") {
    REQUIRE_THROWS_AS(target_cz(1), std::invalid_argument);
    REQUIRE_THROWS_AS(target_cz(5), std::invalid_argument);
    REQUIRE_THROWS_AS(TargetGate::make(2.0 * Matrix::Identity(3, 3), "bad"),
                      std::invalid_argument);
  }
}

TEST_CASE("average gate fidelity, closed form", "[fidelity]") {
  std::mt19937_64 rng(21);

  SECTION("perfect gate") {
    for (int d : {2, 3, 4}) {
      const TargetGate cz = target_cz(d);
      REQUIRE(avg_gate_fidelity_closed(cz, cz.matrix) == Catch::Approx(1.0).margin(1e-12));
      REQUIRE(infidelity(cz, cz.matrix) == Catch::Approx(0.0).margin(1e-12));
    }
  }

  SECTION("identity against CZ") {
    // |tr(CZ_d^dag I)|^2 = d_site^2, so F = (d_site^2 + d) / (d (d+1))
    REQUIRE(avg_gate_fidelity_closed(target_cz(2), Matrix::Identity(4, 4)) ==
            Catch::Approx(0.4).margin(1e-12));
    REQUIRE(infidelity(target_cz(2), Matrix::Identity(4, 4)) ==
            Catch::Approx(0.6).margin(1e-12));
    REQUIRE(avg_gate_fidelity_closed(target_cz(3), Matrix::Identity(9, 9)) ==
            Catch::Approx(0.2).margin(1e-12));
    REQUIRE(avg_gate_fidelity_closed(target_cz(4), Matrix::Identity(16, 16)) ==
            Catch::Approx(2.0 / 17.0).margin(1e-12));
  }

  SECTION("global phase invariance") {
    const TargetGate cz = target_cz(3);
    const Matrix phased = std::exp(IM * 0.7531) * cz.matrix;
    REQUIRE(avg_gate_fidelity_closed(cz, phased) == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("symmetry and left invariance") {
    const Matrix u = testutil::random_unitary(9, rng);
    const Matrix v = testutil::random_unitary(9, rng);
    const Matrix w = testutil::random_unitary(9, rng);
    const TargetGate tu = TargetGate::make(u, "u");
    const TargetGate tv = TargetGate::make(v, "v");
    const double f_uv = avg_gate_fidelity_closed(tu, v);
    REQUIRE(avg_gate_fidelity_closed(tv, u) == Catch::Approx(f_uv).margin(1e-12));
    const TargetGate twu = TargetGate::make(w * u, "wu");
    REQUIRE(avg_gate_fidelity_closed(twu, w * v) == Catch::Approx(f_uv).margin(1e-9));
  }

  SECTION("range") {
    for (int trial = 0; trial < 50; ++trial) {
      const int d_site = 2 + trial % 3;
      const Matrix u = testutil::random_unitary(d_site * d_site, rng);
      const double f = avg_gate_fidelity_closed(target_cz(d_site), u);
      REQUIRE(f >= -1e-9);
      REQUIRE(f <= 1.0 + 1e-9);
    }
  }

  SECTION("dimension mismatch is rejected") {
    REQUIRE_THROWS_AS(avg_gate_fidelity_closed(target_cz(2), Matrix::Identity(9, 9)),
                      std::invalid_argument);
  }
}

TEST_CASE("basis-sum fidelity agrees with the closed form", "[fidelity]") {
  std::mt19937_64 rng(22);
  for (int d_site : {2, 3}) {
    const OperatorBasis weyl = build_basis(d_site, BasisKind::WeylUnitaries);
    const OperatorBasis gell = build_basis(d_site, BasisKind::GellMannProducts);
    for (int trial = 0; trial < 50; ++trial) {
      const TargetGate t =
          TargetGate::make(testutil::random_unitary(d_site * d_site, rng), "t");
      const Matrix r = testutil::random_unitary(d_site * d_site, rng);
      const double closed = avg_gate_fidelity_closed(t, r);
      const double via_weyl = avg_gate_fidelity_basis(t, r, weyl);
      const double via_gell = avg_gate_fidelity_basis(t, r, gell);
      REQUIRE(via_weyl == Catch::Approx(closed).margin(1e-9));
      REQUIRE(via_gell == Catch::Approx(closed).margin(1e-9));
      // the two bases are different decompositions of the same sum
      REQUIRE(via_weyl == Catch::Approx(via_gell).margin(1e-9));
    }
  }

  SECTION("non-unitary realized gate is rejected") {
    const OperatorBasis basis = build_basis(2, BasisKind::WeylUnitaries);
    REQUIRE_THROWS_AS(
        avg_gate_fidelity_basis(target_cz(2), 0.5 * Matrix::Identity(4, 4), basis),
        std::invalid_argument);
  }

  SECTION("basis dimension mismatch is rejected") {
    const OperatorBasis basis = build_basis(3, BasisKind::WeylUnitaries);
    REQUIRE_THROWS_AS(avg_gate_fidelity_basis(target_cz(2), Matrix::Identity(4, 4), basis),
                      std::invalid_argument);
  }
}

TEST_CASE("computational subspace bookkeeping", "[fidelity]") {
  SECTION("index map") {
    const std::vector<int> idx = computational_indices(3, 4);
    const std::vector<int> want{0, 1, 2, 4, 5, 6, 8, 9, 10};
    REQUIRE(idx == want);
    // trivial embedding: identity map
    const std::vector<int> flat = computational_indices(3, 3);
    for (int i = 0; i < 9; ++i) REQUIRE(flat[i] == i);
  }

  SECTION("embedded target") {
    const TargetGate cz = target_cz(3);
    const Matrix big = embed_target(cz, 3, 4);
    REQUIRE(big.rows() == 16);
    const std::vector<int> idx = computational_indices(3, 4);
    for (int r = 0; r < 9; ++r)
      for (int c = 0; c < 9; ++c)
        REQUIRE(big(idx[r], idx[c]) == cz.matrix(r, c));
    // leakage rows and columns are zero
    for (int r = 0; r < 16; ++r) {
      if (std::find(idx.begin(), idx.end(), r) != idx.end()) continue;
      for (int c = 0; c < 16; ++c) {
        REQUIRE(big(r, c) == Complex(0.0));
        REQUIRE(big(c, r) == Complex(0.0));
      }
    }
  }
}

TEST_CASE("subspace fidelity with leakage levels", "[fidelity]") {
  std::mt19937_64 rng(23);
  const TargetGate cz = target_cz(3);

  SECTION("block-diagonal perfect gate") {
    Matrix big = embed_target(cz, 3, 4);
    for (int r = 0; r < 16; ++r) {
      if (big.row(r).norm() < 0.5) big(r, r) = 1.0;  // park leakage
    }
    REQUIRE(is_unitary(big, 1e-12));
    REQUIRE(subspace_fidelity(cz, big, 4) == Catch::Approx(1.0).margin(1e-12));
  }

  SECTION("complete leakage leaves only the offset term") {
    REQUIRE(subspace_fidelity(cz, Matrix::Zero(16, 16), 4) ==
            Catch::Approx(0.1).margin(1e-15));
  }

  SECTION("no extra levels reduces to the closed form") {
    const Matrix u = testutil::random_unitary(9, rng);
    REQUIRE(subspace_fidelity(cz, u, 3) ==
            Catch::Approx(avg_gate_fidelity_closed(cz, u)).margin(1e-12));
  }

  SECTION("identity in the enlarged space") {
    REQUIRE(subspace_fidelity(cz, Matrix::Identity(16, 16), 4) ==
            Catch::Approx(0.2).margin(1e-12));
  }

  SECTION("matches the explicit basis sum for a leaky block") {
    // project a random 16x16 unitary onto the computational block and
    // evaluate the basis-sum form directly for the trace-decreasing map
    const Matrix u = testutil::random_unitary(16, rng);
    const std::vector<int> idx = computational_indices(3, 4);
    Matrix block(9, 9);
    for (int r = 0; r < 9; ++r)
      for (int c = 0; c < 9; ++c) block(r, c) = u(idx[r], idx[c]);
    const OperatorBasis basis = build_basis(3, BasisKind::WeylUnitaries);
    Complex sum = 0.0;
    for (const Matrix& b : basis.elements) {
      sum += (cz.matrix * b.adjoint() * cz.matrix.adjoint() * block * b *
              block.adjoint())
                 .trace();
    }
    const double via_sum = (sum.real() + 81.0) / (81.0 * 10.0);
    REQUIRE(std::abs(sum.imag()) < 1e-9);
    REQUIRE(subspace_fidelity(cz, u, 4) == Catch::Approx(via_sum).margin(1e-9));
  }

  SECTION("model-space mismatches are rejected") {
    REQUIRE_THROWS_AS(subspace_fidelity(cz, Matrix::Identity(9, 9), 4),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(subspace_fidelity(cz, Matrix::Identity(4, 4), 2),
                      std::invalid_argument);
  }
}
