#include <doctest.h>

#include "spsense/basis.hpp"
#include "spsense/datasets.hpp"

using namespace spsense;

namespace {

BasisSpec svd_spec(Index r) {
  BasisSpec spec;
  spec.kind = BasisKind::Svd;
  spec.n_basis_modes = r;
  return spec;
}

}  // namespace

TEST_SUITE("basis") {
  TEST_CASE("svd basis on identity data") {
    const FittedBasis b = fit_basis(svd_spec(4), Matrix::Identity(4, 4));
    REQUIRE(b.singular_values());
    for (Index k = 0; k < 4; ++k) CHECK((*b.singular_values())(k) == doctest::Approx(1.0));
    CHECK((b.modes().transpose() * b.modes() - Matrix::Identity(4, 4)).norm() < 1e-10);
  }

  TEST_CASE("identity basis returns the snapshots as modes") {
    SeededRng rng(1);
    const Matrix x = gaussian_matrix(11, 30, rng);
    const FittedBasis b = fit_basis(BasisSpec{}, x);
    CHECK(b.max_modes() == 11);
    CHECK(b.modes() == x.transpose());
  }

  TEST_CASE("identity basis mode limits") {
    BasisSpec spec;
    spec.n_basis_modes = 12;
    CHECK_THROWS_AS(fit_basis(spec, Matrix::Ones(11, 5)), Error);
    spec.n_basis_modes = 3;
    CHECK(fit_basis(spec, Matrix::Ones(11, 5)).max_modes() == 3);
  }

  TEST_CASE("random projection is seeded and scaled") {
    BasisSpec spec;
    spec.kind = BasisKind::RandomProjection;
    spec.n_basis_modes = 30;
    spec.seed = 5;
    const Matrix x = Matrix::Ones(10, 400);
    const FittedBasis a = fit_basis(spec, x);
    const FittedBasis b = fit_basis(spec, x);
    CHECK(a.modes() == b.modes());
    CHECK(a.modes().rows() == 400);
    CHECK(a.modes().cols() == 30);
    // Entry variance 1/30.
    const double var = a.modes().squaredNorm() / static_cast<double>(a.modes().size());
    CHECK(var == doctest::Approx(1.0 / 30.0).epsilon(0.05));
    spec.seed = 6;
    CHECK(fit_basis(spec, x).modes() != a.modes());
  }

  TEST_CASE("matrix_representation is a prefix and never recomputes") {
    SeededRng rng(2);
    const FittedBasis b = fit_basis(svd_spec(8), gaussian_matrix(20, 15, rng));
    CHECK(b.matrix_representation(8) == b.modes());
    CHECK(b.matrix_representation(1) == b.modes().leftCols(1));
    const Matrix three = b.matrix_representation(3);
    const Matrix five = b.matrix_representation(5);
    CHECK(three == five.leftCols(3));
    CHECK_THROWS_AS(b.matrix_representation(9), Error);
  }

  TEST_CASE("svd modes stay orthonormal at every active count") {
    SeededRng rng(3);
    const FittedBasis b = fit_basis(svd_spec(10), gaussian_matrix(25, 18, rng));
    for (Index r = 1; r <= 10; ++r) {
      const Matrix psi = b.shrink_modes(r).matrix_representation();
      CHECK((psi.transpose() * psi - Matrix::Identity(r, r)).norm() < 1e-10);
    }
  }

  TEST_CASE("shrink_modes keeps modes and refuses growth") {
    SeededRng rng(4);
    const FittedBasis b = fit_basis(svd_spec(10), gaussian_matrix(20, 16, rng));
    const FittedBasis five = b.shrink_modes(5);
    const FittedBasis three = five.shrink_modes(3);
    CHECK(three.active_modes() == 3);
    CHECK(three.modes() == b.modes());
    CHECK(b.active_modes() == 10);
    try {
      b.shrink_modes(11);
      FAIL("expected TooManyModes");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooManyModes);
    }
    CHECK_THROWS_AS(three.shrink_modes(5), Error);
  }

  TEST_CASE("shrink matches a fresh fit under the sign convention") {
    SeededRng rng(5);
    const Matrix x = gaussian_matrix(30, 20, rng);
    const Matrix shrunk = fit_basis(svd_spec(10), x).shrink_modes(5).matrix_representation();
    const Matrix fresh = fit_basis(svd_spec(5), x).matrix_representation();
    CHECK((shrunk - fresh).norm() < 1e-10);
    for (Index k = 0; k < 5; ++k) {
      Index arg = 0;
      fresh.col(k).cwiseAbs().maxCoeff(&arg);
      CHECK(fresh(arg, k) > 0.0);
    }
  }

  TEST_CASE("randomized svd basis spans the data of a low-rank set") {
    const Matrix x = low_rank_matrix(40, 60, 4, 9);
    BasisSpec spec = svd_spec(4);
    spec.randomized = true;
    spec.seed = 3;
    const FittedBasis b = fit_basis(spec, x);
    const Matrix psi = b.matrix_representation();
    const Matrix projected = x * psi * psi.transpose();
    CHECK((projected - x).norm() < 1e-8 * x.norm());
    CHECK(fit_basis(spec, x).modes() == b.modes());
  }

  TEST_CASE("svd basis limits") {
    CHECK_THROWS_AS(fit_basis(svd_spec(6), Matrix::Ones(5, 8)), Error);
    BasisSpec no_modes;
    no_modes.kind = BasisKind::Svd;
    CHECK_THROWS_AS(fit_basis(no_modes, Matrix::Ones(5, 8)), Error);
  }

  TEST_CASE("non-finite data is rejected") {
    Matrix x = Matrix::Ones(3, 3);
    x(1, 1) = std::nan("");
    try {
      fit_basis(BasisSpec{}, x);
      FAIL("expected NonFiniteValue");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonFiniteValue);
    }
  }
}
