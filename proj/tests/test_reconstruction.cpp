#include <doctest.h>

#include "oracles.hpp"
#include "spsense/datasets.hpp"
#include "spsense/reconstruction.hpp"

using namespace spsense;

namespace {

const Vector& grid() {
  static const Vector x = unit_grid(1001);
  return x;
}

const Matrix& monomials() {
  static const Matrix v = vandermonde_rows(grid(), 11);
  return v;
}

SsporModel vandermonde_model(std::optional<Index> p = 10, WarningSink sink = {}) {
  return sspor_fit(monomials(), BasisSpec{}, std::nullopt, p, 0, std::move(sink));
}

BasisSpec svd_spec(Index r) {
  BasisSpec spec;
  spec.kind = BasisKind::Svd;
  spec.n_basis_modes = r;
  return spec;
}

IndexList range(Index lo, Index hi) {
  IndexList out;
  for (Index p = lo; p <= hi; ++p) out.push_back(p);
  return out;
}

}  // namespace

TEST_SUITE("reconstruction") {
  TEST_CASE("vandermonde model selects the printed locations") {
    const SsporModel model = vandermonde_model();
    const std::vector<double> expected = {1.0, 0.641, 0.0, 0.884, 0.289, 0.47, 0.099, 0.958, 0.763, 0.036};
    const IndexList sensors = model.selected_sensors();
    REQUIRE(sensors.size() == 10);
    for (std::size_t k = 0; k < 10; ++k) CHECK(sensors[k] == static_cast<Index>(std::lround(expected[k] * 1000)));
    CHECK(model.ranking().n_meaningful == 11);
  }

  TEST_CASE("default sensor count is the meaningful prefix") {
    CHECK(vandermonde_model(std::nullopt).n_sensors() == 11);
  }

  TEST_CASE("set_n_sensors boundaries and oversampling") {
    std::vector<std::string> warnings;
    SsporModel model = vandermonde_model(10, collect_warnings(warnings));
    model.set_n_sensors(1);
    CHECK(model.selected_sensors() == IndexList{1000});
    CHECK(warnings.empty());
    model.set_n_sensors(12);
    CHECK(warnings.size() == 1);
    CHECK(model.selected_sensors()[11] == model.ranking().order[11]);
    const SsporModel again = vandermonde_model(12);
    CHECK(again.selected_sensors() == model.selected_sensors());
    CHECK_THROWS_AS(model.set_n_sensors(0), Error);
    CHECK_THROWS_AS(model.set_n_sensors(1002), Error);
  }

  TEST_CASE("identity data with a full svd basis ranks every location") {
    const SsporModel model = sspor_fit(Matrix::Identity(7, 7), svd_spec(7));
    CHECK(model.ranking().n_meaningful == 7);
    CHECK(is_permutation_of_range(model.ranking().order, 7));
  }

  TEST_CASE("n_sensors beyond the location count is rejected") {
    try {
      sspor_fit(Matrix::Identity(5, 5), svd_spec(5), std::nullopt, 6);
      FAIL("expected OutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::OutOfRange);
    }
  }

  TEST_CASE("in-span signals are reconstructed exactly") {
    const Matrix x = low_rank_matrix(30, 200, 6, 50);
    const SsporModel model = sspor_fit(x, svd_spec(6), std::nullopt, 6);
    SeededRng rng(51);
    for (int trial = 0; trial < 5; ++trial) {
      const Vector state = model.basis().matrix_representation() * gaussian_matrix(6, 1, rng);
      Vector y(6);
      const IndexList sensors = model.selected_sensors();
      for (Index i = 0; i < 6; ++i) y(i) = state(sensors[static_cast<std::size_t>(i)]);
      CHECK((model.predict(y) - state).norm() < 1e-8 * state.norm());
    }
    CHECK(model.reconstruction_error(x, IndexList{6})[0] < 1e-8);
  }

  TEST_CASE("zero measurements reconstruct to zero") {
    const SsporModel model = vandermonde_model();
    CHECK(model.predict(Vector::Zero(10)).isZero(0.0));
    CHECK_THROWS_AS(model.predict(Vector::Zero(9)), Error);
  }

  TEST_CASE("learned points interpolate |x^2 - 1/2| better than equispaced points") {
    const SsporModel model = vandermonde_model();
    const Matrix f = abs_quadratic(grid());
    const IndexList sensors = model.selected_sensors();
    Vector y(10);
    for (Index i = 0; i < 10; ++i) y(i) = f(0, sensors[static_cast<std::size_t>(i)]);
    const Vector learned = model.predict(y);

    // Independent minimum-norm fit at the learned points.
    const Matrix psi = monomials().transpose();
    Matrix sampled(10, 11);
    for (Index i = 0; i < 10; ++i) sampled.row(i) = psi.row(sensors[static_cast<std::size_t>(i)]);
    const Vector theta = sampled.completeOrthogonalDecomposition().solve(y);
    CHECK((psi * theta - learned).norm() < 1e-8 * learned.norm());

    // Equispaced oracle: 11 nodes, square least squares in the same basis.
    Matrix equi(11, 11);
    Vector ye(11);
    for (Index i = 0; i < 11; ++i) {
      equi.row(i) = psi.row(100 * i);
      ye(i) = f(0, 100 * i);
    }
    const Vector equi_fit = psi * equi.colPivHouseholderQr().solve(ye);

    const double learned_rmse = oracle::naive_rmse(learned.transpose(), f);
    const double equi_rmse = oracle::naive_rmse(equi_fit.transpose(), f);
    CHECK(learned_rmse < equi_rmse);
  }

  TEST_CASE("error curve on |x^2 - 1/2| ends below where it starts") {
    const SsporModel model = vandermonde_model();
    const auto curve = model.reconstruction_error(abs_quadratic(grid()), range(2, 11));
    REQUIRE(curve.size() == 10);
    CHECK(curve.back() < curve.front());
    CHECK(model.n_sensors() == 10);
  }

  TEST_CASE("reconstruction_error matches a hand-rolled loop") {
    const Matrix x = low_rank_matrix(20, 60, 5, 52);
    const SsporModel model = sspor_fit(x, svd_spec(4), std::nullopt, 4);
    SeededRng rng(53);
    const Matrix test = gaussian_matrix(3, 60, rng);
    const IndexList ps{1, 3, 4, 9};
    const auto errors = model.reconstruction_error(test, ps);
    const Matrix psi = model.basis().matrix_representation();
    for (std::size_t k = 0; k < ps.size(); ++k) {
      const IndexList sensors = model.selected_sensors(ps[k]);
      Matrix c(ps[k], 4);
      Matrix y(ps[k], 3);
      for (Index i = 0; i < ps[k]; ++i) {
        c.row(i) = psi.row(sensors[static_cast<std::size_t>(i)]);
        y.row(i) = test.col(sensors[static_cast<std::size_t>(i)]).transpose();
      }
      const Matrix theta = c.completeOrthogonalDecomposition().solve(y);
      const Matrix states = (psi * theta).transpose();
      CHECK(std::abs(errors[k] - oracle::naive_rmse(states, test)) < 1e-10);
    }
    CHECK(model.n_sensors() == 4);
  }

  TEST_CASE("selected sensor sets are nested prefixes") {
    const SsporModel model = vandermonde_model();
    const IndexList small = model.selected_sensors(3);
    const IndexList large = model.selected_sensors(40);
    CHECK(IndexList(large.begin(), large.begin() + 3) == small);
  }

  TEST_CASE("constant signal lies in a basis holding the constant mode") {
    BasisSpec constant_only;
    constant_only.n_basis_modes = 1;  // row 0 of the monomials is x^0
    const SsporModel model = sspor_fit(monomials(), constant_only, std::nullopt, 1);
    const Matrix c = Matrix::Constant(2, 1001, 2.5);
    for (double e : model.reconstruction_error(c, IndexList{1, 2, 5, 11, 50})) CHECK(e < 1e-10);
    const SsporModel full = vandermonde_model(11);
    CHECK(full.reconstruction_error(c, IndexList{11})[0] < 1e-10);
  }

  TEST_CASE("update_n_basis_modes shrinks and re-ranks") {
    SsporModel model = vandermonde_model();
    model.update_n_basis_modes(5);
    CHECK(model.ranking().n_meaningful == 5);
    try {
      model.update_n_basis_modes(11);
      FAIL("expected TooManyModes");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooManyModes);
    }
  }

  TEST_CASE("shrunk svd model ranks like a fresh fit") {
    SeededRng rng(54);
    const Matrix x = gaussian_matrix(30, 40, rng);
    SsporModel shrunk = sspor_fit(x, svd_spec(10), std::nullopt, 5, 9);
    shrunk.update_n_basis_modes(5);
    const SsporModel fresh = sspor_fit(x, svd_spec(5), std::nullopt, 5, 9);
    CHECK(shrunk.ranking().order == fresh.ranking().order);
  }

  TEST_CASE("singular sampled system is flagged, not fatal") {
    Matrix x(2, 6);
    x << 1, 2, 3, 4, 5, 6, 1, 2, 3, 4, 5, 6;
    const SsporModel model = sspor_fit(x, BasisSpec{}, std::nullopt, 2);
    const Reconstruction rec = model.reconstruct(Matrix::Ones(1, 2));
    CHECK(rec.ill_conditioned);
    CHECK(rec.states.allFinite());
  }
}
