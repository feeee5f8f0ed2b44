#include <doctest.h>

#include <algorithm>
#include <set>

#include "spsense/classification.hpp"
#include "spsense/datasets.hpp"
#include "spsense/io.hpp"

using namespace spsense;

namespace {

BasisSpec svd_spec(Index r) {
  BasisSpec spec;
  spec.kind = BasisKind::Svd;
  spec.n_basis_modes = r;
  return spec;
}

SparseSolution<double> solution_with_row_norms(const std::vector<double>& norms) {
  SparseSolution<double> sol;
  sol.s = Matrix::Zero(static_cast<Index>(norms.size()), 2);
  for (std::size_t i = 0; i < norms.size(); ++i) sol.s(static_cast<Index>(i), 1) = norms[i];
  return sol;
}

// c classes in n dims; class k is shifted along a few random directions.
LabeledData multiclass_problem(Index per_class, Index n, int c, std::uint64_t seed) {
  SeededRng rng(seed);
  const Matrix shifts = 3.0 * gaussian_matrix(c, n, rng);
  LabeledData out;
  out.values = gaussian_matrix(per_class * c, n, rng);
  for (Index i = 0; i < out.values.rows(); ++i) {
    const Label label = static_cast<Label>(i % c);
    out.values.row(i) += shifts.row(label);
    out.labels.push_back(label);
  }
  return out;
}

const Dataset& digits() {
  static const Dataset d = read_delimited(SPSENSE_DATA_DIR "/digits.csv", CsvOptions{',', true});
  return d;
}

SspocOptions digit_options(Index n_sensors) {
  SspocOptions options;
  options.n_sensors = n_sensors;
  options.l1_penalty = 1e-3;
  return options;
}

bool no_duplicates(IndexList v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) == v.end();
}

}  // namespace

TEST_SUITE("classification") {
  TEST_CASE("select sensors by row norm") {
    const auto sol = solution_with_row_norms({0, 3, 0, 1});
    CHECK(select_sensors_from_solution(sol, std::nullopt, 1e-10) == IndexList{1, 3});
    CHECK(select_sensors_from_solution(sol, 1, 1e-10) == IndexList{1});
    CHECK(select_sensors_from_solution(solution_with_row_norms({0, 0, 0}), std::nullopt, 1e-10).empty());
  }

  TEST_CASE("padding past the nonzero rows warns") {
    std::vector<std::string> warnings;
    const auto sol = solution_with_row_norms({0, 3, 0, 1});
    CHECK(select_sensors_from_solution(sol, 3, 1e-10, collect_warnings(warnings)) == IndexList{1, 3, 0});
    CHECK(warnings.size() == 1);
  }

  TEST_CASE("binary problem finds the single informative location") {
    SeededRng rng(60);
    const Index n = 20, m = 60, j_star = 13;
    Matrix x = gaussian_matrix(m, n, rng);
    LabelList y(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
      y[static_cast<std::size_t>(i)] = static_cast<Label>(i % 2);
      if (i % 2) x(i, j_star) += 4.0;
    }
    // Oracle: the best single-location midpoint classifier.
    Index best = -1;
    double best_acc = -1.0;
    for (Index j = 0; j < n; ++j) {
      double mu0 = 0, mu1 = 0;
      for (Index i = 0; i < m; ++i) (i % 2 ? mu1 : mu0) += x(i, j);
      mu0 /= m / 2.0;
      mu1 /= m / 2.0;
      int hits = 0;
      for (Index i = 0; i < m; ++i) {
        const bool says_one = std::abs(x(i, j) - mu1) < std::abs(x(i, j) - mu0);
        hits += says_one == static_cast<bool>(i % 2);
      }
      if (hits > best_acc) {
        best_acc = hits;
        best = j;
      }
    }
    REQUIRE(best == j_star);
    const SspocModel model = sspoc_fit(x, y, BasisSpec{}, SspocOptions{}, nullptr, WarningSink{});
    REQUIRE(!model.selected_sensors().empty());
    CHECK(model.selected_sensors()[0] == j_star);
  }

  TEST_CASE("digits with an svd basis and ten sensors") {
    const Dataset& d = digits();
    REQUIRE(d.labels);
    CHECK(d.values.rows() == 1797);
    CHECK(d.values.cols() == 64);
    SspocModel model = sspoc_fit(d.values, *d.labels, svd_spec(10), digit_options(10), nullptr, WarningSink{});
    const IndexList ten = model.selected_sensors();
    CHECK(ten.size() == 10);
    CHECK(no_duplicates(ten));
    CHECK(model.refit_classifier().weights().rows() == 10);
    const LabelList pred = model.predict(sample_columns(d.values, ten));
    CHECK(accuracy(*d.labels, pred) >= 0.1);

    // Reselecting five only truncates the stored norm order.
    const Matrix s_before = model.solution().s;
    model.update_sensors(5, d.values, *d.labels);
    CHECK(model.solution().s == s_before);
    CHECK(model.selected_sensors() == IndexList(ten.begin(), ten.begin() + 5));
    model.update_sensors(5, d.values, *d.labels);
    CHECK(model.selected_sensors() == IndexList(ten.begin(), ten.begin() + 5));
    model.update_sensors(10, d.values, *d.labels);
    CHECK(model.selected_sensors() == ten);
    CHECK(model.predict(Matrix(0, 10)).empty());
    CHECK_THROWS_AS(model.predict(Matrix::Zero(2, 9)), Error);
    CHECK_THROWS_AS(model.update_sensors(0, d.values, *d.labels), Error);
  }

  TEST_CASE("update_sensors past the support pads with a warning") {
    const LabeledData data = multiclass_problem(20, 15, 3, 61);
    std::vector<std::string> warnings;
    SspocOptions options;
    options.l1_penalty = 0.05;
    SspocModel model = sspoc_fit(data.values, data.labels, svd_spec(4), options, nullptr,
                                 collect_warnings(warnings));
    const auto support = static_cast<Index>(model.solution().row_support.size());
    REQUIRE(support < 15);
    model.update_sensors(15, data.values, data.labels);
    CHECK(model.selected_sensors().size() == 15);
    CHECK_FALSE(warnings.empty());
  }

  TEST_CASE("shrinking the basis matches a fresh fit") {
    const LabeledData data = multiclass_problem(25, 30, 4, 62);
    SspocOptions options;
    options.l1_penalty = 0.01;
    SspocModel model = sspoc_fit(data.values, data.labels, svd_spec(10), options, nullptr, WarningSink{});
    model.update_n_basis_modes(6, data.values, data.labels);
    const SspocModel fresh = sspoc_fit(data.values, data.labels, svd_spec(6), options, nullptr, WarningSink{});
    CHECK(model.selected_sensors() == fresh.selected_sensors());
    try {
      model.update_n_basis_modes(7, data.values, data.labels);
      FAIL("expected TooManyModes");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooManyModes);
    }
    CHECK(model.basis().active_modes() == 6);
  }

  TEST_CASE("binary pipeline runs with a single mode") {
    const LabeledData data = two_gaussians(30, 8, 4.0, 63);
    const SspocModel model = sspoc_fit(data.values, data.labels, svd_spec(1), SspocOptions{}, nullptr, WarningSink{});
    CHECK(model.selected_sensors().size() <= 1);
    CHECK(model.weights().rows() == 1);
  }

  TEST_CASE("full shrinkage of the lasso selects nothing") {
    const LabeledData data = multiclass_problem(20, 12, 3, 64);
    SspocOptions options;
    options.l1_penalty = 0.01;
    const SspocModel probe = sspoc_fit(data.values, data.labels, svd_spec(5), options, nullptr, WarningSink{});
    const Matrix psi_pinv = pseudoinverse(probe.basis().matrix_representation());
    options.l1_penalty = 1.01 * multitask_lasso_alpha_max<double>(psi_pinv, probe.weights());
    try {
      sspoc_fit(data.values, data.labels, svd_spec(5), options, nullptr, WarningSink{});
      FAIL("expected NoSensorsSelected");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NoSensorsSelected);
    }
  }

  TEST_CASE("automatic selection respects the sensor-count bounds") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const int c = 3 + static_cast<int>(seed % 2);
      const Index r = seed < 3 ? 5 : 10;
      const LabeledData data = multiclass_problem(20, 40, c, 70 + seed);
      SspocOptions options;
      options.l1_penalty = 1e-3;
      const SspocModel model = sspoc_fit(data.values, data.labels, svd_spec(r), options, nullptr, WarningSink{});
      CHECK(static_cast<Index>(model.selected_sensors().size()) <= r * (c - 1));
      CHECK(no_duplicates(model.selected_sensors()));
    }
    const LabeledData binary = two_gaussians(30, 25, 3.0, 80);
    const SspocModel model = sspoc_fit(binary.values, binary.labels, svd_spec(6), SspocOptions{}, nullptr, WarningSink{});
    CHECK(model.selected_sensors().size() <= 6);
  }

  TEST_CASE("fits are deterministic and beat the majority class") {
    const LabeledData data = multiclass_problem(30, 20, 3, 65);
    SspocOptions options;
    options.l1_penalty = 0.01;
    const SspocModel a = sspoc_fit(data.values, data.labels, svd_spec(6), options, nullptr, WarningSink{});
    const SspocModel b = sspoc_fit(data.values, data.labels, svd_spec(6), options, nullptr, WarningSink{});
    CHECK(a.selected_sensors() == b.selected_sensors());
    const LabelList pred = a.predict(sample_columns(data.values, a.selected_sensors()));
    CHECK(accuracy(data.labels, pred) >= 1.0 / 3.0);
  }

  TEST_CASE("reweighted mode order") {
    Vector sigma(4);
    sigma << 4, 3, 2, 1;
    Matrix w = Matrix::Zero(4, 1);
    w(3, 0) = 1.0;
    CHECK(reweighted_mode_order(sigma, w)[0] == 3);
    CHECK(reweighted_mode_order(sigma, Matrix::Ones(4, 2)) == IndexList{0, 1, 2, 3});

    SeededRng rng(66);
    const Vector s = gaussian_matrix(9, 1, rng).cwiseAbs();
    const Matrix ww = gaussian_matrix(9, 3, rng);
    std::vector<std::pair<double, Index>> products;
    for (Index k = 0; k < 9; ++k) products.emplace_back(-s(k) * ww.row(k).norm(), k);
    std::sort(products.begin(), products.end());
    IndexList expected;
    for (const auto& p : products) expected.push_back(p.second);
    CHECK(reweighted_mode_order(s, ww) == expected);
    CHECK_THROWS_AS(reweighted_mode_order(s, Matrix::Ones(8, 1)), Error);
  }

  TEST_CASE("sample_columns rejects bad indices") {
    const IndexList bad{0, 5};
    try {
      sample_columns(Matrix::Ones(2, 5), bad);
      FAIL("expected IndexOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::IndexOutOfRange);
    }
  }
}
