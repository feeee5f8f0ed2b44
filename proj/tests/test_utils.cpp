#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "spsense/utils.hpp"

using namespace spsense;

TEST_SUITE("utils") {
  TEST_CASE("rmse of identical inputs is zero") {
    Matrix a(2, 3);
    a << 1, 2, 3, 4, 5, 6;
    CHECK(rmse(a, a) == 0.0);
  }

  TEST_CASE("rmse hand example") {
    Vector a = Vector::Zero(2);
    Vector b(2);
    b << 3, 4;
    CHECK(rmse(a, b) == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
  }

  TEST_CASE("rmse matches two-pass oracle and is symmetric") {
    SeededRng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
      const Matrix a = gaussian_matrix(5, 9, rng);
      const Matrix b = gaussian_matrix(5, 9, rng);
      CHECK(std::abs(rmse(a, b) - oracle::naive_rmse(a, b)) < 1e-12);
      CHECK(rmse(a, b) == rmse(b, a));
      CHECK(rmse(a, b) >= 0.0);
    }
  }

  TEST_CASE("rmse rejects shape mismatch") {
    CHECK_THROWS_AS(rmse(Matrix::Zero(2, 2), Matrix::Zero(2, 3)), Error);
  }

  TEST_CASE("shuffled_complement edge sizes") {
    SeededRng rng(1);
    const IndexList all = {0, 1, 2};
    CHECK(shuffled_complement(3, all, rng).empty());
    const IndexList two = {0, 2};
    CHECK(shuffled_complement(3, two, rng) == IndexList{1});
  }

  TEST_CASE("shuffled_complement is seeded and covers the complement") {
    const IndexList chosen = {0, 1};
    SeededRng a(42), b(42);
    const IndexList ta = shuffled_complement(6, chosen, a);
    const IndexList tb = shuffled_complement(6, chosen, b);
    CHECK(ta == tb);
    IndexList all = chosen;
    all.insert(all.end(), ta.begin(), ta.end());
    CHECK(is_permutation_of_range(all, 6));
  }

  TEST_CASE("shuffled_complement rejects out-of-range indices") {
    SeededRng rng(0);
    const IndexList bad = {6};
    CHECK_THROWS_AS(shuffled_complement(6, bad, rng), Error);
  }

  TEST_CASE("shuffle is roughly uniform") {
    // First slot of a 4-element shuffle: each element ~ 1/4 of 8000 draws.
    SeededRng rng(3);
    std::array<int, 4> counts{};
    for (int t = 0; t < 8000; ++t) ++counts[static_cast<std::size_t>(shuffled_complement(4, {}, rng)[0])];
    for (int c : counts) CHECK(std::abs(c - 2000) < 200);
  }

  TEST_CASE("rng streams are reproducible and substreams differ") {
    SeededRng a(99), b(99);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    SeededRng s0 = SeededRng(99).substream(0);
    SeededRng s1 = SeededRng(99).substream(1);
    CHECK(s0.next_u64() != s1.next_u64());
  }

  TEST_CASE("rng below stays in range and normal has unit moments") {
    SeededRng rng(5);
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const double z = rng.normal();
      sum += z;
      sq += z * z;
    }
    CHECK(std::abs(sum / n) < 0.03);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
  }

  TEST_CASE("permutation check") {
    CHECK(is_permutation_of_range(IndexList{2, 0, 1}, 3));
    CHECK_FALSE(is_permutation_of_range(IndexList{0, 0, 1}, 3));
    CHECK_FALSE(is_permutation_of_range(IndexList{0, 1}, 3));
  }
}
