#pragma once

// Dense kernels shared by every estimator: greedy column-pivoted Householder
// QR, truncated and randomized SVD, minimum-norm least squares and the
// Moore-Penrose pseudoinverse. All functions are pure and templated on the
// scalar type of their Eigen arguments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spsense/error.hpp"
#include "spsense/utils.hpp"

namespace spsense {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct PivotedQrResult {
  IndexList pivots;
  /// |R_kk| in pivot order.
  std::vector<Scalar> r_diagonal;
  /// Score that won each step: residual norm minus penalty.
  std::vector<Scalar> scores;
};

template <typename Scalar>
struct SvdResult {
  MatrixX<Scalar> left_modes;
  VectorX<Scalar> singular_values;
  MatrixX<Scalar> right_modes;
};

inline constexpr double kDefaultRcond = 1e-12;
inline constexpr double kPivotTieTolerance = 1e-12;
inline constexpr double kNormRecomputeRatio = 1e-6;

/// Greedy Householder QR with column pivoting, where step k picks the
/// unchosen column maximizing (residual 2-norm - penalty[j]). An empty penalty
/// means plain pivoting. Scores within kPivotTieTolerance (relative) count as
/// equal and the lower column index wins.
///
/// Columns stay in their original slots; only the chosen flags move. Residual
/// norms are downdated after each reflection and recomputed from the working
/// matrix when the squared norm drops below kNormRecomputeRatio of its last
/// recomputed value.
template <typename Derived>
PivotedQrResult<typename Derived::Scalar> penalized_pivoted_qr(
    const Eigen::MatrixBase<Derived>& a, Index max_pivots,
    std::span<const typename Derived::Scalar> penalty = {}) {
  using Scalar = typename Derived::Scalar;
  const Index rows = a.rows();
  const Index cols = a.cols();
  require(rows > 0 && cols > 0, ErrorCode::EmptyMatrix, "pivoted_qr: empty matrix");
  require(max_pivots >= 0 && max_pivots <= std::min(rows, cols), ErrorCode::MaxPivotsTooLarge,
          "pivoted_qr: max_pivots " + std::to_string(max_pivots) + " exceeds min(rows, cols) = " +
              std::to_string(std::min(rows, cols)));
  require(penalty.empty() || static_cast<Index>(penalty.size()) == cols,
          ErrorCode::DimensionMismatch, "pivoted_qr: penalty length must equal column count");

  MatrixX<Scalar> work = a;
  VectorX<Scalar> norm_sq = work.colwise().squaredNorm().transpose();
  VectorX<Scalar> reference_sq = norm_sq;
  std::vector<char> chosen(static_cast<std::size_t>(cols), 0);

  PivotedQrResult<Scalar> out;
  out.pivots.reserve(static_cast<std::size_t>(max_pivots));
  out.r_diagonal.reserve(static_cast<std::size_t>(max_pivots));
  out.scores.reserve(static_cast<std::size_t>(max_pivots));

  for (Index k = 0; k < max_pivots; ++k) {
    Index best = -1;
    Scalar best_score = 0;
    for (Index j = 0; j < cols; ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      Scalar score = std::sqrt(std::max(norm_sq(j), Scalar(0)));
      if (!penalty.empty()) score -= penalty[static_cast<std::size_t>(j)];
      if (best < 0) {
        best = j;
        best_score = score;
        continue;
      }
      const Scalar scale = std::max(std::abs(score), std::abs(best_score));
      // Ascending j: a later column only wins when clearly ahead.
      if (score - best_score > Scalar(kPivotTieTolerance) * scale) {
        best = j;
        best_score = score;
      }
    }
    chosen[static_cast<std::size_t>(best)] = 1;

    const Index len = rows - k;
    auto x = work.col(best).tail(len);
    const Scalar x_norm = x.norm();
    out.pivots.push_back(best);
    out.r_diagonal.push_back(x_norm);
    out.scores.push_back(best_score);

    if (x_norm > Scalar(0) && len > 1) {
      const Scalar x0 = x(0);
      const Scalar beta = x0 >= Scalar(0) ? -x_norm : x_norm;
      VectorX<Scalar> v = x;
      v(0) = Scalar(1);
      v.tail(len - 1) /= (x0 - beta);
      const Scalar tau = (beta - x0) / beta;
      for (Index j = 0; j < cols; ++j) {
        if (chosen[static_cast<std::size_t>(j)]) continue;
        auto col = work.col(j).tail(len);
        const Scalar s = v.dot(col);
        col.noalias() -= (tau * s) * v;
      }
      x(0) = beta;
      x.tail(len - 1).setZero();
    }

    for (Index j = 0; j < cols; ++j) {
      if (chosen[static_cast<std::size_t>(j)]) continue;
      if (k + 1 >= rows) {
        norm_sq(j) = Scalar(0);
        continue;
      }
      const Scalar top = work(k, j);
      norm_sq(j) -= top * top;
      if (norm_sq(j) <= Scalar(kNormRecomputeRatio) * reference_sq(j)) {
        norm_sq(j) = work.col(j).tail(rows - k - 1).squaredNorm();
        reference_sq(j) = norm_sq(j);
      }
    }
  }
  return out;
}

template <typename Derived>
PivotedQrResult<typename Derived::Scalar> pivoted_qr(const Eigen::MatrixBase<Derived>& a,
                                                     Index max_pivots) {
  return penalized_pivoted_qr(a, max_pivots, {});
}

/// Flip each (left, right) pair so the largest-magnitude entry of the left
/// vector is positive. Ties go to the lowest row index.
template <typename Scalar>
void normalize_mode_signs(MatrixX<Scalar>& left, MatrixX<Scalar>& right) {
  for (Index j = 0; j < left.cols(); ++j) {
    Index arg = 0;
    Scalar best = -1;
    for (Index i = 0; i < left.rows(); ++i) {
      if (std::abs(left(i, j)) > best) {
        best = std::abs(left(i, j));
        arg = i;
      }
    }
    if (left(arg, j) < Scalar(0)) {
      left.col(j) = -left.col(j);
      if (j < right.cols()) right.col(j) = -right.col(j);
    }
  }
}

namespace detail {

template <typename Derived>
SvdResult<typename Derived::Scalar> thin_svd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::BDCSVD<MatrixX<Scalar>> svd(a.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

template <typename Scalar>
MatrixX<Scalar> orthonormal_range(const MatrixX<Scalar>& y) {
  Eigen::HouseholderQR<MatrixX<Scalar>> qr(y);
  return qr.householderQ() * MatrixX<Scalar>::Identity(y.rows(), y.cols());
}

}  // namespace detail

/// Leading r singular triplets, descending, sign-normalized on the left modes.
template <typename Derived>
SvdResult<typename Derived::Scalar> truncated_svd(const Eigen::MatrixBase<Derived>& a, Index r) {
  require(a.size() > 0, ErrorCode::EmptyMatrix, "truncated_svd: empty matrix");
  require(r >= 1 && r <= std::min(a.rows(), a.cols()), ErrorCode::RankTooLarge,
          "truncated_svd: rank " + std::to_string(r) + " outside [1, min(rows, cols)]");
  auto full = detail::thin_svd(a);
  SvdResult<typename Derived::Scalar> out{full.left_modes.leftCols(r),
                                          full.singular_values.head(r),
                                          full.right_modes.leftCols(r)};
  normalize_mode_signs(out.left_modes, out.right_modes);
  return out;
}

/// Randomized range-finder SVD: Gaussian sketch of width r + n_oversamples,
/// n_power_iters re-orthonormalized subspace iterations, then an exact SVD of
/// the projected matrix. Deterministic for a fixed seed.
template <typename Derived>
SvdResult<typename Derived::Scalar> randomized_svd(const Eigen::MatrixBase<Derived>& a, Index r,
                                                   Index n_oversamples, Index n_power_iters,
                                                   std::uint64_t seed) {
  using Scalar = typename Derived::Scalar;
  require(a.size() > 0, ErrorCode::EmptyMatrix, "randomized_svd: empty matrix");
  require(r >= 1 && n_oversamples >= 0 && r + n_oversamples <= std::min(a.rows(), a.cols()),
          ErrorCode::RankTooLarge, "randomized_svd: r + n_oversamples exceeds min(rows, cols)");
  const Index width = r + n_oversamples;
  SeededRng rng(seed);
  const MatrixX<Scalar> omega = gaussian_matrix(a.cols(), width, rng).template cast<Scalar>();
  MatrixX<Scalar> q = detail::orthonormal_range<Scalar>(a * omega);
  for (Index it = 0; it < n_power_iters; ++it) {
    const MatrixX<Scalar> z = detail::orthonormal_range<Scalar>(a.transpose() * q);
    q = detail::orthonormal_range<Scalar>(a * z);
  }
  const MatrixX<Scalar> projected = q.transpose() * a;
  auto small = detail::thin_svd(projected);
  SvdResult<Scalar> out{q * small.left_modes.leftCols(r), small.singular_values.head(r),
                        small.right_modes.leftCols(r)};
  normalize_mode_signs(out.left_modes, out.right_modes);
  return out;
}

template <typename Scalar>
struct LeastSquaresSolution {
  MatrixX<Scalar> solution;
  Index rank = 0;
  /// sigma_max / sigma_min over all min(rows, cols) singular values; inf when singular.
  Scalar condition = 0;
};

/// Minimum-norm solution of min ||A X - B||_F through the SVD, treating
/// singular values below rcond * sigma_max as zero.
template <typename DerivedA, typename DerivedB>
LeastSquaresSolution<typename DerivedA::Scalar> solve_least_squares(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b,
    double rcond = kDefaultRcond) {
  using Scalar = typename DerivedA::Scalar;
  require(a.rows() == b.rows(), ErrorCode::DimensionMismatch,
          "least_squares: A has " + std::to_string(a.rows()) + " rows but b has " +
              std::to_string(b.rows()));
  LeastSquaresSolution<Scalar> out;
  if (a.size() == 0) {
    out.solution = MatrixX<Scalar>::Zero(a.cols(), b.cols());
    return out;
  }
  auto svd = detail::thin_svd(a);
  const auto& sv = svd.singular_values;
  const Scalar cutoff = Scalar(rcond) * sv(0);
  const Scalar smallest = sv(sv.size() - 1);
  out.condition = smallest > Scalar(0) ? sv(0) / smallest
                                       : std::numeric_limits<Scalar>::infinity();
  VectorX<Scalar> inv = VectorX<Scalar>::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > Scalar(0)) {
      inv(i) = Scalar(1) / sv(i);
      ++out.rank;
    }
  }
  out.solution = svd.right_modes * (inv.asDiagonal() * (svd.left_modes.transpose() * b));
  return out;
}

template <typename DerivedA, typename DerivedB>
VectorX<typename DerivedA::Scalar> least_squares(const Eigen::MatrixBase<DerivedA>& a,
                                                 const Eigen::MatrixBase<DerivedB>& b,
                                                 double rcond = kDefaultRcond) {
  require(b.cols() == 1, ErrorCode::DimensionMismatch, "least_squares: b must be a vector");
  return solve_least_squares(a, b, rcond).solution.col(0);
}

template <typename Derived>
MatrixX<typename Derived::Scalar> pseudoinverse(const Eigen::MatrixBase<Derived>& a,
                                                double rcond = kDefaultRcond) {
  using Scalar = typename Derived::Scalar;
  require(a.size() > 0, ErrorCode::EmptyMatrix, "pseudoinverse: empty matrix");
  auto svd = detail::thin_svd(a);
  const auto& sv = svd.singular_values;
  const Scalar cutoff = Scalar(rcond) * sv(0);
  VectorX<Scalar> inv = VectorX<Scalar>::Zero(sv.size());
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff && sv(i) > Scalar(0)) inv(i) = Scalar(1) / sv(i);
  return svd.right_modes * inv.asDiagonal() * svd.left_modes.transpose();
}

}  // namespace spsense
