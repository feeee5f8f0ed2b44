#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spsense/error.hpp"
#include "spsense/linalg.hpp"
#include "spsense/utils.hpp"

namespace spsense {

inline constexpr double kSupportTolerance = 1e-10;

template <typename Scalar>
struct SparseSolution {
  /// n x q coefficients; rows index candidate locations.
  MatrixX<Scalar> s;
  /// Rows with L2 norm above kSupportTolerance, ascending.
  IndexList row_support;
  Index iterations = 0;
  bool converged = false;
  /// OMP: residual norm after each iteration (entry 0 is ||target||).
  /// Lasso: objective after each sweep (entry 0 is the objective at S = 0).
  std::vector<Scalar> history;
};

template <typename Scalar>
IndexList rows_above(const MatrixX<Scalar>& s, Scalar tol) {
  IndexList rows;
  for (Index i = 0; i < s.rows(); ++i)
    if (s.row(i).norm() > tol) rows.push_back(i);
  return rows;
}

/// Orthogonal matching pursuit. Atoms are scored by |<d_j, residual>| / ||d_j||
/// (dictionary columns are not normalized); the active set is refit by least
/// squares after every addition. Stops after n_nonzero atoms or when the
/// residual norm reaches residual_tol.
template <typename DerivedD, typename DerivedT>
SparseSolution<typename DerivedD::Scalar> omp(const Eigen::MatrixBase<DerivedD>& dictionary,
                                              const Eigen::MatrixBase<DerivedT>& target,
                                              Index n_nonzero, double residual_tol = 1e-10) {
  using Scalar = typename DerivedD::Scalar;
  const Index r = dictionary.rows();
  const Index n = dictionary.cols();
  require(target.cols() == 1 && target.rows() == r, ErrorCode::DimensionMismatch,
          "omp: target length must equal dictionary rows");
  require(n_nonzero >= 0 && n_nonzero <= std::min(r, n), ErrorCode::InfeasibleSparsity,
          "omp: n_nonzero " + std::to_string(n_nonzero) + " exceeds min(rows, cols) = " +
              std::to_string(std::min(r, n)));
  const VectorX<Scalar> norms = dictionary.colwise().norm().transpose();
  require(r > 0 && n > 0 && norms.maxCoeff() > Scalar(0), ErrorCode::ZeroDictionary,
          "omp: dictionary has no nonzero column");

  SparseSolution<Scalar> out;
  out.s = MatrixX<Scalar>::Zero(n, 1);
  const VectorX<Scalar> y = target;
  VectorX<Scalar> residual = y;
  out.history.push_back(residual.norm());
  std::vector<char> active_flag(static_cast<std::size_t>(n), 0);
  IndexList active;

  bool stalled = false;
  while (static_cast<Index>(active.size()) < n_nonzero && residual.norm() > Scalar(residual_tol)) {
    const VectorX<Scalar> corr = dictionary.transpose() * residual;
    Index best = -1;
    Scalar best_score = 0;
    for (Index j = 0; j < n; ++j) {
      if (active_flag[static_cast<std::size_t>(j)] || norms(j) == Scalar(0)) continue;
      const Scalar score = std::abs(corr(j)) / norms(j);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    if (best < 0) {
      stalled = true;
      break;
    }
    active_flag[static_cast<std::size_t>(best)] = 1;
    active.push_back(best);

    MatrixX<Scalar> sub(r, static_cast<Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) sub.col(static_cast<Index>(k)) = dictionary.col(active[k]);
    const VectorX<Scalar> coef = least_squares(sub, y);
    residual = y - sub * coef;
    out.s.setZero();
    for (std::size_t k = 0; k < active.size(); ++k) out.s(active[k], 0) = coef(static_cast<Index>(k));
    ++out.iterations;
    out.history.push_back(residual.norm());
  }
  out.converged = !stalled;
  out.row_support = rows_above<Scalar>(out.s, Scalar(kSupportTolerance));
  return out;
}

/// (1 / 2r) ||D S - W||_F^2 + alpha * sum_j ||S_j,:||_2 with r = rows(D).
template <typename Scalar>
Scalar multitask_lasso_objective(const MatrixX<Scalar>& dictionary, const MatrixX<Scalar>& targets,
                                 const MatrixX<Scalar>& s, Scalar alpha) {
  const Scalar fit = (dictionary * s - targets).squaredNorm() / (Scalar(2) * dictionary.rows());
  return fit + alpha * s.rowwise().norm().sum();
}

/// Smallest alpha for which the multi-task lasso solution is identically zero.
template <typename Scalar>
Scalar multitask_lasso_alpha_max(const MatrixX<Scalar>& dictionary, const MatrixX<Scalar>& targets) {
  return (dictionary.transpose() * targets).rowwise().norm().maxCoeff() /
         static_cast<Scalar>(dictionary.rows());
}

/// Multi-task (row-group) lasso by cyclic block coordinate descent. Each row
/// S_j is minimized exactly by group soft-thresholding with the others held
/// fixed, sweeping j in ascending order. Converged when the largest row change
/// in a sweep is below tol; otherwise stops at max_iter sweeps with
/// converged = false.
template <typename DerivedD, typename DerivedW>
SparseSolution<typename DerivedD::Scalar> multitask_lasso(
    const Eigen::MatrixBase<DerivedD>& dictionary, const Eigen::MatrixBase<DerivedW>& targets,
    double alpha, Index max_iter = 1000, double tol = 1e-8) {
  using Scalar = typename DerivedD::Scalar;
  require(alpha > 0.0 && std::isfinite(alpha), ErrorCode::NonPositiveAlpha,
          "multitask_lasso: alpha must be positive");
  require(targets.rows() == dictionary.rows(), ErrorCode::DimensionMismatch,
          "multitask_lasso: targets must have as many rows as the dictionary");
  require(dictionary.size() > 0 && targets.cols() >= 1, ErrorCode::EmptyMatrix,
          "multitask_lasso: empty problem");
  const MatrixX<Scalar> d = dictionary;
  const MatrixX<Scalar> w = targets;
  const Index r = d.rows();
  const Index n = d.cols();
  const Index q = w.cols();
  const Scalar threshold = Scalar(alpha) * Scalar(r);
  const VectorX<Scalar> col_sq = d.colwise().squaredNorm().transpose();

  SparseSolution<Scalar> out;
  out.s = MatrixX<Scalar>::Zero(n, q);
  MatrixX<Scalar> residual = w;  // W - D S
  out.history.push_back(multitask_lasso_objective<Scalar>(d, w, out.s, Scalar(alpha)));

  VectorX<Scalar> z(q);
  for (Index sweep = 0; sweep < max_iter; ++sweep) {
    Scalar max_change = 0;
    for (Index j = 0; j < n; ++j) {
      if (col_sq(j) == Scalar(0)) continue;
      z.noalias() = residual.transpose() * d.col(j);
      z += col_sq(j) * out.s.row(j).transpose();
      const Scalar z_norm = z.norm();
      VectorX<Scalar> updated = VectorX<Scalar>::Zero(q);
      if (z_norm > threshold) updated = z * ((Scalar(1) - threshold / z_norm) / col_sq(j));
      const VectorX<Scalar> delta = updated - out.s.row(j).transpose();
      const Scalar change = delta.norm();
      if (change > Scalar(0)) {
        residual.noalias() -= d.col(j) * delta.transpose();
        out.s.row(j) = updated.transpose();
      }
      max_change = std::max(max_change, change);
    }
    ++out.iterations;
    out.history.push_back(multitask_lasso_objective<Scalar>(d, w, out.s, Scalar(alpha)));
    if (max_change < Scalar(tol)) {
      out.converged = true;
      break;
    }
  }
  out.row_support = rows_above<Scalar>(out.s, Scalar(kSupportTolerance));
  return out;
}

}  // namespace spsense
