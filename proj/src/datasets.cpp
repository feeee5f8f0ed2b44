#include "spsense/datasets.hpp"

#include <cmath>

namespace spsense {

Vector unit_grid(Index n) {
  require(n >= 2, ErrorCode::InvalidParams, "grid needs at least two points");
  Vector x(n);
  const double step = 1.0 / static_cast<double>(n - 1);
  for (Index i = 0; i < n; ++i) x(i) = static_cast<double>(i) * step;
  x(n - 1) = 1.0;
  return x;
}

Matrix vandermonde_rows(const Eigen::Ref<const Vector>& grid, Index r) {
  require(r >= 1, ErrorCode::InvalidParams, "vandermonde: need at least one monomial");
  Matrix out(r, grid.size());
  out.row(0).setOnes();
  for (Index i = 1; i < r; ++i) out.row(i) = out.row(i - 1).cwiseProduct(grid.transpose());
  return out;
}

Matrix abs_quadratic(const Eigen::Ref<const Vector>& grid) {
  return (grid.array().square() - 0.5).abs().matrix().transpose();
}

Matrix low_rank_matrix(Index rows, Index cols, Index rank, std::uint64_t seed) {
  require(rows >= 1 && cols >= 1 && rank >= 1 && rank <= std::min(rows, cols),
          ErrorCode::InvalidParams, "low-rank generator: need 1 <= rank <= min(rows, cols)");
  SeededRng rng(seed);
  const Matrix left = gaussian_matrix(rows, rank, rng);
  const Matrix right = gaussian_matrix(rank, cols, rng);
  return left * right;
}

LabeledData two_gaussians(Index per_class, Index dim, double separation, std::uint64_t seed) {
  require(per_class >= 1 && dim >= 1 && std::isfinite(separation), ErrorCode::InvalidParams,
          "two-gaussians generator: need per_class >= 1, dim >= 1, finite separation");
  SeededRng rng(seed);
  LabeledData out;
  out.values.resize(2 * per_class, dim);
  out.labels.resize(static_cast<std::size_t>(2 * per_class));
  for (Index i = 0; i < 2 * per_class; ++i) {
    const Label label = static_cast<Label>(i % 2);
    for (Index j = 0; j < dim; ++j) out.values(i, j) = rng.normal();
    out.values(i, 0) += (label == 0 ? -0.5 : 0.5) * separation;
    out.labels[static_cast<std::size_t>(i)] = label;
  }
  return out;
}

}  // namespace spsense
