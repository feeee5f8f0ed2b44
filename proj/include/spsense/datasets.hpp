#pragma once

#include <cstdint>

#include "spsense/classifiers.hpp"
#include "spsense/utils.hpp"

namespace spsense {

/// n equispaced points on [0, 1], endpoints included.
Vector unit_grid(Index n);

/// r x n monomial matrix: row i holds x^i over the grid, so each row is one
/// basis function treated as a training example.
Matrix vandermonde_rows(const Eigen::Ref<const Vector>& grid, Index r);

/// |x^2 - 1/2| over the grid, as a 1 x n row.
Matrix abs_quadratic(const Eigen::Ref<const Vector>& grid);

/// rows x cols matrix of exact rank `rank`: product of two Gaussian factors.
Matrix low_rank_matrix(Index rows, Index cols, Index rank, std::uint64_t seed);

struct LabeledData {
  Matrix values;
  LabelList labels;
};

/// Two unit-variance spherical Gaussians in `dim` dimensions whose means sit
/// at -separation/2 and +separation/2 along axis 0. Rows alternate classes.
LabeledData two_gaussians(Index per_class, Index dim, double separation, std::uint64_t seed);

}  // namespace spsense
