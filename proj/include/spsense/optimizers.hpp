#pragma once

#include <cstdint>
#include <vector>

#include "spsense/utils.hpp"

namespace spsense {

/// Full permutation of candidate locations, most important first. The first
/// n_meaningful entries are QR pivots; the rest are a seeded shuffle.
struct SensorRanking {
  IndexList order;
  Index n_meaningful = 0;
  std::uint64_t seed = 0;
  /// Winning score at each pivot step (residual norm minus cost penalty).
  std::vector<double> pivot_scores;
};

/// Per-location placement cost and the weight trading cost against residual
/// norm. The penalty is weight * cost, in residual-norm units.
struct CostVector {
  Vector costs;
  double weight = 0.0;
};

/// Rank the n rows of psi_r (n x r) by pivoted QR on psi_r^T.
SensorRanking qr_rank(const Eigen::Ref<const Matrix>& psi_r, std::uint64_t seed);

/// Cost-constrained variant: step k picks argmax_j (residual_norm_j - weight * cost_j).
/// With weight == 0 the result equals qr_rank exactly.
SensorRanking ccqr_rank(const Eigen::Ref<const Matrix>& psi_r, const CostVector& cost,
                        std::uint64_t seed);

}  // namespace spsense
