#include "spsense/optimizers.hpp"

#include <span>

#include "spsense/linalg.hpp"

namespace spsense {

namespace {

SensorRanking rank_with_penalty(const Eigen::Ref<const Matrix>& psi_r,
                                std::span<const double> penalty, std::uint64_t seed) {
  require(psi_r.rows() > 0 && psi_r.cols() > 0, ErrorCode::EmptyMatrix,
          "sensor ranking: empty basis matrix");
  require_finite(psi_r, "basis matrix");
  const Index n = psi_r.rows();
  const Index steps = std::min(n, psi_r.cols());
  const Matrix candidates = psi_r.transpose();
  auto qr = penalized_pivoted_qr(candidates, steps, penalty);

  SensorRanking out;
  out.seed = seed;
  out.n_meaningful = steps;
  out.pivot_scores = std::move(qr.scores);
  out.order = qr.pivots;
  SeededRng rng(seed);
  const IndexList tail = shuffled_complement(n, qr.pivots, rng);
  out.order.insert(out.order.end(), tail.begin(), tail.end());
  return out;
}

}  // namespace

SensorRanking qr_rank(const Eigen::Ref<const Matrix>& psi_r, std::uint64_t seed) {
  return rank_with_penalty(psi_r, {}, seed);
}

SensorRanking ccqr_rank(const Eigen::Ref<const Matrix>& psi_r, const CostVector& cost,
                        std::uint64_t seed) {
  require(cost.costs.size() == psi_r.rows(), ErrorCode::DimensionMismatch,
          "ccqr: " + std::to_string(cost.costs.size()) + " costs for " +
              std::to_string(psi_r.rows()) + " candidate locations");
  require(std::isfinite(cost.weight) && cost.weight >= 0.0, ErrorCode::NegativeCost,
          "ccqr: cost weight must be finite and non-negative");
  require(cost.costs.allFinite() && (cost.costs.array() >= 0.0).all(), ErrorCode::NegativeCost,
          "ccqr: costs must be finite and non-negative");
  std::vector<double> penalty(static_cast<std::size_t>(cost.costs.size()));
  for (Index j = 0; j < cost.costs.size(); ++j)
    penalty[static_cast<std::size_t>(j)] = cost.weight * cost.costs(j);
  return rank_with_penalty(psi_r, penalty, seed);
}

}  // namespace spsense
