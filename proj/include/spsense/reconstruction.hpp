#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "spsense/basis.hpp"
#include "spsense/optimizers.hpp"
#include "spsense/utils.hpp"

namespace spsense {

/// Condition estimates above this flag a reconstruction as ill-conditioned.
inline constexpr double kIllConditioned = 1e12;

struct Reconstruction {
  /// k x n reconstructed states, one row per measurement row.
  Matrix states;
  double condition = 0.0;
  bool ill_conditioned = false;
};

/// Sensor placement for full-state reconstruction: a fitted basis, a ranking
/// of candidate locations by pivoted QR (or cost-constrained QR), and a
/// least-squares map from the first p ranked measurements back to the state.
///
/// Immutable apart from set_n_sensors and update_n_basis_modes, which must
/// not run concurrently with reads of the same instance.
class SsporModel {
 public:
  SsporModel(FittedBasis basis, SensorRanking ranking, Index n_sensors,
             std::optional<CostVector> cost, std::uint64_t seed,
             WarningSink warnings = stderr_warnings());

  const FittedBasis& basis() const noexcept { return basis_; }
  const SensorRanking& ranking() const noexcept { return ranking_; }
  const std::optional<CostVector>& cost() const noexcept { return cost_; }
  std::uint64_t seed() const noexcept { return seed_; }
  Index n_features() const noexcept { return basis_.n_features(); }
  Index n_sensors() const noexcept { return n_sensors_; }

  /// First n_sensors() entries of the ranking.
  IndexList selected_sensors() const;
  IndexList selected_sensors(Index p) const;

  /// Warns when p exceeds the number of QR-ranked locations.
  void set_n_sensors(Index p);

  /// Reconstruct one state from measurements taken at selected_sensors().
  Vector predict(const Eigen::Ref<const Vector>& measurements) const;
  /// Reconstruct k states from a k x p block of measurements at the first p sensors.
  Reconstruction reconstruct(const Eigen::Ref<const Matrix>& measurements) const;

  /// RMSE over every entry of every test row, for each sensor count in
  /// sensor_range. Each row is sampled at its own first-p ranked locations.
  std::vector<double> reconstruction_error(const Eigen::Ref<const Matrix>& test,
                                           std::span<const Index> sensor_range) const;

  /// Shrink the basis (no refit) and recompute the ranking.
  void update_n_basis_modes(Index r);

  void set_warning_sink(WarningSink sink) { warnings_ = std::move(sink); }

 private:
  FittedBasis basis_;
  SensorRanking ranking_;
  Index n_sensors_;
  std::optional<CostVector> cost_;
  std::uint64_t seed_;
  WarningSink warnings_;

  void check_sensor_count(Index p) const;
  void warn_if_oversampled(Index p) const;
  Reconstruction reconstruct_at(Index p, const Eigen::Ref<const Matrix>& measurements) const;
};

SensorRanking rank_sensors(const FittedBasis& basis, const std::optional<CostVector>& cost,
                           std::uint64_t seed);

/// Fit the basis to `snapshots`, then rank locations. An unset n_sensors
/// selects the QR-ranked prefix, min(n, active modes).
SsporModel sspor_fit(const Eigen::Ref<const Matrix>& snapshots, const BasisSpec& basis_spec,
                     std::optional<CostVector> cost = std::nullopt,
                     std::optional<Index> n_sensors = std::nullopt, std::uint64_t seed = 0,
                     WarningSink warnings = stderr_warnings());

}  // namespace spsense
