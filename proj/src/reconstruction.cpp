#include "spsense/reconstruction.hpp"

#include "spsense/linalg.hpp"

namespace spsense {

SensorRanking rank_sensors(const FittedBasis& basis, const std::optional<CostVector>& cost,
                           std::uint64_t seed) {
  const Matrix psi = basis.matrix_representation();
  return cost ? ccqr_rank(psi, *cost, seed) : qr_rank(psi, seed);
}

SsporModel::SsporModel(FittedBasis basis, SensorRanking ranking, Index n_sensors,
                       std::optional<CostVector> cost, std::uint64_t seed, WarningSink warnings)
    : basis_(std::move(basis)),
      ranking_(std::move(ranking)),
      n_sensors_(n_sensors),
      cost_(std::move(cost)),
      seed_(seed),
      warnings_(std::move(warnings)) {
  require(is_permutation_of_range(ranking_.order, basis_.n_features()), ErrorCode::InvalidParams,
          "sensor ranking is not a permutation of the candidate locations");
  check_sensor_count(n_sensors_);
}

void SsporModel::check_sensor_count(Index p) const {
  require(p >= 1 && p <= n_features(), ErrorCode::OutOfRange,
          "sensor count " + std::to_string(p) + " outside [1, " + std::to_string(n_features()) +
              "]");
}

void SsporModel::warn_if_oversampled(Index p) const {
  if (p > ranking_.n_meaningful && warnings_)
    warnings_("only the first " + std::to_string(ranking_.n_meaningful) +
              " ranked sensors are meaningful; sensors beyond that are drawn at random (" +
              std::to_string(p) + " requested)");
}

IndexList SsporModel::selected_sensors() const { return selected_sensors(n_sensors_); }

IndexList SsporModel::selected_sensors(Index p) const {
  check_sensor_count(p);
  return IndexList(ranking_.order.begin(), ranking_.order.begin() + p);
}

void SsporModel::set_n_sensors(Index p) {
  check_sensor_count(p);
  warn_if_oversampled(p);
  n_sensors_ = p;
}

Reconstruction SsporModel::reconstruct_at(Index p,
                                          const Eigen::Ref<const Matrix>& measurements) const {
  require(measurements.cols() == p, ErrorCode::DimensionMismatch,
          "expected " + std::to_string(p) + " measurements per row, got " +
              std::to_string(measurements.cols()));
  const Matrix psi = basis_.matrix_representation();
  const IndexList sensors = selected_sensors(p);
  Matrix sampled(p, psi.cols());
  for (Index i = 0; i < p; ++i) sampled.row(i) = psi.row(sensors[static_cast<std::size_t>(i)]);

  const auto fit = solve_least_squares(sampled, measurements.transpose());
  Reconstruction out;
  out.states = (psi * fit.solution).transpose();
  out.condition = fit.condition;
  out.ill_conditioned = !(fit.condition <= kIllConditioned);
  return out;
}

Vector SsporModel::predict(const Eigen::Ref<const Vector>& measurements) const {
  require(measurements.size() == n_sensors_, ErrorCode::DimensionMismatch,
          "predict: expected " + std::to_string(n_sensors_) + " measurements, got " +
              std::to_string(measurements.size()));
  return reconstruct_at(n_sensors_, measurements.transpose()).states.row(0).transpose();
}

Reconstruction SsporModel::reconstruct(const Eigen::Ref<const Matrix>& measurements) const {
  return reconstruct_at(n_sensors_, measurements);
}

std::vector<double> SsporModel::reconstruction_error(const Eigen::Ref<const Matrix>& test,
                                                     std::span<const Index> sensor_range) const {
  require(test.cols() == n_features(), ErrorCode::DimensionMismatch,
          "reconstruction_error: test rows have " + std::to_string(test.cols()) +
              " entries, model has " + std::to_string(n_features()) + " locations");
  require_finite(test, "test data");
  for (Index p : sensor_range) check_sensor_count(p);

  std::vector<double> errors;
  errors.reserve(sensor_range.size());
  for (Index p : sensor_range) {
    warn_if_oversampled(p);
    const IndexList sensors = selected_sensors(p);
    Matrix sampled(test.rows(), p);
    for (Index j = 0; j < p; ++j) sampled.col(j) = test.col(sensors[static_cast<std::size_t>(j)]);
    errors.push_back(rmse(reconstruct_at(p, sampled).states, test));
  }
  return errors;
}

void SsporModel::update_n_basis_modes(Index r) {
  FittedBasis shrunk = basis_.shrink_modes(r);
  SensorRanking ranking = rank_sensors(shrunk, cost_, seed_);
  basis_ = std::move(shrunk);
  ranking_ = std::move(ranking);
  warn_if_oversampled(n_sensors_);
}

SsporModel sspor_fit(const Eigen::Ref<const Matrix>& snapshots, const BasisSpec& basis_spec,
                     std::optional<CostVector> cost, std::optional<Index> n_sensors,
                     std::uint64_t seed, WarningSink warnings) {
  const Index n = snapshots.cols();
  if (n_sensors)
    require(*n_sensors >= 1 && *n_sensors <= n, ErrorCode::OutOfRange,
            "n_sensors " + std::to_string(*n_sensors) + " outside [1, " + std::to_string(n) + "]");
  FittedBasis basis = fit_basis(basis_spec, snapshots);
  SensorRanking ranking = rank_sensors(basis, cost, seed);
  const Index p = n_sensors.value_or(ranking.n_meaningful);
  SsporModel model(std::move(basis), std::move(ranking), p, std::move(cost), seed,
                   std::move(warnings));
  if (p > model.ranking().n_meaningful) model.set_n_sensors(p);
  return model;
}

}  // namespace spsense
