#include "spsense/classification.hpp"

#include <algorithm>
#include <numeric>

#include "spsense/linalg.hpp"

namespace spsense {

namespace {

IndexList descending_order(const Vector& scores) {
  IndexList order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) > scores(b); });
  return order;
}

}  // namespace

IndexList select_sensors_from_solution(const SparseSolution<double>& solution,
                                       std::optional<Index> n_sensors, double threshold,
                                       const WarningSink& warnings) {
  const Vector norms = solution.s.rowwise().norm();
  const IndexList order = descending_order(norms);
  const auto above = static_cast<Index>((norms.array() > threshold).count());

  if (!n_sensors) return IndexList(order.begin(), order.begin() + above);

  const Index wanted = std::min<Index>(*n_sensors, static_cast<Index>(order.size()));
  if (above < *n_sensors && warnings)
    warnings("only " + std::to_string(above) + " rows of the sparse solution exceed the threshold; " +
             "padding to " + std::to_string(wanted) + " sensors with the next-largest rows");
  return IndexList(order.begin(), order.begin() + wanted);
}

IndexList reweighted_mode_order(const Eigen::Ref<const Vector>& singular_values,
                                const Eigen::Ref<const Matrix>& weights) {
  require(singular_values.size() == weights.rows(), ErrorCode::DimensionMismatch,
          "reweighted_mode_order: " + std::to_string(singular_values.size()) +
              " singular values for " + std::to_string(weights.rows()) + " weight rows");
  const Vector scores = singular_values.cwiseProduct(weights.rowwise().norm());
  return descending_order(scores);
}

Matrix sample_columns(const Eigen::Ref<const Matrix>& snapshots, std::span<const Index> sensors) {
  Matrix out(snapshots.rows(), static_cast<Index>(sensors.size()));
  for (std::size_t j = 0; j < sensors.size(); ++j) {
    require(sensors[j] >= 0 && sensors[j] < snapshots.cols(), ErrorCode::IndexOutOfRange,
            "sensor index " + std::to_string(sensors[j]) + " outside the data");
    out.col(static_cast<Index>(j)) = snapshots.col(sensors[j]);
  }
  return out;
}

SspocModel::SspocModel(FittedBasis basis, std::unique_ptr<LinearClassifier> prototype,
                       SspocOptions options, WarningSink warnings)
    : basis_(std::move(basis)),
      prototype_(std::move(prototype)),
      options_(options),
      warnings_(std::move(warnings)) {
  if (!prototype_) prototype_ = std::make_unique<LdaClassifier>();
  require(!options_.n_sensors || *options_.n_sensors >= 1, ErrorCode::OutOfRange,
          "n_sensors must be positive");
  require(options_.l1_penalty > 0.0, ErrorCode::NonPositiveAlpha, "l1_penalty must be positive");
}

SspocModel::SspocModel(FittedBasis basis, std::unique_ptr<LinearClassifier> prototype,
                       SspocOptions options, Matrix weights, SparseSolution<double> solution,
                       IndexList selected, std::unique_ptr<LinearClassifier> refit,
                       WarningSink warnings)
    : SspocModel(std::move(basis), std::move(prototype), options, std::move(warnings)) {
  require(solution.s.rows() == basis_.n_features(), ErrorCode::DimensionMismatch,
          "stored sparse solution does not match the basis");
  for (Index idx : selected)
    require(idx >= 0 && idx < basis_.n_features(), ErrorCode::IndexOutOfRange,
            "stored sensor index out of range");
  weights_ = std::move(weights);
  solution_ = std::move(solution);
  selected_ = std::move(selected);
  refit_ = std::move(refit);
}

const LinearClassifier& SspocModel::feature_classifier() const {
  require(feature_classifier_ != nullptr, ErrorCode::NotFitted, "sspoc: not fitted");
  return *feature_classifier_;
}

const LinearClassifier& SspocModel::refit_classifier() const {
  require(refit_ != nullptr, ErrorCode::NotFitted, "sspoc: not fitted");
  return *refit_;
}

void SspocModel::fit_downstream(const Eigen::Ref<const Matrix>& snapshots,
                                std::span<const Label> labels) {
  require(snapshots.cols() == basis_.n_features(), ErrorCode::DimensionMismatch,
          "sspoc: data has " + std::to_string(snapshots.cols()) + " locations, basis has " +
              std::to_string(basis_.n_features()));
  require(static_cast<Index>(labels.size()) == snapshots.rows(), ErrorCode::DimensionMismatch,
          "sspoc: " + std::to_string(labels.size()) + " labels for " +
              std::to_string(snapshots.rows()) + " examples");
  require_finite(snapshots, "training data");

  const Matrix psi = basis_.matrix_representation();
  const Matrix psi_pinv = pseudoinverse(psi);  // r x n
  const Matrix features = snapshots * psi_pinv.transpose();

  auto classifier = prototype_->clone_unfitted();
  classifier->fit(features, labels);
  Matrix weights = classifier->weights();

  SparseSolution<double> solution;
  const Index r = psi_pinv.rows();
  const Index n = psi_pinv.cols();
  if (weights.cols() == 1) {
    const Index budget = std::min(options_.n_sensors.value_or(r), std::min(r, n));
    solution = omp(psi_pinv, weights.col(0), budget, options_.omp_residual_tol);
  } else {
    solution = multitask_lasso(psi_pinv, weights, options_.l1_penalty, options_.lasso_max_iter,
                               options_.lasso_tol);
    if (!solution.converged && warnings_)
      warnings_("multi-task lasso stopped after " + std::to_string(solution.iterations) +
                " sweeps without meeting the tolerance");
  }
  require(solution.s.cwiseAbs().maxCoeff() > 0.0, ErrorCode::NoSensorsSelected,
          "the sparse solution is identically zero; lower l1_penalty");

  IndexList selected =
      select_sensors_from_solution(solution, options_.n_sensors, options_.threshold, warnings_);
  require(!selected.empty(), ErrorCode::NoSensorsSelected,
          "no sensors above the selection threshold");

  feature_classifier_ = std::move(classifier);
  weights_ = std::move(weights);
  solution_ = std::move(solution);
  selected_ = std::move(selected);
  refit_on_selection(snapshots, labels);
}

void SspocModel::refit_on_selection(const Eigen::Ref<const Matrix>& snapshots,
                                    std::span<const Label> labels) {
  auto refit = prototype_->clone_unfitted();
  refit->fit(sample_columns(snapshots, selected_), labels);
  refit_ = std::move(refit);
}

LabelList SspocModel::predict(const Eigen::Ref<const Matrix>& sampled) const {
  require(sampled.cols() == static_cast<Index>(selected_.size()) || sampled.rows() == 0,
          ErrorCode::DimensionMismatch,
          "predict: expected " + std::to_string(selected_.size()) + " sensor columns, got " +
              std::to_string(sampled.cols()));
  if (sampled.rows() == 0) return {};
  return refit_classifier().predict(sampled);
}

void SspocModel::update_sensors(Index n_sensors, const Eigen::Ref<const Matrix>& snapshots,
                                std::span<const Label> labels) {
  require(n_sensors >= 1 && n_sensors <= basis_.n_features(), ErrorCode::OutOfRange,
          "n_sensors " + std::to_string(n_sensors) + " outside [1, " +
              std::to_string(basis_.n_features()) + "]");
  require(solution_.s.size() > 0, ErrorCode::NotFitted, "update_sensors before fit");
  require(static_cast<Index>(labels.size()) == snapshots.rows(), ErrorCode::DimensionMismatch,
          "update_sensors: labels and rows differ");
  options_.n_sensors = n_sensors;
  selected_ = select_sensors_from_solution(solution_, n_sensors, options_.threshold, warnings_);
  refit_on_selection(snapshots, labels);
}

void SspocModel::update_n_basis_modes(Index r, const Eigen::Ref<const Matrix>& snapshots,
                                      std::span<const Label> labels) {
  FittedBasis previous = basis_;
  basis_ = basis_.shrink_modes(r);
  try {
    fit_downstream(snapshots, labels);
  } catch (...) {
    basis_ = std::move(previous);
    throw;
  }
}

SspocModel sspoc_fit(const Eigen::Ref<const Matrix>& snapshots, std::span<const Label> labels,
                     const BasisSpec& basis_spec, const SspocOptions& options,
                     std::unique_ptr<LinearClassifier> classifier, WarningSink warnings) {
  require(static_cast<Index>(labels.size()) == snapshots.rows(), ErrorCode::DimensionMismatch,
          "sspoc: " + std::to_string(labels.size()) + " labels for " +
              std::to_string(snapshots.rows()) + " examples");
  SspocModel model(fit_basis(basis_spec, snapshots), std::move(classifier), options,
                   std::move(warnings));
  model.fit_downstream(snapshots, labels);
  return model;
}

}  // namespace spsense
