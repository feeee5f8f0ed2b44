#pragma once

#include <memory>
#include <optional>
#include <span>

#include "spsense/basis.hpp"
#include "spsense/classifiers.hpp"
#include "spsense/sparse_solvers.hpp"
#include "spsense/utils.hpp"

namespace spsense {

struct SspocOptions {
  /// Unset: keep every row of s above `threshold`.
  std::optional<Index> n_sensors;
  double threshold = 1e-10;
  /// Multi-task lasso penalty (multi-class problems).
  double l1_penalty = 0.1;
  Index lasso_max_iter = 5000;
  double lasso_tol = 1e-8;
  double omp_residual_tol = 1e-10;
};

/// Row indices of s ordered by descending row norm (ties: lower index). With
/// n_sensors set, the top n_sensors rows are returned even if some fall below
/// `threshold` (a warning is emitted); otherwise only rows above it.
IndexList select_sensors_from_solution(const SparseSolution<double>& solution,
                                       std::optional<Index> n_sensors, double threshold,
                                       const WarningSink& warnings = {});

/// Mode indices sorted by descending sigma_k * ||w_k,:||_2. Reordering the
/// basis columns this way biases it toward discriminating directions.
IndexList reweighted_mode_order(const Eigen::Ref<const Vector>& singular_values,
                                const Eigen::Ref<const Matrix>& weights);

/// Sensor placement for classification.
///
/// fit runs: basis fit; features Psi^+ x for each example; classifier fit in
/// feature space giving w (r x q); sparse solve Psi^+ s = w (OMP when q = 1,
/// multi-task lasso otherwise); sensor selection by row norm of s; and a refit
/// of a fresh classifier on the raw data restricted to the selected sensors.
class SspocModel {
 public:
  SspocModel(FittedBasis basis, std::unique_ptr<LinearClassifier> prototype,
             SspocOptions options, WarningSink warnings = stderr_warnings());

  /// Rebuild a fitted model from stored parts (persistence).
  SspocModel(FittedBasis basis, std::unique_ptr<LinearClassifier> prototype, SspocOptions options,
             Matrix weights, SparseSolution<double> solution, IndexList selected,
             std::unique_ptr<LinearClassifier> refit, WarningSink warnings = stderr_warnings());

  const FittedBasis& basis() const noexcept { return basis_; }
  const SspocOptions& options() const noexcept { return options_; }
  const Matrix& weights() const noexcept { return weights_; }
  const SparseSolution<double>& solution() const noexcept { return solution_; }
  const IndexList& selected_sensors() const noexcept { return selected_; }
  const LinearClassifier& feature_classifier() const;
  const LinearClassifier& refit_classifier() const;
  const LinearClassifier& prototype() const { return *prototype_; }

  /// Runs every step downstream of the (already fitted) basis.
  void fit_downstream(const Eigen::Ref<const Matrix>& snapshots, std::span<const Label> labels);

  /// Predict from measurements at selected_sensors(), in that column order.
  LabelList predict(const Eigen::Ref<const Matrix>& sampled) const;

  /// Reselect from the stored s (no new sparse solve) and refit the classifier.
  void update_sensors(Index n_sensors, const Eigen::Ref<const Matrix>& snapshots,
                      std::span<const Label> labels);

  /// Shrink the basis without refitting it, then redo everything downstream.
  void update_n_basis_modes(Index r, const Eigen::Ref<const Matrix>& snapshots,
                            std::span<const Label> labels);

  void set_warning_sink(WarningSink sink) { warnings_ = std::move(sink); }

 private:
  FittedBasis basis_;
  std::unique_ptr<LinearClassifier> prototype_;
  SspocOptions options_;
  WarningSink warnings_;
  std::unique_ptr<LinearClassifier> feature_classifier_;
  Matrix weights_;
  SparseSolution<double> solution_;
  IndexList selected_;
  std::unique_ptr<LinearClassifier> refit_;

  void refit_on_selection(const Eigen::Ref<const Matrix>& snapshots, std::span<const Label> labels);
};

/// Columns of `snapshots` at `sensors`, in that order.
Matrix sample_columns(const Eigen::Ref<const Matrix>& snapshots, std::span<const Index> sensors);

SspocModel sspoc_fit(const Eigen::Ref<const Matrix>& snapshots, std::span<const Label> labels,
                     const BasisSpec& basis_spec, const SspocOptions& options = {},
                     std::unique_ptr<LinearClassifier> classifier = nullptr,
                     WarningSink warnings = stderr_warnings());

}  // namespace spsense
