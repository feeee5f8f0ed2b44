#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spsense/utils.hpp"

namespace spsense {

using Label = int;
using LabelList = std::vector<Label>;

/// Contract for the classifier SSPOC fits in feature space and refits on the
/// selected sensors. weights() is r x q with q = 1 for two classes.
class LinearClassifier {
 public:
  virtual ~LinearClassifier() = default;

  virtual void fit(const Eigen::Ref<const Matrix>& features, std::span<const Label> labels) = 0;
  virtual LabelList predict(const Eigen::Ref<const Matrix>& features) const = 0;
  virtual Matrix weights() const = 0;
  virtual bool is_fitted() const = 0;
  /// Unfitted instance with the same hyperparameters.
  virtual std::unique_ptr<LinearClassifier> clone_unfitted() const = 0;
  virtual std::string name() const = 0;
};

inline constexpr double kDefaultShrinkage = 1e-4;

struct LdaModel {
  LabelList classes;
  Matrix class_means;  // c x r
  Matrix directions;   // r x q, q = min(c - 1, r)
  Matrix centroids;    // c x q, class means in discriminant space
  Vector eigenvalues;  // q generalized eigenvalues, descending
  /// Directions whose eigenvalue is numerically zero (between-class scatter
  /// has lower rank than q). They are kept, not dropped.
  Index n_degenerate = 0;
  double shrinkage = kDefaultShrinkage;
};

/// Fit LDA with pooled within-class scatter S_w, regularized as
/// (1 - shrinkage) S_w + shrinkage (tr(S_w) / r) I. Two classes give the single
/// direction S_w_reg^-1 (mu_1 - mu_0); more give the top min(c - 1, r)
/// generalized eigenvectors of (S_b, S_w_reg).
/// `classes`, when given, fixes the label set; a listed class with no rows is
/// an EmptyClass error.
LdaModel lda_fit(const Eigen::Ref<const Matrix>& features, std::span<const Label> labels,
                 double shrinkage = kDefaultShrinkage, std::span<const Label> classes = {});

/// Nearest class centroid in discriminant space; exact ties go to the class
/// listed first (smallest label).
LabelList lda_predict(const LdaModel& model, const Eigen::Ref<const Matrix>& features);

class LdaClassifier final : public LinearClassifier {
 public:
  explicit LdaClassifier(double shrinkage = kDefaultShrinkage) : shrinkage_(shrinkage) {}
  /// Already-fitted classifier around a stored model.
  explicit LdaClassifier(LdaModel model)
      : shrinkage_(model.shrinkage), model_(std::make_shared<const LdaModel>(std::move(model))) {}

  void fit(const Eigen::Ref<const Matrix>& features, std::span<const Label> labels) override;
  LabelList predict(const Eigen::Ref<const Matrix>& features) const override;
  Matrix weights() const override;
  bool is_fitted() const override { return model_ != nullptr; }
  std::unique_ptr<LinearClassifier> clone_unfitted() const override;
  std::string name() const override { return "lda"; }

  double shrinkage() const noexcept { return shrinkage_; }
  const LdaModel& model() const;

 private:
  double shrinkage_;
  std::shared_ptr<const LdaModel> model_;
};

/// Fraction of matching labels; 0 for empty input.
double accuracy(std::span<const Label> truth, std::span<const Label> predicted);

}  // namespace spsense
