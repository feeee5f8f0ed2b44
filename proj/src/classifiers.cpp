#include "spsense/classifiers.hpp"

#include <algorithm>
#include <limits>

#include "spsense/linalg.hpp"

namespace spsense {

namespace {

constexpr double kWhiteningCutoff = 1e-12;
constexpr double kDegenerateEigenvalue = 1e-10;
constexpr double kTieTolerance = 1e-12;

Index class_slot(const LabelList& classes, Label label) {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) return -1;
  return static_cast<Index>(it - classes.begin());
}

}  // namespace

LdaModel lda_fit(const Eigen::Ref<const Matrix>& features, std::span<const Label> labels,
                 double shrinkage, std::span<const Label> classes) {
  const Index m = features.rows();
  const Index r = features.cols();
  require(static_cast<Index>(labels.size()) == m, ErrorCode::DimensionMismatch,
          "lda: " + std::to_string(labels.size()) + " labels for " + std::to_string(m) + " rows");
  require(r >= 1, ErrorCode::EmptyMatrix, "lda: no features");
  require(shrinkage >= 0.0 && shrinkage <= 1.0, ErrorCode::InvalidParams,
          "lda: shrinkage must lie in [0, 1]");
  require_finite(features, "lda features");

  LdaModel model;
  model.shrinkage = shrinkage;
  if (classes.empty()) {
    model.classes.assign(labels.begin(), labels.end());
  } else {
    model.classes.assign(classes.begin(), classes.end());
  }
  std::sort(model.classes.begin(), model.classes.end());
  model.classes.erase(std::unique(model.classes.begin(), model.classes.end()), model.classes.end());
  const auto c = static_cast<Index>(model.classes.size());
  require(c >= 2, ErrorCode::SingleClass, "lda: need at least two classes");

  std::vector<Index> counts(static_cast<std::size_t>(c), 0);
  model.class_means = Matrix::Zero(c, r);
  for (Index i = 0; i < m; ++i) {
    const Index k = class_slot(model.classes, labels[static_cast<std::size_t>(i)]);
    require(k >= 0, ErrorCode::InvalidParams,
            "lda: label " + std::to_string(labels[static_cast<std::size_t>(i)]) +
                " not among the declared classes");
    model.class_means.row(k) += features.row(i);
    ++counts[static_cast<std::size_t>(k)];
  }
  for (Index k = 0; k < c; ++k) {
    require(counts[static_cast<std::size_t>(k)] > 0, ErrorCode::EmptyClass,
            "lda: class " + std::to_string(model.classes[static_cast<std::size_t>(k)]) +
                " has no examples");
    model.class_means.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
  }

  const Eigen::RowVectorXd grand_mean = features.colwise().mean();
  Matrix within = Matrix::Zero(r, r);
  for (Index i = 0; i < m; ++i) {
    const Index k = class_slot(model.classes, labels[static_cast<std::size_t>(i)]);
    const Eigen::RowVectorXd centered = features.row(i) - model.class_means.row(k);
    within.noalias() += centered.transpose() * centered;
  }
  within /= static_cast<double>(m);
  Matrix between = Matrix::Zero(r, r);
  for (Index k = 0; k < c; ++k) {
    const Eigen::RowVectorXd offset = model.class_means.row(k) - grand_mean;
    between.noalias() +=
        static_cast<double>(counts[static_cast<std::size_t>(k)]) * offset.transpose() * offset;
  }
  between /= static_cast<double>(m);

  double trace = within.trace() / static_cast<double>(r);
  if (!(trace > 0.0)) trace = 1.0;
  const Matrix regularized =
      (1.0 - shrinkage) * within + shrinkage * trace * Matrix::Identity(r, r);

  // Whitening transform for the regularized scatter; numerically null
  // directions are dropped, which amounts to a pseudo-inverse.
  Eigen::SelfAdjointEigenSolver<Matrix> scatter_eig(regularized);
  const Vector& lambda = scatter_eig.eigenvalues();
  const double lambda_max = std::max(lambda.maxCoeff(), 0.0);
  Vector inv_sqrt = Vector::Zero(r);
  Vector inv = Vector::Zero(r);
  for (Index i = 0; i < r; ++i) {
    if (lambda(i) > kWhiteningCutoff * lambda_max && lambda(i) > 0.0) {
      inv_sqrt(i) = 1.0 / std::sqrt(lambda(i));
      inv(i) = 1.0 / lambda(i);
    }
  }
  const Matrix& basis = scatter_eig.eigenvectors();

  const Index q = std::min(c - 1, r);
  if (c == 2) {
    const Vector diff = (model.class_means.row(1) - model.class_means.row(0)).transpose();
    model.directions = basis * (inv.asDiagonal() * (basis.transpose() * diff));
    const double denom = model.directions.col(0).dot(regularized * model.directions.col(0));
    const double numer = model.directions.col(0).dot(between * model.directions.col(0));
    model.eigenvalues = Vector::Constant(1, denom > 0.0 ? numer / denom : 0.0);
  } else {
    const Matrix whiten = basis * inv_sqrt.asDiagonal();
    const Matrix projected = whiten.transpose() * between * whiten;
    Eigen::SelfAdjointEigenSolver<Matrix> between_eig(projected);
    // Eigen sorts ascending; take the q largest, largest first.
    Matrix top(r, q);
    model.eigenvalues.resize(q);
    for (Index k = 0; k < q; ++k) {
      top.col(k) = between_eig.eigenvectors().col(r - 1 - k);
      model.eigenvalues(k) = between_eig.eigenvalues()(r - 1 - k);
    }
    model.directions = whiten * top;
    Matrix unused(0, 0);
    normalize_mode_signs(model.directions, unused);
  }
  const double leading = std::max(std::abs(model.eigenvalues(0)), std::numeric_limits<double>::min());
  for (Index k = 0; k < model.eigenvalues.size(); ++k)
    if (model.eigenvalues(k) <= kDegenerateEigenvalue * leading) ++model.n_degenerate;

  model.centroids = model.class_means * model.directions;
  return model;
}

LabelList lda_predict(const LdaModel& model, const Eigen::Ref<const Matrix>& features) {
  require(features.cols() == model.directions.rows() || features.rows() == 0,
          ErrorCode::DimensionMismatch,
          "lda predict: expected " + std::to_string(model.directions.rows()) +
              " features, got " + std::to_string(features.cols()));
  LabelList out;
  out.reserve(static_cast<std::size_t>(features.rows()));
  if (features.rows() == 0) return out;
  const Matrix projected = features * model.directions;
  for (Index i = 0; i < projected.rows(); ++i) {
    Index best = 0;
    double best_dist = (projected.row(i) - model.centroids.row(0)).squaredNorm();
    for (Index k = 1; k < model.centroids.rows(); ++k) {
      const double dist = (projected.row(i) - model.centroids.row(k)).squaredNorm();
      if (dist < best_dist - kTieTolerance * std::max(best_dist, dist)) {
        best = k;
        best_dist = dist;
      }
    }
    out.push_back(model.classes[static_cast<std::size_t>(best)]);
  }
  return out;
}

void LdaClassifier::fit(const Eigen::Ref<const Matrix>& features, std::span<const Label> labels) {
  model_ = std::make_shared<const LdaModel>(lda_fit(features, labels, shrinkage_));
}

LabelList LdaClassifier::predict(const Eigen::Ref<const Matrix>& features) const {
  return lda_predict(model(), features);
}

Matrix LdaClassifier::weights() const { return model().directions; }

std::unique_ptr<LinearClassifier> LdaClassifier::clone_unfitted() const {
  return std::make_unique<LdaClassifier>(shrinkage_);
}

const LdaModel& LdaClassifier::model() const {
  require(model_ != nullptr, ErrorCode::NotFitted, "lda classifier used before fit");
  return *model_;
}

double accuracy(std::span<const Label> truth, std::span<const Label> predicted) {
  require(truth.size() == predicted.size(), ErrorCode::DimensionMismatch,
          "accuracy: label lists differ in length");
  if (truth.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

}  // namespace spsense
