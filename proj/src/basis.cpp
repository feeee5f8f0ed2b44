#include "spsense/basis.hpp"

#include <cmath>

#include "spsense/linalg.hpp"

namespace spsense {

std::string_view basis_kind_name(BasisKind kind) {
  switch (kind) {
    case BasisKind::Identity: return "identity";
    case BasisKind::Svd: return "svd";
    case BasisKind::RandomProjection: return "randproj";
  }
  return "unknown";
}

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "identity") return BasisKind::Identity;
  if (name == "svd" || name == "rsvd") return BasisKind::Svd;
  if (name == "randproj") return BasisKind::RandomProjection;
  fail(ErrorCode::InvalidParams, "unknown basis '" + std::string(name) + "'");
}

FittedBasis::FittedBasis(BasisSpec spec, Matrix modes, std::optional<Vector> singular_values,
                         Index active_modes)
    : spec_(spec),
      modes_(std::move(modes)),
      singular_values_(std::move(singular_values)),
      active_modes_(active_modes) {
  require(active_modes_ >= 1 && active_modes_ <= modes_.cols(), ErrorCode::TooManyModes,
          "FittedBasis: active mode count " + std::to_string(active_modes_) +
              " outside [1, " + std::to_string(modes_.cols()) + "]");
}

Matrix FittedBasis::matrix_representation(Index r) const {
  require(r >= 1 && r <= max_modes(), ErrorCode::TooManyModes,
          "requested " + std::to_string(r) + " modes but the basis holds " +
              std::to_string(max_modes()));
  return modes_.leftCols(r);
}

FittedBasis FittedBasis::shrink_modes(Index r) const {
  require(r >= 1, ErrorCode::TooManyModes, "mode count must be positive");
  require(r <= active_modes_, ErrorCode::TooManyModes,
          "cannot grow from " + std::to_string(active_modes_) + " to " + std::to_string(r) +
              " modes without refitting the basis");
  FittedBasis out = *this;
  out.active_modes_ = r;
  return out;
}

FittedBasis fit_basis(const BasisSpec& spec, const Eigen::Ref<const Matrix>& snapshots) {
  require(snapshots.size() > 0, ErrorCode::EmptyMatrix, "fit_basis: empty snapshot matrix");
  require_finite(snapshots, "snapshot matrix");
  const Index m = snapshots.rows();
  const Index n = snapshots.cols();

  switch (spec.kind) {
    case BasisKind::Identity: {
      const Index r = spec.n_basis_modes.value_or(m);
      require(r >= 1 && r <= m, ErrorCode::TooManyModes,
              "identity basis: " + std::to_string(r) + " modes requested from " +
                  std::to_string(m) + " snapshots");
      return FittedBasis(spec, snapshots.topRows(r).transpose(), std::nullopt, r);
    }
    case BasisKind::Svd: {
      require(spec.n_basis_modes.has_value(), ErrorCode::InvalidParams,
              "svd basis: n_basis_modes is required");
      const Index r = *spec.n_basis_modes;
      require(r >= 1 && r <= std::min(m, n), ErrorCode::TooManyModes,
              "svd basis: " + std::to_string(r) + " modes exceeds min(rows, cols) = " +
                  std::to_string(std::min(m, n)));
      // Left singular vectors of X^T live in feature space.
      const Matrix xt = snapshots.transpose();
      SvdResult<double> svd;
      if (spec.randomized) {
        require(r + spec.n_oversamples <= std::min(m, n), ErrorCode::TooManyModes,
                "randomized svd basis: modes + oversamples exceeds min(rows, cols)");
        svd = randomized_svd(xt, r, spec.n_oversamples, spec.n_power_iters, spec.seed);
      } else {
        svd = truncated_svd(xt, r);
      }
      return FittedBasis(spec, std::move(svd.left_modes), std::move(svd.singular_values), r);
    }
    case BasisKind::RandomProjection: {
      require(spec.n_basis_modes.has_value(), ErrorCode::InvalidParams,
              "random projection basis: n_basis_modes is required");
      const Index r = *spec.n_basis_modes;
      require(r >= 1, ErrorCode::TooManyModes, "random projection basis: need at least one mode");
      SeededRng rng(spec.seed);
      Matrix modes = gaussian_matrix(n, r, rng, 1.0 / std::sqrt(static_cast<double>(r)));
      return FittedBasis(spec, std::move(modes), std::nullopt, r);
    }
  }
  fail(ErrorCode::InvalidParams, "fit_basis: unknown basis kind");
}

}  // namespace spsense
