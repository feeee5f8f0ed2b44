#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "spsense/utils.hpp"

namespace spsense {

enum class BasisKind { Identity, Svd, RandomProjection };

std::string_view basis_kind_name(BasisKind kind);
BasisKind parse_basis_kind(std::string_view name);

struct BasisSpec {
  BasisKind kind = BasisKind::Identity;
  /// Unset means "all snapshots" for Identity; required for the other kinds.
  std::optional<Index> n_basis_modes;
  /// Svd only: use the randomized range finder instead of a full decomposition.
  bool randomized = false;
  std::uint64_t seed = 0;
  Index n_oversamples = 10;
  Index n_power_iters = 2;
};

/// A fitted basis: n x r_max mode matrix of which the first active_modes()
/// columns are in use. Immutable; shrink_modes returns a new value.
class FittedBasis {
 public:
  FittedBasis(BasisSpec spec, Matrix modes, std::optional<Vector> singular_values,
              Index active_modes);

  const BasisSpec& spec() const noexcept { return spec_; }
  const Matrix& modes() const noexcept { return modes_; }
  const std::optional<Vector>& singular_values() const noexcept { return singular_values_; }
  Index n_features() const noexcept { return modes_.rows(); }
  Index max_modes() const noexcept { return modes_.cols(); }
  Index active_modes() const noexcept { return active_modes_; }

  /// Leading r columns of the mode matrix (no recomputation). r <= max_modes().
  Matrix matrix_representation(Index r) const;
  /// Leading active_modes() columns.
  Matrix matrix_representation() const { return matrix_representation(active_modes_); }

  /// Same modes, fewer of them active. Growing past the current active count
  /// throws TooManyModes: a larger basis needs a refit.
  FittedBasis shrink_modes(Index r) const;

 private:
  BasisSpec spec_;
  Matrix modes_;
  std::optional<Vector> singular_values_;
  Index active_modes_;
};

/// Fit a basis to snapshots X (rows = examples, columns = locations).
///   Identity          modes = first r rows of X, as columns
///   Svd               modes = leading right singular vectors of X
///   RandomProjection  modes = n x r Gaussian, variance 1/r, from spec.seed
FittedBasis fit_basis(const BasisSpec& spec, const Eigen::Ref<const Matrix>& snapshots);

}  // namespace spsense
