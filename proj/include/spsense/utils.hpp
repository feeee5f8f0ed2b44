#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spsense/error.hpp"

namespace spsense {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IndexList = std::vector<Index>;

/// Seeded pseudo-random stream.
///
/// The engine is the 64-bit Mersenne Twister (std::mt19937_64), whose output
/// sequence is fixed by the C++ standard. Uniform, Gaussian and bounded-integer
/// draws are derived from raw engine output here rather than through the
/// <random> distributions, whose algorithms are implementation-defined. A seed
/// therefore yields the same stream on every platform and toolchain.
///
///   uniform()   : top 53 bits of one draw, scaled to [0, 1)
///   normal()    : Box-Muller on two uniforms, both outputs used in turn
///   below(n)    : Lemire-style rejection on the full 64-bit draw
class SeededRng {
 public:
  static constexpr const char* kAlgorithm = "mt19937_64+box-muller";

  explicit SeededRng(std::uint64_t seed);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next_u64();
  double uniform();
  double normal();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Independent stream keyed by (seed, stream_id), for use on another thread.
  SeededRng substream(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Gaussian matrix with entries N(0, stddev^2), filled column by column.
Matrix gaussian_matrix(Index rows, Index cols, SeededRng& rng, double stddev = 1.0);

/// Root-mean-square of the entrywise difference.
double rmse(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b);

/// Fisher-Yates shuffle of {0..all_n-1} \ chosen.
IndexList shuffled_complement(Index all_n, std::span<const Index> chosen, SeededRng& rng);

bool is_permutation_of_range(std::span<const Index> order, Index n);
void require_finite(const Eigen::Ref<const Matrix>& m, const std::string& what);

/// Receives human-readable warnings; library code never prints on its own.
using WarningSink = std::function<void(const std::string&)>;

WarningSink stderr_warnings();
/// Sink that appends into `store`, which must outlive the sink.
WarningSink collect_warnings(std::vector<std::string>& store);

/// Name of the environment variable that overrides the default seed.
inline constexpr const char* kSeedEnvVar = "SPSENSE_SEED";
std::uint64_t default_seed();

}  // namespace spsense
