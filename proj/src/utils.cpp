#include "spsense/utils.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>

namespace spsense {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::MaxPivotsTooLarge: return "MaxPivotsTooLarge";
    case ErrorCode::RankTooLarge: return "RankTooLarge";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::TooManyModes: return "TooManyModes";
    case ErrorCode::InfeasibleSparsity: return "InfeasibleSparsity";
    case ErrorCode::ZeroDictionary: return "ZeroDictionary";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::NegativeCost: return "NegativeCost";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::NotFitted: return "NotFitted";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NoSensorsSelected: return "NoSensorsSelected";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelColumnMissing: return "LabelColumnMissing";
    case ErrorCode::InvalidParams: return "InvalidParams";
  }
  return "Unknown";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
  require(bound > 0, ErrorCode::InvalidParams, "SeededRng::below: bound must be positive");
  using u128 = unsigned __int128;
  std::uint64_t x = next_u64();
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = next_u64();
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

SeededRng SeededRng::substream(std::uint64_t stream_id) const {
  return SeededRng(splitmix64(seed_ ^ splitmix64(stream_id + 1)));
}

Matrix gaussian_matrix(Index rows, Index cols, SeededRng& rng, double stddev) {
  Matrix out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) out(i, j) = stddev * rng.normal();
  return out;
}

double rmse(const Eigen::Ref<const Matrix>& a, const Eigen::Ref<const Matrix>& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::DimensionMismatch,
          "rmse: shapes differ");
  if (a.size() == 0) return 0.0;
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

IndexList shuffled_complement(Index all_n, std::span<const Index> chosen, SeededRng& rng) {
  std::vector<char> taken(static_cast<std::size_t>(all_n), 0);
  for (Index idx : chosen) {
    require(idx >= 0 && idx < all_n, ErrorCode::IndexOutOfRange,
            "shuffled_complement: index " + std::to_string(idx) + " outside [0, " +
                std::to_string(all_n) + ")");
    taken[static_cast<std::size_t>(idx)] = 1;
  }
  IndexList rest;
  rest.reserve(static_cast<std::size_t>(all_n));
  for (Index i = 0; i < all_n; ++i)
    if (!taken[static_cast<std::size_t>(i)]) rest.push_back(i);

  for (std::size_t i = rest.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(rest[i - 1], rest[j]);
  }
  return rest;
}

bool is_permutation_of_range(std::span<const Index> order, Index n) {
  if (static_cast<Index>(order.size()) != n) return false;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  for (Index idx : order) {
    if (idx < 0 || idx >= n || seen[static_cast<std::size_t>(idx)]) return false;
    seen[static_cast<std::size_t>(idx)] = 1;
  }
  return true;
}

void require_finite(const Eigen::Ref<const Matrix>& m, const std::string& what) {
  require(m.allFinite(), ErrorCode::NonFiniteValue, what + " contains NaN or Inf");
}

WarningSink stderr_warnings() {
  return [](const std::string& msg) { std::cerr << "warning: " << msg << '\n'; };
}

WarningSink collect_warnings(std::vector<std::string>& store) {
  return [&store](const std::string& msg) { store.push_back(msg); };
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv(kSeedEnvVar)) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return value;
  }
  return 0;
}

}  // namespace spsense
