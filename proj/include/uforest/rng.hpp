#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <utility>

namespace uforest {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Derives an independent stream key from a parent key and an index.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) noexcept {
  return mix64(mix64(parent ^ 0x6a09e667f3bcc909ULL) + mix64(index + 0x9e3779b97f4a7c15ULL));
}

template <typename... Ix>
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index, Ix... rest) noexcept {
  return derive_seed(derive_seed(parent, index), static_cast<std::uint64_t>(rest)...);
}

/// Counter-based generator: the i-th output is mix64(key + i * gamma).
///
/// Every value depends only on (key, counter), so streams can be derived per
/// tree, per row or per replicate without any shared state. All distribution
/// helpers are implemented here (not via <random> distributions) so that
/// sampled values are identical across standard library implementations.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t key) noexcept : key_(key) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  constexpr result_type operator()() noexcept {
    return mix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double uniform_open0() noexcept { return 1.0 - uniform(); }

  /// Uniform integer in [0, bound), Lemire's nearly-divisionless method.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  template <typename T>
  void shuffle(std::span<T> values) noexcept {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Moves a uniform random subset of size `count` to the front of `values`.
  template <typename T>
  void partial_shuffle(std::span<T> values, std::size_t count) noexcept {
    const std::size_t n = values.size();
    for (std::size_t i = 0; i < count && i + 1 < n; ++i) {
      const auto j = i + static_cast<std::size_t>(below(n - i));
      std::swap(values[i], values[j]);
    }
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace uforest
