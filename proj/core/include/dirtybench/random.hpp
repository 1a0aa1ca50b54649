#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dirtybench {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;

/// Derives an independent stream seed from a root seed and any number of
/// integral components (dataset hash, error type, rate in ppm, fold, ...).
template <class... Parts>
std::uint64_t derive_seed(std::uint64_t root, Parts... parts) noexcept {
  std::uint64_t s = splitmix64(root);
  ((s = hash_combine(s, static_cast<std::uint64_t>(parts))), ...);
  return s;
}

std::string to_hex(std::uint64_t value);

/// Seeded generator with platform-independent sampling helpers.
///
/// std::mt19937_64's output sequence is fixed by the standard, but the
/// std::*_distribution adaptors are not, so every draw goes through the
/// helpers below instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform01();

  template <class T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  /// k distinct indices from [0, n), in draw order.
  std::vector<std::size_t> sample(std::size_t n, std::size_t k);

 private:
  std::mt19937_64 engine_;
};

}  // namespace dirtybench
