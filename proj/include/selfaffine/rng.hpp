#pragma once

// Counter-based generator: output i of stream (seed, id) is a mixing
// function of a key derived from (seed, id) and the counter i. Streams are
// independent of evaluation order, so parallel sampling stays reproducible.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace selfaffine {

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix64(mix64(seed) + (stream + 1) * 0xD1B54A32D192ED03ULL)) {}

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller; always consumes two draws.
  double normal() noexcept;

  // Uniform integer in [0, n), unbiased.
  std::size_t below(std::size_t n) noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Inverse-CDF sampling from a finite probability vector.
class Categorical {
 public:
  Categorical() = default;
  explicit Categorical(std::span<const double> probs);

  std::size_t sample(CounterRng& rng) const noexcept;
  std::size_t size() const noexcept { return cumulative_.size(); }

 private:
  std::vector<double> cumulative_;
};

}  // namespace selfaffine
