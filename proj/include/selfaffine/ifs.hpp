#pragma once

// Affine iterated function systems, words over their alphabet and
// random-iteration sampling of invariant measures.

#include <cstdint>
#include <span>
#include <vector>

#include "selfaffine/linalg.hpp"
#include "selfaffine/point_cloud.hpp"

namespace selfaffine {

using Letter = std::uint32_t;
using Word = std::vector<Letter>;

// x -> linear * x + translation
struct AffineMap {
  Matrix linear;
  std::vector<double> translation;

  std::vector<double> operator()(std::span<const double> x) const;
};

class IfsSystem {
 public:
  // Requires at least one map, a shared dimension and invertible linear
  // parts (numeric rank d).
  explicit IfsSystem(std::vector<AffineMap> maps);
  static IfsSystem from_linear(std::vector<Matrix> linear,
                               std::vector<std::vector<double>> translations = {});

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return maps_.size(); }
  const AffineMap& map(std::size_t i) const noexcept { return maps_[i]; }
  const std::vector<AffineMap>& maps() const noexcept { return maps_; }
  const Matrix& linear(std::size_t i) const noexcept { return maps_[i].linear; }
  std::vector<Matrix> linear_parts() const;

 private:
  std::size_t dimension_ = 0;
  std::vector<AffineMap> maps_;
};

// A_{w_1} A_{w_2} ... A_{w_n}; identity for the empty word.
Matrix linear_word(const IfsSystem& sys, std::span<const Letter> word);
// T_{w_1} o T_{w_2} o ... o T_{w_n}.
AffineMap affine_word(const IfsSystem& sys, std::span<const Letter> word);

struct ContractionReport {
  double max_norm = 0.0;
  double max_pair_sum = 0.0;
  // max_pair_sum < 1 for two or more maps, max_norm < 1/2 for one map.
  bool falconer_ok = false;
};

// Euclidean operator norms only: a sufficient, not necessary, test.
ContractionReport contraction_report(const IfsSystem& sys);
// Throws contraction when some map has Euclidean norm >= 1.
void require_contracting(const IfsSystem& sys);

// T_w(v0).
std::vector<double> cylinder_point(const IfsSystem& sys, std::span<const Letter> word,
                                   std::span<const double> v0);

struct ChaosGameOptions {
  std::size_t burn_in = 100;
  // Independent orbits, each started at the origin with its own burn-in and
  // RNG stream (seed, orbit index). Output is concatenated in orbit order.
  unsigned orbits = 8;
  unsigned workers = 0;
  // Run even when the Euclidean contraction check fails.
  bool force = false;
};

PointCloud chaos_game(const IfsSystem& sys, std::span<const double> probs,
                      std::size_t n_points, std::uint64_t seed,
                      const ChaosGameOptions& options = {});

// Probability vector check shared by samplers: positive entries summing to
// one within 1e-12.
void validate_probabilities(std::span<const double> probs, std::size_t expected);

// Translations drawn uniformly from [-1, 1]^d per map.
IfsSystem with_random_translations(std::vector<Matrix> linear, std::uint64_t seed);

}  // namespace selfaffine
