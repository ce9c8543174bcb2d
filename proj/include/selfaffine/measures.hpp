#pragma once

// Shift-invariant measures on words (Bernoulli, and Markov as an extension),
// Lyapunov exponents of random matrix products, local Lyapunov dimensions
// and the per-orbit growth-rate diagnostic for non-exact-dimensionality.

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "selfaffine/ifs.hpp"
#include "selfaffine/projection.hpp"

namespace selfaffine {

class Measure {
 public:
  // i.i.d. letters; positive probabilities summing to one within 1e-12.
  static Measure bernoulli(std::vector<double> probs);
  // Stationary Markov chain on letters. Rows of the transition matrix must
  // be probability vectors (zeros allowed) and the chain irreducible, so
  // the stationary law is unique; the first letter is drawn from it.
  static Measure markov(std::vector<std::vector<double>> transition);

  bool is_bernoulli() const noexcept { return transition_.empty(); }
  std::size_t size() const noexcept { return stationary_.size(); }
  // Bernoulli: the letter probabilities.
  const std::vector<double>& stationary() const noexcept { return stationary_; }
  const std::vector<std::vector<double>>& transition() const noexcept { return transition_; }

  // log mu([w]), -infinity for words of measure zero.
  double log_cylinder(std::span<const Letter> word) const;
  Word sample(std::size_t n, std::uint64_t seed, std::uint64_t stream) const;

 private:
  std::vector<double> stationary_;
  std::vector<std::vector<double>> transition_;
};

Word sample_word(const Measure& mu, std::size_t n, std::uint64_t seed, std::uint64_t stream);

struct LyapunovEstimate {
  // Non-increasing.
  std::vector<double> exponents;
  std::vector<double> std_errors;
  std::size_t n = 0;
  std::size_t trials = 0;
};

// Trial t uses the word sample_word(mu, n, seed, t). Each trial reads the
// exponents off the diagonal of a QR factorisation of the product,
// re-orthonormalised every 20 letters, started from the identity frame.
// Per-coordinate means over trials are then sorted.
LyapunovEstimate lyapunov_exponents(const IfsSystem& sys, const Measure& mu, std::size_t n,
                                    std::size_t trials, std::uint64_t seed,
                                    unsigned workers = 0);

// log ||(Q A_w)^{k}|| for k = 0..k_max, where ^k is the k-th exterior power;
// entry 0 is 0. Long products stay finite through exact power-of-two
// rescaling.
std::vector<double> log_exterior_norms(const IfsSystem& sys, const Matrix& q,
                                       std::span<const Letter> word, std::size_t k_max);

struct LocalDimension {
  double s_star = 0.0;
  bool saturated = false;
  std::size_t n = 0;
  std::size_t rank = 0;
};

// Root in s of (1/n)[log phi^s(Q A_w) - log mu([w])] on [0, rank Q]. The
// function is piecewise linear with breakpoints at integers, so the root is
// located by scanning integer panels and solved exactly on its panel.
LocalDimension local_lyap_dim_q(const IfsSystem& sys, const ProjectionMap& q,
                                const Measure& mu, std::span<const Letter> word);

struct KMeansFit {
  std::size_t k = 0;
  // Ascending.
  std::vector<double> means;
  std::vector<double> weights;
  // Per-cluster population variances.
  std::vector<double> variances;
  // Total within-cluster sum of squares.
  double within = 0.0;
};

// Optimal 1-D k-means on a sample by dynamic programming over sorted values.
KMeansFit kmeans_1d(std::span<const double> samples, std::size_t k);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::uint64_t> counts;
};

Histogram histogram(std::span<const double> samples, std::size_t bins = 200);

struct ExactnessOptions {
  // Set to use (1/n) log phi^s(Q A_w) instead of the operator norm.
  std::optional<double> s;
  unsigned workers = 0;
};

struct OrbitLimitReport {
  std::size_t n = 0;
  std::size_t trials = 0;
  std::optional<double> s;
  std::vector<double> samples;
  double sample_mean = 0.0;
  double sample_std_error = 0.0;
  std::size_t cluster_count = 0;
  std::vector<double> cluster_means;
  std::vector<double> cluster_weights;
  std::vector<double> cluster_variances;
  // Within-cluster sums of squares for k = 1, 2, 3.
  std::vector<double> within_ss;
  // Smallest gap between adjacent cluster means over the pooled
  // within-cluster standard deviation; for one cluster, the score of the
  // best two-way split. Infinite when the pooled deviation is zero.
  double separation_score = 0.0;
};

// Sequential elbow: k grows from 1 while W_{k+1} <= 0.25 W_k, up to 3.
std::size_t choose_cluster_count(std::span<const double> within_ss);

// Trial t uses the word sample_word(mu, n, seed, t).
OrbitLimitReport exactness_diagnostic(const IfsSystem& sys, const ProjectionMap& q,
                                      const Measure& mu, std::size_t n, std::size_t trials,
                                      std::uint64_t seed, const ExactnessOptions& options = {});

}  // namespace selfaffine
