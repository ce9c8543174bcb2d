#include "selfaffine/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "selfaffine/error.hpp"
#include "selfaffine/parallel.hpp"
#include "selfaffine/rng.hpp"

namespace selfaffine {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kReorthoPeriod = 20;
constexpr std::size_t kMaxCompoundSize = 128;

bool strongly_connected(const std::vector<std::vector<double>>& p) {
  const std::size_t n = p.size();
  for (int dir = 0; dir < 2; ++dir) {
    std::vector<char> seen(n, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        const double edge = dir == 0 ? p[i][j] : p[j][i];
        if (edge > 0.0 && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) return false;
  }
  return true;
}

// Solves pi P = pi, sum pi = 1 by Gaussian elimination.
std::vector<double> stationary_law(const std::vector<std::vector<double>>& p) {
  const std::size_t n = p.size();
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a[i][j] = p[j][i] - (i == j ? 1.0 : 0.0);
  }
  for (std::size_t j = 0; j < n; ++j) a[n - 1][j] = 1.0;
  a[n - 1][n] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    require(std::abs(a[piv][c]) > 1e-14, ErrorCode::domain, "singular stationary system");
    std::swap(a[piv], a[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = std::max(0.0, a[i][n] / a[i][i]);
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& x : pi) x /= total;
  return pi;
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double std_error_of(std::span<const double> x, double mean) {
  if (x.size() < 2) return 0.0;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

// Running products of exterior powers Q^k A_{w_1}^k ... for k = 1..k_max.
class ExteriorProducts {
 public:
  ExteriorProducts(const IfsSystem& sys, const Matrix& q, std::size_t k_max) {
    require(q.rows() == sys.dimension() && q.is_square(), ErrorCode::domain,
            "projection dimension does not match the system");
    for (std::size_t k = 1; k <= k_max; ++k) {
      const std::size_t c = binomial(sys.dimension(), k);
      if (c > kMaxCompoundSize)
        throw ResourceError("exterior power of size " + std::to_string(c) + " exceeds " +
                                std::to_string(kMaxCompoundSize),
                            0);
      Level level;
      level.size = c;
      level.start = compound(q, k);
      for (const auto& m : sys.maps()) level.letters.push_back(compound(m.linear, k));
      levels_.push_back(std::move(level));
    }
  }

  std::vector<double> log_norms(std::span<const Letter> word) const {
    std::vector<double> out(levels_.size() + 1, 0.0);
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      const Level& level = levels_[k];
      const std::size_t c = level.size;
      std::vector<double> cur(level.start.entries().begin(), level.start.entries().end());
      std::vector<double> next(c * c);
      long exponent = kernel::renormalize(cur.data(), cur.size());
      for (Letter a : word) {
        kernel::multiply(cur.data(), level.letters[a].entries().data(), next.data(), c, c, c);
        cur.swap(next);
        exponent += kernel::renormalize(cur.data(), cur.size());
      }
      std::vector<double> work(c * c), sigma(c);
      kernel::singular_values(cur.data(), c, c, work.data(), sigma.data());
      out[k + 1] = sigma[0] > 0.0 ? std::log(sigma[0]) + static_cast<double>(exponent) * kLn2
                                  : kNegInf;
    }
    return out;
  }

 private:
  struct Level {
    std::size_t size = 0;
    Matrix start;
    std::vector<Matrix> letters;
  };
  std::vector<Level> levels_;
};

void check_word(const IfsSystem& sys, std::span<const Letter> word) {
  for (Letter a : word)
    require(a < sys.size(), ErrorCode::index,
            "letter " + std::to_string(a) + " outside alphabet of size " + std::to_string(sys.size()));
}

void check_measure(const IfsSystem& sys, const Measure& mu) {
  require(mu.size() == sys.size(), ErrorCode::domain,
          "measure has " + std::to_string(mu.size()) + " letters, system has " +
              std::to_string(sys.size()));
}

}  // namespace

Measure Measure::bernoulli(std::vector<double> probs) {
  require(!probs.empty(), ErrorCode::domain, "empty probability vector");
  validate_probabilities(probs, probs.size());
  Measure mu;
  mu.stationary_ = std::move(probs);
  return mu;
}

Measure Measure::markov(std::vector<std::vector<double>> transition) {
  const std::size_t n = transition.size();
  require(n >= 1, ErrorCode::domain, "empty transition matrix");
  for (const auto& row : transition) {
    require(row.size() == n, ErrorCode::domain, "transition matrix must be square");
    double total = 0.0;
    for (double p : row) {
      require(std::isfinite(p) && p >= 0.0, ErrorCode::domain,
              "transition probabilities must be non-negative");
      total += p;
    }
    require(std::abs(total - 1.0) <= 1e-12, ErrorCode::domain,
            "transition rows must sum to 1");
  }
  require(strongly_connected(transition), ErrorCode::domain,
          "transition matrix must be irreducible");
  Measure mu;
  mu.stationary_ = stationary_law(transition);
  mu.transition_ = std::move(transition);
  return mu;
}

double Measure::log_cylinder(std::span<const Letter> word) const {
  double total = 0.0;
  for (std::size_t k = 0; k < word.size(); ++k) {
    require(word[k] < size(), ErrorCode::index, "letter outside the measure's alphabet");
    const double p = (k == 0 || is_bernoulli()) ? stationary_[word[k]]
                                                : transition_[word[k - 1]][word[k]];
    if (p <= 0.0) return kNegInf;
    total += std::log(p);
  }
  return total;
}

Word Measure::sample(std::size_t n, std::uint64_t seed, std::uint64_t stream) const {
  CounterRng rng(seed, stream);
  Word w(n);
  if (n == 0) return w;
  const Categorical first(stationary_);
  w[0] = static_cast<Letter>(first.sample(rng));
  if (is_bernoulli()) {
    for (std::size_t k = 1; k < n; ++k) w[k] = static_cast<Letter>(first.sample(rng));
    return w;
  }
  std::vector<Categorical> rows;
  rows.reserve(size());
  for (const auto& row : transition_) rows.emplace_back(row);
  for (std::size_t k = 1; k < n; ++k) w[k] = static_cast<Letter>(rows[w[k - 1]].sample(rng));
  return w;
}

Word sample_word(const Measure& mu, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  return mu.sample(n, seed, stream);
}

LyapunovEstimate lyapunov_exponents(const IfsSystem& sys, const Measure& mu, std::size_t n,
                                    std::size_t trials, std::uint64_t seed, unsigned workers) {
  check_measure(sys, mu);
  require(n >= 100, ErrorCode::domain, "Lyapunov estimates need n >= 100");
  require(trials >= 1, ErrorCode::domain, "need at least one trial");
  const std::size_t d = sys.dimension();
  std::vector<Matrix> transposed;
  for (const auto& m : sys.maps()) transposed.push_back(m.linear.transposed());

  std::vector<double> raw(trials * d);
  parallel_for(trials, workers, [&](std::size_t t) {
    const Word w = mu.sample(n, seed, t);
    // The transpose of A_{w_1} ... A_{w_n} is built by left multiplication.
    Matrix y = Matrix::identity(d);
    std::span<double> logs(raw.data() + t * d, d);
    for (std::size_t k = 0; k < n; ++k) {
      y = transposed[w[k]] * y;
      if ((k + 1) % kReorthoPeriod == 0 || k + 1 == n) orthonormalize_columns(y, logs);
    }
    for (double& v : logs) v /= static_cast<double>(n);
  });

  std::vector<double> means(d), errors(d);
  std::vector<double> column(trials);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t t = 0; t < trials; ++t) column[t] = raw[t * d + j];
    means[j] = mean_of(column);
    errors[j] = std_error_of(column, means[j]);
  }
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
  LyapunovEstimate out;
  out.n = n;
  out.trials = trials;
  for (std::size_t j : order) {
    out.exponents.push_back(means[j]);
    out.std_errors.push_back(errors[j]);
  }
  return out;
}

std::vector<double> log_exterior_norms(const IfsSystem& sys, const Matrix& q,
                                       std::span<const Letter> word, std::size_t k_max) {
  require(k_max <= sys.dimension(), ErrorCode::domain, "exterior power above dimension");
  check_word(sys, word);
  return ExteriorProducts(sys, q, k_max).log_norms(word);
}

LocalDimension local_lyap_dim_q(const IfsSystem& sys, const ProjectionMap& q,
                                const Measure& mu, std::span<const Letter> word) {
  check_measure(sys, mu);
  require(q.dimension() == sys.dimension(), ErrorCode::domain,
          "projection dimension does not match the system");
  require(q.rank() >= 1, ErrorCode::domain, "projection has rank 0");
  require(!word.empty(), ErrorCode::domain, "word must be non-empty");
  require_contracting(sys);
  check_word(sys, word);
  const double log_mu = mu.log_cylinder(word);
  require(std::isfinite(log_mu), ErrorCode::domain, "word has measure zero");

  const std::size_t r = q.rank();
  const auto logs = ExteriorProducts(sys, q.matrix(), r).log_norms(word);
  const double n = static_cast<double>(word.size());
  // g(k) at integers; linear in between.
  auto g = [&](std::size_t k) { return (logs[k] - log_mu) / n; };

  LocalDimension out;
  out.n = word.size();
  out.rank = r;
  if (g(r) >= 0.0) {
    out.s_star = static_cast<double>(r);
    out.saturated = true;
    return out;
  }
  std::size_t k = 0;
  while (g(k + 1) >= 0.0) ++k;
  const double lo = g(k), hi = g(k + 1);
  out.s_star = static_cast<double>(k) + std::clamp(lo / (lo - hi), 0.0, 1.0);
  return out;
}

KMeansFit kmeans_1d(std::span<const double> samples, std::size_t k) {
  const std::size_t n = samples.size();
  require(k >= 1 && k <= n, ErrorCode::domain, "k-means needs 1 <= k <= sample count");
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double centre = mean_of(x);
  std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = x[i] - centre;
    s1[i + 1] = s1[i] + v;
    s2[i + 1] = s2[i] + v * v;
  }
  // Sum of squares of x[i, j).
  auto cost = [&](std::size_t i, std::size_t j) {
    const double m = static_cast<double>(j - i);
    const double a = s1[j] - s1[i];
    return std::max(0.0, (s2[j] - s2[i]) - a * a / m);
  };

  const double inf = std::numeric_limits<double>::infinity();
  // best[c][j]: optimal cost of x[0, j) in c + 1 clusters; split[c][j] the
  // start of the last cluster.
  std::vector<std::vector<double>> best(k, std::vector<double>(n + 1, inf));
  std::vector<std::vector<std::size_t>> split(k, std::vector<std::size_t>(n + 1, 0));
  for (std::size_t j = 1; j <= n; ++j) best[0][j] = cost(0, j);

  // Optimal split points are monotone in j; divide and conquer.
  auto solve = [&](auto&& self, std::size_t c, std::size_t lo, std::size_t hi,
                   std::size_t opt_lo, std::size_t opt_hi) -> void {
    if (lo > hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    double val = inf;
    std::size_t arg = opt_lo;
    for (std::size_t i = std::max(opt_lo, c); i <= std::min(opt_hi, mid - 1); ++i) {
      const double v = best[c - 1][i] + cost(i, mid);
      if (v < val) {
        val = v;
        arg = i;
      }
    }
    best[c][mid] = val;
    split[c][mid] = arg;
    if (mid > lo) self(self, c, lo, mid - 1, opt_lo, arg);
    self(self, c, mid + 1, hi, arg, opt_hi);
  };
  for (std::size_t c = 1; c < k; ++c) solve(solve, c, c + 1, n, c, n - 1);

  std::vector<std::size_t> bounds(k + 1, 0);
  bounds[k] = n;
  for (std::size_t c = k; c-- > 1;) bounds[c] = split[c][bounds[c + 1]];

  KMeansFit fit;
  fit.k = k;
  fit.within = best[k - 1][n];
  for (std::size_t c = 0; c < k; ++c) {
    const std::size_t i = bounds[c], j = bounds[c + 1];
    const double m = static_cast<double>(j - i);
    fit.means.push_back(centre + (s1[j] - s1[i]) / m);
    fit.weights.push_back(m / static_cast<double>(n));
    fit.variances.push_back(cost(i, j) / m);
  }
  return fit;
}

Histogram histogram(std::span<const double> samples, std::size_t bins) {
  require(bins >= 1, ErrorCode::domain, "histogram needs at least one bin");
  Histogram h;
  h.counts.assign(bins, 0);
  if (samples.empty()) return h;
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  h.lo = *lo;
  h.hi = *hi;
  const double width = (h.hi - h.lo) / static_cast<double>(bins);
  for (double v : samples) {
    std::size_t b = width > 0.0 ? static_cast<std::size_t>((v - h.lo) / width) : 0;
    ++h.counts[std::min(b, bins - 1)];
  }
  return h;
}

std::size_t choose_cluster_count(std::span<const double> within_ss) {
  std::size_t k = 1;
  while (k < within_ss.size() && k < 3 && within_ss[k] <= 0.25 * within_ss[k - 1] &&
         within_ss[k - 1] > 0.0)
    ++k;
  return k;
}

namespace {

double separation(const KMeansFit& fit, std::size_t n) {
  if (fit.k < 2) return 0.0;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t c = 1; c < fit.k; ++c) gap = std::min(gap, fit.means[c] - fit.means[c - 1]);
  const double pooled = std::sqrt(fit.within / static_cast<double>(n - fit.k));
  if (pooled > 0.0) return gap / pooled;
  return gap > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
}

}  // namespace

OrbitLimitReport exactness_diagnostic(const IfsSystem& sys, const ProjectionMap& q,
                                      const Measure& mu, std::size_t n, std::size_t trials,
                                      std::uint64_t seed, const ExactnessOptions& options) {
  check_measure(sys, mu);
  require(q.dimension() == sys.dimension(), ErrorCode::domain,
          "projection dimension does not match the system");
  require(q.rank() >= 1, ErrorCode::domain, "projection has rank 0");
  require(trials >= 100, ErrorCode::domain, "exactness diagnostic needs trials >= 100");
  require(n >= 1, ErrorCode::domain, "depth must be at least 1");
  std::size_t k_max = 1;
  if (options.s) {
    const double s = *options.s;
    require(std::isfinite(s) && s >= 0.0 && s <= static_cast<double>(q.rank()),
            ErrorCode::domain, "s outside [0, rank Q]");
    k_max = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(s)));
  }
  const ExteriorProducts products(sys, q.matrix(), k_max);

  OrbitLimitReport report;
  report.n = n;
  report.trials = trials;
  report.s = options.s;
  report.samples.resize(trials);
  parallel_for(trials, options.workers, [&](std::size_t t) {
    const Word w = mu.sample(n, seed, t);
    const auto logs = products.log_norms(w);
    double value = logs[1];
    if (options.s) {
      const double s = *options.s;
      const auto whole = static_cast<std::size_t>(std::floor(s));
      const double frac = s - static_cast<double>(whole);
      value = (1.0 - frac) * logs[whole] + (frac > 0.0 ? frac * logs[whole + 1] : 0.0);
    }
    report.samples[t] = value / static_cast<double>(n);
  });

  report.sample_mean = mean_of(report.samples);
  report.sample_std_error = std_error_of(report.samples, report.sample_mean);
  std::vector<KMeansFit> fits;
  for (std::size_t k = 1; k <= 3; ++k) {
    fits.push_back(kmeans_1d(report.samples, k));
    report.within_ss.push_back(fits.back().within);
  }
  report.cluster_count = choose_cluster_count(report.within_ss);
  const KMeansFit& chosen = fits[report.cluster_count - 1];
  report.cluster_means = chosen.means;
  report.cluster_weights = chosen.weights;
  report.cluster_variances = chosen.variances;
  report.separation_score =
      separation(report.cluster_count == 1 ? fits[1] : chosen, trials);
  return report;
}

}  // namespace selfaffine
