#include "selfaffine/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "selfaffine/error.hpp"
#include "selfaffine/log_sum.hpp"
#include "selfaffine/parallel.hpp"

namespace selfaffine {

namespace {

constexpr double kLn2 = 0.693147180559945309417232121458176568;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxShards = 65536;
constexpr std::uint64_t kTableLimit = std::uint64_t{1} << 23;

// Running products Q A_{w_1} ... A_{w_k} along one path of the word tree.
// Level k holds a mantissa matrix and a base-2 exponent.
class PathStack {
 public:
  PathStack(const IfsSystem& sys, const Matrix& q, unsigned max_depth)
      : d_(sys.dimension()),
        dd_(d_ * d_),
        letters_(sys.size() * dd_),
        mats_((max_depth + 1) * dd_),
        exps_(max_depth + 1, 0) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      const auto e = sys.linear(i).entries();
      std::copy(e.begin(), e.end(), letters_.begin() + i * dd_);
    }
    const auto e = q.entries();
    std::copy(e.begin(), e.end(), mats_.begin());
    exps_[0] = kernel::renormalize(mats_.data(), dd_);
  }

  void push(unsigned k, Letter a) noexcept {
    double* next = mats_.data() + (k + 1) * dd_;
    kernel::multiply(level(k), letters_.data() + a * dd_, next, d_, d_, d_);
    exps_[k + 1] = exps_[k] + kernel::renormalize(next, dd_);
  }

  const double* level(unsigned k) const noexcept { return mats_.data() + k * dd_; }
  int exponent(unsigned k) const noexcept { return exps_[k]; }
  std::size_t dimension() const noexcept { return d_; }

 private:
  std::size_t d_;
  std::size_t dd_;
  std::vector<double> letters_;
  std::vector<double> mats_;
  std::vector<int> exps_;
};

// Log singular values of a path level, first `count` of them.
class LeafSpectrum {
 public:
  explicit LeafSpectrum(std::size_t d) : d_(d), work_(d * d), sigma_(d), logs_(d) {}

  std::span<const double> operator()(const PathStack& path, unsigned k,
                                     std::size_t count) noexcept {
    kernel::singular_values(path.level(k), d_, d_, work_.data(), sigma_.data());
    const double shift = path.exponent(k) * kLn2;
    for (std::size_t j = 0; j < count; ++j)
      logs_[j] = sigma_[j] > 0.0 ? std::log(sigma_[j]) + shift : kNegInf;
    return {logs_.data(), count};
  }

 private:
  std::size_t d_;
  std::vector<double> work_;
  std::vector<double> sigma_;
  std::vector<double> logs_;
};

// Calls visit(depth) for every node between depths from and to below the
// current node, in lexicographic order.
template <class Visit>
void walk(PathStack& path, std::size_t alphabet, unsigned depth, unsigned from, unsigned to,
          Visit& visit) {
  if (depth >= from) visit(depth);
  if (depth == to) return;
  for (Letter a = 0; a < alphabet; ++a) {
    path.push(depth, a);
    walk(path, alphabet, depth + 1, from, to, visit);
  }
}

std::size_t ipow(std::size_t base, unsigned exp) noexcept {
  std::size_t r = 1;
  for (unsigned i = 0; i < exp; ++i) r *= base;
  return r;
}

struct ShardPlan {
  unsigned prefix = 0;
  std::size_t count = 1;
};

ShardPlan plan_shards(std::size_t alphabet, unsigned deepest, unsigned requested) {
  unsigned p = std::min(requested, deepest);
  while (p > 1 && ipow(alphabet, p) > kMaxShards) --p;
  return {p, ipow(alphabet, p)};
}

// Descends from the root to the node of the given shard.
void enter_shard(PathStack& path, std::size_t alphabet, const ShardPlan& plan,
                 std::size_t shard) {
  std::size_t place = plan.count;
  for (unsigned k = 0; k < plan.prefix; ++k) {
    place /= alphabet;
    path.push(k, static_cast<Letter>((shard / place) % alphabet));
  }
}

void check_arguments(const IfsSystem& sys, const ProjectionMap& q, double s) {
  require(q.dimension() == sys.dimension(), ErrorCode::domain,
          "projection dimension " + std::to_string(q.dimension()) +
              " does not match system dimension " + std::to_string(sys.dimension()));
  require(q.rank() >= 1, ErrorCode::domain, "projection has rank 0");
  require(std::isfinite(s) && s >= 0.0 && s <= static_cast<double>(q.rank()),
          ErrorCode::domain,
          "s=" + std::to_string(s) + " outside [0, rank Q = " + std::to_string(q.rank()) + "]");
}

std::size_t needed_values(double s) noexcept {
  return static_cast<std::size_t>(std::ceil(s));
}

// Log partition sums for every depth in [n_min, n_max].
std::vector<double> log_sums_range(const IfsSystem& sys, const ProjectionMap& q, double s,
                                   unsigned n_min, unsigned n_max,
                                   const ExecOptions& options) {
  const std::size_t alphabet = sys.size();
  const std::size_t count = needed_values(s);
  const std::size_t depths = n_max - n_min + 1;
  const ShardPlan plan = plan_shards(alphabet, n_max, options.prefix_length);

  std::vector<LogSumAccumulator> totals(depths);
  auto evaluate = [&](PathStack& path, LeafSpectrum& leaf, unsigned k) {
    return count == 0 ? 0.0 : log_svf(leaf(path, k, count), s);
  };

  // Depths shallower than the shard prefix are few; walk them serially.
  if (n_min < plan.prefix) {
    PathStack path(sys, q.matrix(), plan.prefix);
    LeafSpectrum leaf(sys.dimension());
    auto visit = [&](unsigned k) { totals[k - n_min].add_log(evaluate(path, leaf, k)); };
    walk(path, alphabet, 0, n_min, plan.prefix - 1, visit);
  }

  const unsigned first = std::max(n_min, plan.prefix);
  const std::size_t span = n_max - first + 1;
  std::vector<LogSumAccumulator> shard_sums(plan.count * span);
  parallel_for(plan.count, options.workers, [&](std::size_t shard) {
    PathStack path(sys, q.matrix(), n_max);
    LeafSpectrum leaf(sys.dimension());
    enter_shard(path, alphabet, plan, shard);
    LogSumAccumulator* sums = shard_sums.data() + shard * span;
    auto visit = [&](unsigned k) { sums[k - first].add_log(evaluate(path, leaf, k)); };
    walk(path, alphabet, plan.prefix, first, n_max, visit);
  });
  for (std::size_t shard = 0; shard < plan.count; ++shard)
    for (std::size_t i = 0; i < span; ++i)
      totals[first - n_min + i].merge(shard_sums[shard * span + i]);

  std::vector<double> out(depths);
  for (std::size_t i = 0; i < depths; ++i) out[i] = totals[i].log();
  return out;
}

// log phi^s(Q^{-1}) from the spectrum of Q.
double log_svf_inverse(const ProjectionMap& q, double s) {
  const auto& sigma = q.spectrum().values;
  std::vector<double> logs(sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j)
    logs[j] = -std::log(sigma[sigma.size() - 1 - j]);
  return log_svf(logs, s);
}

}  // namespace

unsigned max_feasible_depth(std::size_t alphabet, std::uint64_t budget) noexcept {
  if (alphabet <= 1) return std::numeric_limits<unsigned>::max();
  unsigned n = 0;
  std::uint64_t leaves = 1;
  while (leaves <= budget / alphabet) {
    leaves *= alphabet;
    ++n;
  }
  return n;
}

void require_within_budget(std::size_t alphabet, unsigned n, std::uint64_t budget) {
  const unsigned limit = max_feasible_depth(alphabet, budget);
  if (n > limit)
    throw ResourceError("depth " + std::to_string(n) + " over " + std::to_string(alphabet) +
                            " letters exceeds the leaf budget " + std::to_string(budget) +
                            "; max feasible depth is " + std::to_string(limit),
                        limit);
}

double log_partition_sum(const IfsSystem& sys, const ProjectionMap& q, double s, unsigned n,
                         const ExecOptions& options) {
  check_arguments(sys, q, s);
  require(n >= 1, ErrorCode::domain, "depth must be at least 1");
  require_within_budget(sys.size(), n, options.leaf_budget);
  return log_sums_range(sys, q, s, n, n, options).front();
}

double partition_sum(const IfsSystem& sys, const ProjectionMap& q, double s, unsigned n,
                     const ExecOptions& options) {
  return std::exp(log_partition_sum(sys, q, s, n, options));
}

PressureEstimate pressure(const IfsSystem& sys, const ProjectionMap& q, double s,
                          unsigned n_max, unsigned n_min, const ExecOptions& options) {
  check_arguments(sys, q, s);
  require(n_min >= 1 && n_min < n_max, ErrorCode::domain,
          "depths need 1 <= n_min < n_max, got n_min=" + std::to_string(n_min) +
              " n_max=" + std::to_string(n_max));
  require_within_budget(sys.size(), n_max, options.leaf_budget);

  PressureEstimate est;
  est.s = s;
  est.log_sums = log_sums_range(sys, q, s, n_min, n_max, options);
  for (unsigned n = n_min; n <= n_max; ++n) {
    est.depths.push_back(n);
    est.per_n.push_back(est.log_sums[n - n_min] / n);
  }
  est.diff_quotient = est.log_sums.back() - est.log_sums[est.log_sums.size() - 2];
  if (q.full_rank()) {
    const double correction = log_svf_inverse(q, s);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < est.depths.size(); ++i)
      best = std::min(best, (est.log_sums[i] + correction) / est.depths[i]);
    est.rigorous_upper = best;
  }
  return est;
}

std::uint64_t DepthSpectra::table_size(std::size_t alphabet, unsigned n, std::size_t rank) {
  std::uint64_t leaves = 1;
  for (unsigned i = 0; i < n; ++i) {
    if (leaves > kTableLimit) return std::numeric_limits<std::uint64_t>::max();
    leaves *= alphabet;
  }
  return leaves * rank;
}

DepthSpectra::DepthSpectra(const IfsSystem& sys, const ProjectionMap& q, unsigned n,
                           const ExecOptions& options)
    : depth_(n), stride_(q.rank()) {
  check_arguments(sys, q, 0.0);
  require(n >= 1, ErrorCode::domain, "depth must be at least 1");
  require_within_budget(sys.size(), n, options.leaf_budget);
  const std::size_t alphabet = sys.size();
  const ShardPlan plan = plan_shards(alphabet, n, options.prefix_length);
  shards_.resize(plan.count);
  const std::size_t per_shard = ipow(alphabet, n - plan.prefix) * stride_;
  parallel_for(plan.count, options.workers, [&](std::size_t shard) {
    PathStack path(sys, q.matrix(), n);
    LeafSpectrum leaf(sys.dimension());
    enter_shard(path, alphabet, plan, shard);
    auto& out = shards_[shard];
    out.reserve(per_shard);
    auto visit = [&](unsigned k) {
      const auto logs = leaf(path, k, stride_);
      out.insert(out.end(), logs.begin(), logs.end());
    };
    walk(path, alphabet, plan.prefix, n, n, visit);
  });
}

double DepthSpectra::log_sum(double s) const {
  require(s >= 0.0 && s <= static_cast<double>(stride_), ErrorCode::domain,
          "s=" + std::to_string(s) + " outside [0, rank Q = " + std::to_string(stride_) + "]");
  LogSumAccumulator total;
  const bool trivial = needed_values(s) == 0;
  for (const auto& shard : shards_) {
    LogSumAccumulator acc;
    for (std::size_t i = 0; i < shard.size(); i += stride_)
      acc.add_log(trivial ? 0.0 : log_svf({shard.data() + i, stride_}, s));
    total.merge(acc);
  }
  return total.log();
}

unsigned strict_decrease_depth(const IfsSystem& sys, const ProjectionMap& q) {
  const double max_norm = contraction_report(sys).max_norm;
  require(max_norm < 1.0, ErrorCode::contraction, "system is not contracting");
  const double ratio = std::log(q.spectrum().largest()) / std::log(1.0 / max_norm);
  const double bound = std::ceil(ratio) + 1.0;
  return bound < 1.0 ? 1u : static_cast<unsigned>(bound);
}

namespace {

// Evaluates s -> (1/n) log sum_n(s), from a table when it fits.
class Approximant {
 public:
  Approximant(const IfsSystem& sys, const ProjectionMap& q, unsigned n,
              const ExecOptions& options)
      : sys_(sys), q_(q), n_(n), options_(options) {
    require_within_budget(sys.size(), n, options.leaf_budget);
    if (DepthSpectra::table_size(sys.size(), n, q.rank()) <= kTableLimit)
      table_.emplace_back(sys, q, n, options);
  }

  double operator()(double s) const {
    if (!table_.empty()) return table_.front().per_n(s);
    return log_sums_range(sys_, q_, s, n_, n_, options_).front() / n_;
  }

 private:
  const IfsSystem& sys_;
  const ProjectionMap& q_;
  unsigned n_;
  ExecOptions options_;
  std::vector<DepthSpectra> table_;
};

}  // namespace

DimensionEstimate dim_aff_q(const IfsSystem& sys, const ProjectionMap& q, unsigned n,
                            double tol, const ExecOptions& options) {
  check_arguments(sys, q, 0.0);
  require(tol > 0.0, ErrorCode::domain, "tolerance must be positive");
  require_contracting(sys);
  const unsigned threshold = strict_decrease_depth(sys, q);
  require(n >= threshold, ErrorCode::domain,
          "depth " + std::to_string(n) + " is below the strict-decrease threshold " +
              std::to_string(threshold));

  const Approximant f(sys, q, n, options);
  const double rank = static_cast<double>(q.rank());
  DimensionEstimate out;
  out.depth = n;
  out.rank = q.rank();

  const double f_top = f(rank);
  if (f_top >= 0.0) {
    out.s_star = out.lo = out.hi = rank;
    out.pressure_at_root = f_top;
    out.saturated = true;
    return out;
  }
  const double f_zero = f(0.0);
  if (f_zero <= 0.0) {
    out.pressure_at_root = f_zero;
    return out;
  }

  double lo = 0.0, hi = rank, f_lo = f_zero, f_hi = f_top;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid > 0.0) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  // The approximant is piecewise linear, so a secant step inside the final
  // bracket is usually exact.
  out.s_star = std::clamp(lo + f_lo * (hi - lo) / (f_lo - f_hi), lo, hi);
  out.lo = lo;
  out.hi = hi;
  out.pressure_at_root = f(out.s_star);
  return out;
}

std::vector<CurvePoint> pressure_curve(const IfsSystem& sys, const ProjectionMap& q,
                                       std::span<const double> s_grid, unsigned n,
                                       const ExecOptions& options) {
  check_arguments(sys, q, 0.0);
  require(n >= 1, ErrorCode::domain, "depth must be at least 1");
  for (double s : s_grid) check_arguments(sys, q, s);
  const Approximant f(sys, q, n, options);
  std::vector<CurvePoint> out;
  out.reserve(s_grid.size());
  for (double s : s_grid) out.push_back({s, f(s)});
  return out;
}

double lipschitz_bound(const IfsSystem& sys) {
  double kappa = 0.0;
  for (const auto& m : sys.maps()) {
    const auto spectrum = singular_values(m.linear);
    require(spectrum.smallest() > 0.0, ErrorCode::invalid_input, "singular linear part");
    kappa = std::max({kappa, std::abs(std::log(spectrum.largest())),
                      std::abs(std::log(spectrum.smallest()))});
  }
  return kappa;
}

SublevelMembership sublevel_membership(const IfsSystem& sys, double s, double t,
                                       const ProjectionMap& q, unsigned n,
                                       const ExecOptions& options) {
  const double value = log_partition_sum(sys, q, s, n, options) / n;
  return {value <= t, t - value, value};
}

}  // namespace selfaffine
