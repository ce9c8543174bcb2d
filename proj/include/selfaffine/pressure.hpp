#pragma once

// Partition sums of the singular value function over all words of a fixed
// length, projected pressure estimates and their roots in s.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "selfaffine/ifs.hpp"
#include "selfaffine/projection.hpp"

namespace selfaffine {

struct ExecOptions {
  // Largest number of words of a single length that may be enumerated.
  std::uint64_t leaf_budget = 100'000'000;
  // Words are split into shards by their first prefix_length letters.
  unsigned prefix_length = 3;
  unsigned workers = 0;
};

// Largest n with N^n <= budget.
unsigned max_feasible_depth(std::size_t alphabet, std::uint64_t budget) noexcept;
// Throws ResourceError when N^n exceeds the budget.
void require_within_budget(std::size_t alphabet, unsigned n, std::uint64_t budget);

// log sum over |w| = n of phi^s(Q A_w), summed in lexicographic word order.
double log_partition_sum(const IfsSystem& sys, const ProjectionMap& q, double s,
                         unsigned n, const ExecOptions& options = {});
double partition_sum(const IfsSystem& sys, const ProjectionMap& q, double s,
                     unsigned n, const ExecOptions& options = {});

struct PressureEstimate {
  double s = 0.0;
  std::vector<unsigned> depths;
  std::vector<double> log_sums;
  std::vector<double> per_n;
  // log_sums[last] - log_sums[last - 1].
  double diff_quotient = 0.0;
  // min over n of (log_sums[n] + log phi^s(Q^-1)) / n; full-rank Q only.
  std::optional<double> rigorous_upper;
};

// Depths n_min..n_max (n_min >= 1, n_min < n_max), one tree walk.
PressureEstimate pressure(const IfsSystem& sys, const ProjectionMap& q, double s,
                          unsigned n_max, unsigned n_min = 1,
                          const ExecOptions& options = {});

// Log singular values of Q A_w for every word of length n, kept per shard
// so the partition sum can be re-evaluated for many s with the same
// summation order as log_partition_sum.
class DepthSpectra {
 public:
  DepthSpectra(const IfsSystem& sys, const ProjectionMap& q, unsigned n,
               const ExecOptions& options = {});

  unsigned depth() const noexcept { return depth_; }
  std::size_t rank() const noexcept { return stride_; }
  double log_sum(double s) const;
  double per_n(double s) const { return log_sum(s) / depth_; }

  // Rough memory need in doubles; used to pick between tables and streaming.
  static std::uint64_t table_size(std::size_t alphabet, unsigned n, std::size_t rank);

 private:
  unsigned depth_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::vector<double>> shards_;
};

// Smallest depth at which every phi^s(Q A_w) term is below one:
// ceil(log sigma_1(Q) / log(1 / max_norm)) + 1, at least 1.
unsigned strict_decrease_depth(const IfsSystem& sys, const ProjectionMap& q);

struct DimensionEstimate {
  double s_star = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double pressure_at_root = 0.0;
  // The approximant is still non-negative at s = rank Q.
  bool saturated = false;
  unsigned depth = 0;
  std::size_t rank = 0;
};

// Root of s -> (1/n) log sum_n(s) on [0, rank Q] by bisection to tol.
DimensionEstimate dim_aff_q(const IfsSystem& sys, const ProjectionMap& q, unsigned n,
                            double tol = 1e-4, const ExecOptions& options = {});

struct CurvePoint {
  double s = 0.0;
  double value = 0.0;
};

// Depth-n approximant (1/n) log sum_n(s) at each grid point, in grid order.
std::vector<CurvePoint> pressure_curve(const IfsSystem& sys, const ProjectionMap& q,
                                       std::span<const double> s_grid, unsigned n,
                                       const ExecOptions& options = {});

// max_i max(|log sigma_1(A_i)|, |log sigma_d(A_i)|).
double lipschitz_bound(const IfsSystem& sys);

struct SublevelMembership {
  bool member = false;
  // t minus the depth-n approximant.
  double margin = 0.0;
  double value = 0.0;
};

// Numeric proxy for membership of Q in {Q : P_Q(A, s) <= t}.
SublevelMembership sublevel_membership(const IfsSystem& sys, double s, double t,
                                       const ProjectionMap& q, unsigned n,
                                       const ExecOptions& options = {});

}  // namespace selfaffine
