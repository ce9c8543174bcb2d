#pragma once

// Example families: generalized permutation systems, tensor-product systems,
// a phase-locked permutation system with a Markov measure, and the direct
// sum construction for sumsets with its domination and pressure checks.

#include <cstdint>
#include <string_view>
#include <vector>

#include "selfaffine/ifs.hpp"
#include "selfaffine/measures.hpp"
#include "selfaffine/pressure.hpp"
#include "selfaffine/projection.hpp"
#include "selfaffine/rng.hpp"

namespace selfaffine {

// Linear parts are generalized permutation matrices with entries of random
// sign and magnitude uniform in [entry_low, entry_high]. Map 0 has the
// identity pattern and map 1 the cyclic shift; the rest are random
// permutations. Translations come from with_random_translations(seed).
IfsSystem gen_perm_example(std::size_t d, double entry_low, double entry_high,
                           std::size_t n_maps, std::uint64_t seed);

// Maps scale * (g_i (x) h_i) with g_i, h_i uniform random, resampled until
// the condition number is below 100 and rescaled to unit operator norm, so
// every map has norm exactly `scale`.
IfsSystem tensor_example(std::size_t d1, std::size_t d2, std::size_t n_maps, double scale,
                         std::uint64_t seed);

// Four planar maps diag(.45,.15), [[0,.3],[-.3,0]], diag(-.15,.45),
// [[0,.35],[.25,0]] driven by the Markov chain 0->0 (.8), 0->1 (.2), 1->2,
// 2->2 (.8), 2->3 (.2), 3->0. Under diag(1, 0) the top-row growth rate
// depends on the phase of the starting letter.
struct PhaseLockedExample {
  IfsSystem system;
  Measure measure;
};
PhaseLockedExample phase_locked_example(std::uint64_t seed = 1);

// Random invertible contracting maps: entries uniform, rescaled so each
// map's operator norm is uniform in [min_norm, max_norm].
IfsSystem random_contracting_system(std::size_t n_maps, std::size_t d, double min_norm,
                                    double max_norm, std::uint64_t seed);
Matrix random_orthogonal(std::size_t d, CounterRng& rng);

// Maps on R^{d1 d2} of the form left_i (x) right_i.
struct TensorFactors {
  std::size_t d1 = 0;
  std::size_t d2 = 0;
  std::vector<Matrix> left;
  std::vector<Matrix> right;
  std::uint64_t translation_seed = 0;

  IfsSystem system() const;
};

struct SumsetSystem {
  TensorFactors a;
  TensorFactors b;
  IfsSystem factor_a;
  IfsSystem factor_b;
  // Maps T_i (+) T'_j; letter i * |J| + j.
  IfsSystem product;
  ProjectionMap q_sum;
  double dim_a = 0.0;
  double dim_b = 0.0;
  double s_target = 0.0;
  unsigned dim_depth = 0;
};

// Both factors must have Euclidean contraction ratio below 1/2.
SumsetSystem sumset_system(TensorFactors a, TensorFactors b, unsigned dim_depth = 6,
                           const ExecOptions& options = {});

// Nine copies of diag(.6,.1) (x) .5 I and nine of .5 I (x) diag(.6,.1) on
// R^4 with seeded translations.
SumsetSystem sumset_demo(unsigned dim_depth = 6, const ExecOptions& options = {});

struct DominationReport {
  double lhs1 = 0.0;
  double lhs2 = 0.0;
  double rhs = 0.0;
  bool pass = false;
  unsigned depth = 0;
};

// lhs1 = min over |w| = n of (1/n) log(sigma_{k1-1} / sigma_{k1}) for the
// left factors of A, lhs2 likewise for the right factors of B; rhs is the
// depth-n pressure of the product at s = d1 d2 - 1 over s_target - (d1 d2 - 1).
DominationReport domination_check(const SumsetSystem& sumset, std::size_t k1, std::size_t k2,
                                  unsigned n, const ExecOptions& options = {});

struct PressureDrop {
  double p_q_at_s = 0.0;
  double margin = 0.0;
  unsigned depth = 0;
  PressureEstimate estimate;
};

// Difference-quotient estimate of P_Q(A (+) B, s_target) at depth n for the
// given projection (q_sum when omitted).
PressureDrop sumset_pressure_drop(const SumsetSystem& sumset, unsigned n,
                                  const ExecOptions& options = {});
PressureDrop sumset_pressure_drop(const SumsetSystem& sumset, const ProjectionMap& q,
                                  unsigned n, const ExecOptions& options = {});

// Named systems: "triangular" ([[1,1],[0,1]], [[1,1],[0,2]]),
// "triangular-stripped" (upper-right entries zeroed), "thirds-triangle"
// (three maps x/3 + u_i) and "phase-perm" (the phase-locked example).
IfsSystem preset_system(std::string_view name);
// The Markov measure for "phase-perm", uniform Bernoulli otherwise.
Measure preset_measure(std::string_view name);
const std::vector<std::string_view>& preset_names();

}  // namespace selfaffine
