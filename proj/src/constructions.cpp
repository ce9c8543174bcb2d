#include "selfaffine/constructions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "selfaffine/error.hpp"

namespace selfaffine {

namespace {

constexpr std::uint64_t kLinearStream = 0x11;

Matrix random_well_conditioned(std::size_t d, CounterRng& rng, double max_condition) {
  for (;;) {
    std::vector<double> e(d * d);
    for (double& x : e) x = rng.uniform(-1.0, 1.0);
    Matrix m(d, d, std::move(e));
    const auto sigma = singular_values(m);
    if (sigma.smallest() > 0.0 && sigma.largest() / sigma.smallest() < max_condition)
      return (1.0 / sigma.largest()) * m;
  }
}

std::vector<std::size_t> random_permutation(std::size_t d, CounterRng& rng) {
  std::vector<std::size_t> p(d);
  std::iota(p.begin(), p.end(), 0);
  for (std::size_t i = d; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

// Minimum over words of length n of (1/n) log(sigma_{k-1} / sigma_k).
double min_gap(const std::vector<Matrix>& maps, std::size_t k, unsigned n,
               const ExecOptions& options) {
  const std::size_t d = maps.front().rows();
  const std::size_t dd = d * d;
  require_within_budget(maps.size(), n, options.leaf_budget);
  std::vector<double> levels((n + 1) * dd), work(dd), sigma(d);
  const Matrix id = Matrix::identity(d);
  std::copy(id.entries().begin(), id.entries().end(), levels.begin());
  double best = std::numeric_limits<double>::infinity();
  auto visit = [&](auto&& self, unsigned depth) -> void {
    const double* m = levels.data() + depth * dd;
    if (depth == n) {
      kernel::singular_values(m, d, d, work.data(), sigma.data());
      best = std::min(best, std::log(sigma[k - 2] / sigma[k - 1]) / n);
      return;
    }
    for (const auto& a : maps) {
      double* next = levels.data() + (depth + 1) * dd;
      kernel::multiply(m, a.entries().data(), next, d, d, d);
      kernel::renormalize(next, dd);
      self(self, depth + 1);
    }
  };
  visit(visit, 0);
  return best;
}

void require_factor_contraction(const IfsSystem& sys, const char* name) {
  const double norm = contraction_report(sys).max_norm;
  require(norm < 0.5, ErrorCode::contraction,
          std::string("factor ") + name + " has contraction ratio " + std::to_string(norm) +
              ", needs < 1/2");
}

}  // namespace

IfsSystem gen_perm_example(std::size_t d, double entry_low, double entry_high,
                           std::size_t n_maps, std::uint64_t seed) {
  require(d >= 2, ErrorCode::domain, "generalized permutation example needs d >= 2");
  require(n_maps >= 2, ErrorCode::domain, "generalized permutation example needs >= 2 maps");
  require(0.0 < entry_low && entry_low <= entry_high && entry_high < 0.5, ErrorCode::domain,
          "entries need 0 < entry_low <= entry_high < 1/2");
  CounterRng rng(seed, kLinearStream);
  std::vector<Matrix> linear;
  for (std::size_t i = 0; i < n_maps; ++i) {
    std::vector<std::size_t> pattern(d);
    if (i == 0) {
      std::iota(pattern.begin(), pattern.end(), 0);
    } else if (i == 1) {
      for (std::size_t r = 0; r < d; ++r) pattern[r] = (r + 1) % d;
    } else {
      pattern = random_permutation(d, rng);
    }
    Matrix m(d, d);
    for (std::size_t r = 0; r < d; ++r) {
      const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
      m(r, pattern[r]) = sign * rng.uniform(entry_low, entry_high);
    }
    linear.push_back(std::move(m));
  }
  return with_random_translations(std::move(linear), seed);
}

IfsSystem tensor_example(std::size_t d1, std::size_t d2, std::size_t n_maps, double scale,
                         std::uint64_t seed) {
  require(d1 >= 1 && d2 >= 1 && n_maps >= 1, ErrorCode::domain,
          "tensor example needs positive sizes");
  require(scale > 0.0 && scale < 0.5, ErrorCode::domain, "tensor scale must lie in (0, 1/2)");
  CounterRng rng(seed, kLinearStream);
  std::vector<Matrix> linear;
  for (std::size_t i = 0; i < n_maps; ++i) {
    const Matrix g = random_well_conditioned(d1, rng, 100.0);
    const Matrix h = random_well_conditioned(d2, rng, 100.0);
    linear.push_back(scale * kronecker(g, h));
  }
  return with_random_translations(std::move(linear), seed);
}

PhaseLockedExample phase_locked_example(std::uint64_t seed) {
  std::vector<Matrix> linear{
      Matrix(2, 2, {0.45, 0.0, 0.0, 0.15}),
      Matrix(2, 2, {0.0, 0.3, -0.3, 0.0}),
      Matrix(2, 2, {-0.15, 0.0, 0.0, 0.45}),
      Matrix(2, 2, {0.0, 0.35, 0.25, 0.0}),
  };
  auto measure = Measure::markov({
      {0.8, 0.2, 0.0, 0.0},
      {0.0, 0.0, 1.0, 0.0},
      {0.0, 0.0, 0.8, 0.2},
      {1.0, 0.0, 0.0, 0.0},
  });
  return {with_random_translations(std::move(linear), seed), std::move(measure)};
}

Matrix random_orthogonal(std::size_t d, CounterRng& rng) {
  std::vector<double> e(d * d);
  for (double& x : e) x = rng.normal();
  Matrix m(d, d, std::move(e));
  std::vector<double> logs(d, 0.0);
  orthonormalize_columns(m, logs);
  return m;
}

IfsSystem random_contracting_system(std::size_t n_maps, std::size_t d, double min_norm,
                                    double max_norm, std::uint64_t seed) {
  require(n_maps >= 1 && d >= 1, ErrorCode::domain, "system needs maps and dimension");
  require(0.0 < min_norm && min_norm <= max_norm && max_norm < 1.0, ErrorCode::domain,
          "norms need 0 < min_norm <= max_norm < 1");
  CounterRng rng(seed, kLinearStream);
  std::vector<Matrix> linear;
  for (std::size_t i = 0; i < n_maps; ++i) {
    const Matrix m = random_well_conditioned(d, rng, 1e3);
    linear.push_back(rng.uniform(min_norm, max_norm) * m);
  }
  return with_random_translations(std::move(linear), seed);
}

IfsSystem TensorFactors::system() const {
  require(!left.empty() && left.size() == right.size(), ErrorCode::invalid_input,
          "tensor factors need matching non-empty left and right lists");
  std::vector<Matrix> linear;
  for (std::size_t i = 0; i < left.size(); ++i) {
    require(left[i].rows() == d1 && left[i].is_square() && right[i].rows() == d2 &&
                right[i].is_square(),
            ErrorCode::invalid_input, "tensor factor has the wrong size");
    linear.push_back(kronecker(left[i], right[i]));
  }
  return with_random_translations(std::move(linear), translation_seed);
}

SumsetSystem sumset_system(TensorFactors a, TensorFactors b, unsigned dim_depth,
                           const ExecOptions& options) {
  require(a.d1 == b.d1 && a.d2 == b.d2, ErrorCode::invalid_input,
          "sumset factors must share d1 and d2");
  IfsSystem fa = a.system();
  IfsSystem fb = b.system();
  require_factor_contraction(fa, "A");
  require_factor_contraction(fb, "B");

  std::vector<AffineMap> maps;
  for (const auto& ta : fa.maps())
    for (const auto& tb : fb.maps()) {
      std::vector<double> t = ta.translation;
      t.insert(t.end(), tb.translation.begin(), tb.translation.end());
      maps.push_back({direct_sum(ta.linear, tb.linear), std::move(t)});
    }
  const std::size_t d = a.d1 * a.d2;
  const auto id = ProjectionMap::identity(d);
  const double dim_a = dim_aff_q(fa, id, dim_depth, 1e-4, options).s_star;
  const double dim_b = dim_aff_q(fb, id, dim_depth, 1e-4, options).s_star;
  return SumsetSystem{std::move(a),
                      std::move(b),
                      std::move(fa),
                      std::move(fb),
                      IfsSystem(std::move(maps)),
                      ProjectionMap::sum_block(2 * d),
                      dim_a,
                      dim_b,
                      dim_a + dim_b,
                      dim_depth};
}

SumsetSystem sumset_demo(unsigned dim_depth, const ExecOptions& options) {
  const Matrix wide(2, 2, {0.6, 0.0, 0.0, 0.1});
  const Matrix half = Matrix::scalar(2, 0.5);
  TensorFactors a{2, 2, std::vector<Matrix>(9, wide), std::vector<Matrix>(9, half), 101};
  TensorFactors b{2, 2, std::vector<Matrix>(9, half), std::vector<Matrix>(9, wide), 202};
  return sumset_system(std::move(a), std::move(b), dim_depth, options);
}

DominationReport domination_check(const SumsetSystem& sumset, std::size_t k1, std::size_t k2,
                                  unsigned n, const ExecOptions& options) {
  const std::size_t d1 = sumset.a.d1, d2 = sumset.a.d2;
  require(k1 > 1 && k1 <= d1, ErrorCode::domain, "k1 must satisfy 1 < k1 <= d1");
  require(k2 > 1 && k2 <= d2, ErrorCode::domain, "k2 must satisfy 1 < k2 <= d2");
  require(n >= 2, ErrorCode::domain, "domination check needs depth >= 2");
  const double d = static_cast<double>(d1 * d2);
  const double excess = sumset.s_target - (d - 1.0);
  require(excess > 0.0 && sumset.s_target < d, ErrorCode::domain,
          "s_target must lie in (d1 d2 - 1, d1 d2)");

  DominationReport out;
  out.depth = n;
  out.lhs1 = min_gap(sumset.a.left, k1, n, options);
  out.lhs2 = min_gap(sumset.b.right, k2, n, options);
  const auto est = pressure(sumset.product, ProjectionMap::identity(2 * d1 * d2), d - 1.0, n,
                            n - 1, options);
  out.rhs = est.diff_quotient / excess;
  out.pass = out.lhs1 > out.rhs && out.lhs2 > out.rhs;
  return out;
}

PressureDrop sumset_pressure_drop(const SumsetSystem& sumset, unsigned n,
                                  const ExecOptions& options) {
  return sumset_pressure_drop(sumset, sumset.q_sum, n, options);
}

PressureDrop sumset_pressure_drop(const SumsetSystem& sumset, const ProjectionMap& q,
                                  unsigned n, const ExecOptions& options) {
  const double d = static_cast<double>(sumset.a.d1 * sumset.a.d2);
  require(sumset.s_target < d, ErrorCode::domain, "s_target must be below d1 d2");
  require(n >= 2, ErrorCode::domain, "pressure drop needs depth >= 2");
  PressureDrop out;
  out.depth = n;
  out.estimate = pressure(sumset.product, q, sumset.s_target, n, n - 1, options);
  out.p_q_at_s = out.estimate.diff_quotient;
  out.margin = -out.p_q_at_s;
  return out;
}

const std::vector<std::string_view>& preset_names() {
  static const std::vector<std::string_view> names{"triangular", "triangular-stripped",
                                                   "thirds-triangle", "phase-perm"};
  return names;
}

IfsSystem preset_system(std::string_view name) {
  if (name == "triangular")
    return IfsSystem::from_linear({Matrix(2, 2, {1, 1, 0, 1}), Matrix(2, 2, {1, 1, 0, 2})});
  if (name == "triangular-stripped")
    return IfsSystem::from_linear({Matrix(2, 2, {1, 0, 0, 1}), Matrix(2, 2, {1, 0, 0, 2})});
  if (name == "thirds-triangle")
    return IfsSystem::from_linear(std::vector<Matrix>(3, Matrix::scalar(2, 1.0 / 3.0)),
                                  {{0.0, 0.0}, {2.0 / 3.0, 0.0}, {0.0, 2.0 / 3.0}});
  if (name == "phase-perm") return phase_locked_example().system;
  fail(ErrorCode::invalid_input, "unknown system preset '" + std::string(name) + "'");
}

Measure preset_measure(std::string_view name) {
  if (name == "phase-perm") return phase_locked_example().measure;
  const std::size_t n = preset_system(name).size();
  return Measure::bernoulli(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

}  // namespace selfaffine
