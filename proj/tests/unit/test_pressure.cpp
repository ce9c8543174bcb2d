#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "selfaffine/error.hpp"
#include "selfaffine/log_sum.hpp"
#include "selfaffine/pressure.hpp"
#include "selfaffine/rng.hpp"

using namespace selfaffine;

namespace {

IfsSystem scalar_system(std::size_t n, std::size_t d, double r) {
  return IfsSystem::from_linear(std::vector<Matrix>(n, Matrix::scalar(d, r)));
}

IfsSystem upper_pair(bool stripped) {
  const double off = stripped ? 0.0 : 1.0;
  return IfsSystem::from_linear(
      {Matrix(2, 2, {1.0, off, 0.0, 1.0}), Matrix(2, 2, {1.0, off, 0.0, 2.0})});
}

ProjectionMap first_axis() { return ProjectionMap(Matrix(2, 2, {1, 0, 0, 0})); }

IfsSystem random_system(CounterRng& rng, std::size_t n, std::size_t d) {
  std::vector<Matrix> linear;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(d * d);
    for (auto& x : e) x = rng.uniform(-0.3, 0.3);
    for (std::size_t k = 0; k < d; ++k) e[k * d + k] += 0.4;
    linear.emplace_back(d, d, std::move(e));
  }
  return IfsSystem::from_linear(std::move(linear));
}

}  // namespace

TEST_CASE("log sum accumulator") {
  LogSumAccumulator acc;
  CHECK(acc.log() == -INFINITY);
  acc.add_log(std::log(2.0));
  acc.add_log(std::log(3.0));
  CHECK(acc.log() == doctest::Approx(std::log(5.0)));

  LogSumAccumulator big;
  big.add_log(1000.0);
  big.add_log(1000.0);
  CHECK(big.log() == doctest::Approx(1000.0 + std::log(2.0)));
  LogSumAccumulator tiny;
  tiny.add_log(-2000.0);
  tiny.merge(big);
  CHECK(tiny.log() == doctest::Approx(1000.0 + std::log(2.0)));

  // Compensation keeps many small terms next to a large one.
  LogSumAccumulator mixed;
  mixed.add_log(0.0);
  for (int i = 0; i < 1000000; ++i) mixed.add_log(std::log(1e-16));
  CHECK(std::exp(mixed.log()) == doctest::Approx(1.0 + 1e-10).epsilon(1e-15));
}

TEST_CASE("budget and feasible depth") {
  CHECK(max_feasible_depth(2, 1024) == 10);
  CHECK(max_feasible_depth(2, 1023) == 9);
  CHECK(max_feasible_depth(10, 100'000'000) == 8);
  const auto sys = scalar_system(10, 2, 0.1);
  ExecOptions opts;
  opts.leaf_budget = 1000;
  try {
    log_partition_sum(sys, ProjectionMap::identity(2), 1.0, 4, opts);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(e.code() == ErrorCode::resource);
    CHECK(e.max_feasible_depth() == 3);
  }
}

TEST_CASE("identical scalar maps give N^n r^(kn)") {
  const auto sys = scalar_system(3, 3, 0.4);
  const auto id = ProjectionMap::identity(3);
  for (unsigned n = 1; n <= 6; ++n)
    for (int k = 0; k <= 3; ++k) {
      const double want = std::pow(3.0, n) * std::pow(0.4, k * n);
      CHECK(partition_sum(sys, id, k, n) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("stripped upper-triangular pair sums to 2^n") {
  const auto sys = upper_pair(true);
  for (unsigned n = 1; n <= 16; ++n)
    CHECK(log_partition_sum(sys, first_axis(), 1.0, n) ==
          doctest::Approx(n * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("eight-word sum by hand multiplication") {
  const double a[] = {0.5, 0.25}, b[] = {0.25, 0.5};
  const auto sys = IfsSystem::from_linear({Matrix::diagonal(a), Matrix::diagonal(b)});
  const oracle::Dense m0{{0.5, 0}, {0, 0.25}}, m1{{0.25, 0}, {0, 0.5}};
  double want = 0.0;
  for (int w = 0; w < 8; ++w) {
    oracle::Dense p{{1, 0}, {0, 1}};
    for (int bit = 2; bit >= 0; --bit) p = oracle::multiply(p, (w >> bit) & 1 ? m1 : m0);
    want += oracle::singular_values_2x2(p)[0];
  }
  CHECK(partition_sum(sys, ProjectionMap::identity(2), 1.0, 3) ==
        doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("random partition sums match brute force over words") {
  CounterRng rng(44);
  const auto sys = random_system(rng, 3, 2);
  const ProjectionMap q(Matrix(2, 2, {0.9, 0.3, -0.2, 1.1}));
  const unsigned n = 5;
  for (double s : {0.0, 0.5, 1.0, 1.7, 2.0}) {
    double want = 0.0;
    Word w(n);
    for (int code = 0; code < 243; ++code) {
      int c = code;
      for (unsigned k = n; k-- > 0; c /= 3) w[k] = static_cast<Letter>(c % 3);
      const Matrix m = q.matrix() * linear_word(sys, w);
      const auto sv = oracle::singular_values_2x2(
          {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
      const double whole = std::floor(s);
      double phi = 1.0;
      for (int j = 0; j < whole; ++j) phi *= sv[j];
      if (s > whole) phi *= std::pow(sv[static_cast<int>(whole)], s - whole);
      want += phi;
    }
    CHECK(partition_sum(sys, q, s, n) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("partition sums do not depend on workers or shard prefix") {
  CounterRng rng(45);
  const auto sys = random_system(rng, 3, 3);
  const auto id = ProjectionMap::identity(3);
  ExecOptions serial, threaded, shallow;
  serial.workers = 1;
  threaded.workers = 3;
  shallow.workers = 2;
  shallow.prefix_length = 1;
  const double a = log_partition_sum(sys, id, 1.3, 7, serial);
  CHECK(a == log_partition_sum(sys, id, 1.3, 7, threaded));
  CHECK(a == doctest::Approx(log_partition_sum(sys, id, 1.3, 7, shallow)).epsilon(1e-14));

  const auto p1 = pressure(sys, id, 2.5, 7, 2, serial);
  const auto p2 = pressure(sys, id, 2.5, 7, 2, threaded);
  CHECK(p1.log_sums == p2.log_sums);
}

TEST_CASE("pressure on the stripped and full upper-triangular pairs") {
  const auto stripped = pressure(upper_pair(true), first_axis(), 1.0, 12, 1);
  for (double v : stripped.per_n) CHECK(std::fabs(v - std::log(2.0)) <= 1e-12);
  CHECK(stripped.diff_quotient == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK_FALSE(stripped.rigorous_upper.has_value());

  const auto full = pressure(upper_pair(false), first_axis(), 1.0, 20, 1);
  CHECK(std::fabs(full.diff_quotient - std::log(3.0)) < 0.1);
  REQUIRE(full.depths.size() == 20);
  CHECK(full.depths.front() == 1);
  CHECK(full.depths.back() == 20);
  CHECK(full.per_n.back() > full.per_n.front());
}

TEST_CASE("pressure of scalar maps is exact") {
  const auto est = pressure(scalar_system(3, 2, 1.0 / 3.0), ProjectionMap::identity(2), 1.0, 6);
  for (double v : est.per_n) CHECK(std::fabs(v) <= 1e-14);
  REQUIRE(est.rigorous_upper.has_value());
  CHECK(std::fabs(*est.rigorous_upper) <= 1e-14);
}

TEST_CASE("pressure argument checks") {
  const auto sys = scalar_system(2, 2, 0.5);
  CHECK_THROWS_AS(pressure(sys, ProjectionMap::identity(2), 1.0, 3, 3), Error);
  CHECK_THROWS_AS(pressure(sys, first_axis(), 1.5, 4), Error);
  CHECK_THROWS_AS(log_partition_sum(sys, ProjectionMap(Matrix(2, 2)), 0.0, 2), Error);
  CHECK_THROWS_AS(log_partition_sum(sys, ProjectionMap::identity(3), 1.0, 2), Error);
  CHECK_THROWS_AS(log_partition_sum(sys, ProjectionMap::identity(2), 1.0, 0), Error);
}

TEST_CASE("rigorous upper bound dominates later depths for full-rank Q") {
  CounterRng rng(46);
  const auto sys = random_system(rng, 2, 2);
  const ProjectionMap q(Matrix(2, 2, {1.2, 0.1, 0.0, 0.7}));
  const auto est = pressure(sys, q, 1.4, 14, 10);
  const auto deep = pressure(sys, ProjectionMap::identity(2), 1.4, 16, 15);
  REQUIRE(est.rigorous_upper.has_value());
  CHECK(deep.per_n.back() <= *est.rigorous_upper + 1e-12);
}

TEST_CASE("subadditivity for full-rank Q") {
  CounterRng rng(47);
  const auto sys = random_system(rng, 3, 2);
  const auto est = pressure(sys, ProjectionMap::identity(2), 0.8, 10, 1);
  for (unsigned m = 1; m <= 5; ++m)
    for (unsigned n = 1; m + n <= 10; ++n) {
      const double lhs = est.log_sums[m + n - 1];
      CHECK(lhs <= est.log_sums[m - 1] + est.log_sums[n - 1] + 1e-10);
    }
}

TEST_CASE("dimension of scalar systems") {
  const auto thirds = scalar_system(3, 2, 1.0 / 3.0);
  for (unsigned n = 2; n <= 6; ++n) {
    const auto est = dim_aff_q(thirds, ProjectionMap::identity(2), n);
    CHECK(std::fabs(est.s_star - 1.0) <= 1e-6);
    CHECK_FALSE(est.saturated);
    CHECK(est.lo <= est.s_star);
    CHECK(est.s_star <= est.hi);
  }
  const auto halves = scalar_system(2, 2, 0.5);
  CHECK(dim_aff_q(halves, ProjectionMap::identity(2), 5).s_star == doctest::Approx(1.0));

  const auto four = scalar_system(4, 2, 1.0 / 3.0);
  const auto sat = dim_aff_q(four, first_axis(), 4);
  CHECK(sat.saturated);
  CHECK(sat.s_star == 1.0);
}

TEST_CASE("dimension needs contraction and a deep enough tree") {
  CHECK_THROWS_AS(dim_aff_q(upper_pair(false), first_axis(), 4), Error);
  const auto sys = scalar_system(3, 2, 0.9);
  const ProjectionMap big(Matrix::scalar(2, 10.0));
  const unsigned threshold = strict_decrease_depth(sys, big);
  CHECK(threshold == static_cast<unsigned>(std::ceil(std::log(10.0) / std::log(1 / 0.9))) + 1);
  CHECK_THROWS_AS(dim_aff_q(sys, big, threshold - 1), Error);
  CHECK(strict_decrease_depth(sys, ProjectionMap::identity(2)) == 1);
}

TEST_CASE("table and streaming evaluation agree") {
  CounterRng rng(48);
  const auto sys = random_system(rng, 3, 3);
  const auto id = ProjectionMap::identity(3);
  const DepthSpectra table(sys, id, 6);
  for (double s : {0.0, 0.3, 1.0, 2.2, 3.0})
    CHECK(table.log_sum(s) == log_partition_sum(sys, id, s, 6));
}

TEST_CASE("pressure curve") {
  CounterRng rng(49);
  const auto sys = random_system(rng, 3, 2);
  const double grid[] = {0.0, 0.5, 1.0, 1.5, 2.0};
  const auto curve = pressure_curve(sys, ProjectionMap::identity(2), grid, 6);
  REQUIRE(curve.size() == 5);
  CHECK(curve[0].value == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  for (std::size_t i = 0; i < 5; ++i) CHECK(curve[i].s == grid[i]);

  // Diagonal maps with a_i >= b_i: for s in [1, 2] the sum is
  // (sum_i a_i b_i^(s-1))^n in closed form.
  const double a[] = {0.5, 0.2}, b[] = {0.4, 0.3};
  const auto diag = IfsSystem::from_linear({Matrix::diagonal(a), Matrix::diagonal(b)});
  const double fine[] = {0.5, 1.0, 1.25, 1.5, 2.0};
  const unsigned n = 5;
  const auto c = pressure_curve(diag, ProjectionMap::identity(2), fine, n);
  CHECK(c[0].value == doctest::Approx(std::log(std::pow(0.5, 0.5) + std::pow(0.4, 0.5))));
  for (std::size_t i = 1; i < 5; ++i) {
    const double s = fine[i];
    const double base = 0.5 * std::pow(0.2, s - 1) + 0.4 * std::pow(0.3, s - 1);
    CHECK(c[i].value == doctest::Approx(std::log(base)).epsilon(1e-12));
  }
}

TEST_CASE("lipschitz bound") {
  CHECK(lipschitz_bound(scalar_system(3, 2, 1.0 / 3.0)) == doctest::Approx(std::log(3.0)));
  const double d[] = {0.5, 0.25};
  CHECK(lipschitz_bound(IfsSystem::from_linear({Matrix::diagonal(d)})) ==
        doctest::Approx(std::log(4.0)));

  CounterRng rng(50);
  const auto sys = random_system(rng, 3, 2);
  const double kappa = lipschitz_bound(sys);
  std::vector<double> grid;
  for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
  const auto curve = pressure_curve(sys, ProjectionMap::identity(2), grid, 6);
  for (std::size_t i = 0; i < curve.size(); ++i)
    for (std::size_t j = i + 1; j < curve.size(); ++j)
      CHECK(std::fabs(curve[i].value - curve[j].value) <=
            kappa * (curve[j].s - curve[i].s) + 1e-10);
}

TEST_CASE("sublevel membership") {
  CounterRng rng(51);
  const auto sys = random_system(rng, 3, 2);
  CHECK_THROWS_AS(sublevel_membership(sys, 1.0, 0.0, ProjectionMap(Matrix(2, 2)), 4), Error);
  const auto id = ProjectionMap::identity(2);
  const double p = pressure(sys, id, 1.0, 6, 5).per_n.back();
  const auto in = sublevel_membership(sys, 1.0, p + 0.1, id, 6);
  CHECK(in.member);
  CHECK(in.margin == doctest::Approx(0.1).epsilon(1e-9));

  // Right-multiplying Q by a letter shifts the approximant by at most 2 kappa / n.
  const double kappa = lipschitz_bound(sys);
  const ProjectionMap q(Matrix(2, 2, {1.0, 0.5, 0.2, 0.8}));
  const ProjectionMap qa(q.matrix() * sys.linear(1));
  const unsigned n = 8;
  const auto base = sublevel_membership(sys, 1.2, 0.0, q, n);
  const auto shifted = sublevel_membership(sys, 1.2, 0.0, qa, n);
  CHECK(std::fabs(base.value - shifted.value) <= 2.0 * kappa / n);
}

TEST_CASE("strict subsystem monotonicity and kernel monotonicity") {
  CounterRng rng(52);
  const auto sys = random_system(rng, 3, 2);
  const auto maps = sys.linear_parts();
  const auto id = ProjectionMap::identity(2);
  const IfsSystem sub = IfsSystem::from_linear({maps[0], maps[2]});
  for (double s : {0.0, 0.7, 1.0, 1.6, 2.0})
    CHECK(log_partition_sum(sub, id, s, 6) < log_partition_sum(sys, id, s, 6));

  const ProjectionMap q1(Matrix(2, 2, {1.0, 0.3, 0.0, 0.0}));
  const Matrix b(2, 2, {0.4, -1.2, 2.0, 0.3});
  const ProjectionMap q2(b * q1.matrix());
  const double s = 0.6;
  CHECK(log_partition_sum(sys, q2, s, 7) <=
        log_partition_sum(sys, q1, s, 7) + std::log(svf(b, s).value) + 1e-10);
}
