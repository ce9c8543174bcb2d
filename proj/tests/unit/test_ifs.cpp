#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "selfaffine/error.hpp"
#include "selfaffine/ifs.hpp"
#include "selfaffine/rng.hpp"

using namespace selfaffine;

namespace {

IfsSystem random_system(CounterRng& rng, std::size_t n, std::size_t d, double scale) {
  std::vector<AffineMap> maps;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> e(d * d);
    for (auto& x : e) x = rng.uniform(-scale, scale);
    for (std::size_t k = 0; k < d; ++k) e[k * d + k] += scale;
    std::vector<double> t(d);
    for (auto& x : t) x = rng.uniform(-1.0, 1.0);
    maps.push_back({Matrix(d, d, std::move(e)), std::move(t)});
  }
  return IfsSystem(std::move(maps));
}

IfsSystem scalar_system(std::size_t n, std::size_t d, double r) {
  std::vector<Matrix> linear(n, Matrix::scalar(d, r));
  return IfsSystem::from_linear(std::move(linear));
}

}  // namespace

TEST_CASE("system validation") {
  CHECK_THROWS_AS(IfsSystem(std::vector<AffineMap>{}), Error);
  CHECK_THROWS_AS(IfsSystem::from_linear({Matrix(2, 2, {1, 2, 2, 4})}), Error);
  CHECK_THROWS_AS(IfsSystem::from_linear({Matrix::identity(2), Matrix::identity(3)}), Error);
  CHECK_THROWS_AS(IfsSystem({{Matrix::identity(2), {1.0}}}), Error);
}

TEST_CASE("linear words") {
  const double diag[] = {0.5, 1.0 / 3.0};
  const auto sys = IfsSystem::from_linear({Matrix::diagonal(diag)});
  CHECK(linear_word(sys, Word{}) == Matrix::identity(2));
  const Word w{0, 0};
  const Matrix m = linear_word(sys, w);
  CHECK(m(0, 0) == doctest::Approx(0.25));
  CHECK(m(1, 1) == doctest::Approx(1.0 / 9.0));
  CHECK_THROWS_AS(linear_word(sys, Word{1}), Error);

  CounterRng rng(2);
  const auto r = random_system(rng, 3, 3, 0.3);
  for (int t = 0; t < 20; ++t) {
    Word u(1 + rng.below(6)), v(1 + rng.below(6));
    for (auto& a : u) a = static_cast<Letter>(rng.below(3));
    for (auto& a : v) a = static_cast<Letter>(rng.below(3));
    Word uv = u;
    uv.insert(uv.end(), v.begin(), v.end());
    const Matrix lhs = linear_word(r, uv);
    const Matrix rhs = linear_word(r, u) * linear_word(r, v);
    for (std::size_t i = 0; i < 9; ++i)
      CHECK(std::fabs(lhs.entries()[i] - rhs.entries()[i]) <= 1e-12);
  }
}

TEST_CASE("linear words against naive multiplication") {
  CounterRng rng(4);
  const auto sys = random_system(rng, 2, 2, 0.4);
  const Word w{0, 1, 1, 0, 1};
  oracle::Dense prod{{1, 0}, {0, 1}};
  for (Letter a : w) {
    const Matrix& m = sys.linear(a);
    prod = oracle::multiply(prod, {{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
  }
  const Matrix got = linear_word(sys, w);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(got(i, j) == doctest::Approx(prod[i][j]));
}

TEST_CASE("affine words compose pointwise") {
  CounterRng rng(9);
  const auto sys = random_system(rng, 3, 2, 0.3);
  const auto empty = affine_word(sys, Word{});
  CHECK(empty.linear == Matrix::identity(2));
  CHECK(empty.translation == std::vector<double>{0.0, 0.0});
  const auto single = affine_word(sys, Word{2});
  CHECK(single.linear == sys.linear(2));
  CHECK(single.translation == sys.map(2).translation);

  const Word u{0, 2, 1}, v{1, 1, 0, 2};
  Word uv = u;
  uv.insert(uv.end(), v.begin(), v.end());
  const auto tu = affine_word(sys, u), tv = affine_word(sys, v), tuv = affine_word(sys, uv);
  for (int t = 0; t < 100; ++t) {
    const std::vector<double> x{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const auto lhs = tuv(x);
    const auto rhs = tu(tv(x));
    CHECK(std::fabs(lhs[0] - rhs[0]) <= 1e-10);
    CHECK(std::fabs(lhs[1] - rhs[1]) <= 1e-10);
    const auto point = cylinder_point(sys, uv, x);
    CHECK(std::fabs(point[0] - lhs[0]) <= 1e-10);
    CHECK(std::fabs(point[1] - lhs[1]) <= 1e-10);
  }
}

TEST_CASE("contraction report") {
  const auto thirds = scalar_system(3, 2, 1.0 / 3.0);
  const auto r = contraction_report(thirds);
  CHECK(r.max_norm == doctest::Approx(1.0 / 3.0));
  CHECK(r.max_pair_sum == doctest::Approx(2.0 / 3.0));
  CHECK(r.falconer_ok);

  const auto ok = IfsSystem::from_linear({Matrix::scalar(2, 0.6), Matrix::scalar(2, 0.3)});
  CHECK(contraction_report(ok).max_pair_sum == doctest::Approx(0.9));
  CHECK(contraction_report(ok).falconer_ok);
  const auto bad = IfsSystem::from_linear({Matrix::scalar(2, 0.6), Matrix::scalar(2, 0.5)});
  CHECK(contraction_report(bad).max_pair_sum == doctest::Approx(1.1));
  CHECK_FALSE(contraction_report(bad).falconer_ok);

  CHECK(contraction_report(scalar_system(1, 2, 0.4)).falconer_ok);
  CHECK_FALSE(contraction_report(scalar_system(1, 2, 0.6)).falconer_ok);
  CHECK_THROWS_AS(require_contracting(scalar_system(2, 2, 1.5)), Error);
}

TEST_CASE("chaos game on a single map converges to its fixed point") {
  const IfsSystem sys({{Matrix::scalar(1, 0.5), {1.0}}});
  const double probs[] = {1.0};
  ChaosGameOptions opts;
  opts.burn_in = 200;
  const auto cloud = chaos_game(sys, probs, 1000, 7, opts);
  REQUIRE(cloud.size() == 1000);
  for (double x : cloud.points) CHECK(std::fabs(x - 2.0) <= 1e-6);
}

TEST_CASE("chaos game stays in the hull of a Sierpinski system") {
  const IfsSystem sys({{Matrix::scalar(2, 0.5), {0.0, 0.0}},
                       {Matrix::scalar(2, 0.5), {0.5, 0.0}},
                       {Matrix::scalar(2, 0.5), {0.0, 0.5}}});
  const double probs[] = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  const auto cloud = chaos_game(sys, probs, 20000, 1);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto p = cloud.point(i);
    CHECK(p[0] >= -1e-12);
    CHECK(p[1] >= -1e-12);
    CHECK(p[0] + p[1] <= 1.0 + 1e-12);
  }
}

TEST_CASE("chaos game is reproducible and independent of workers") {
  CounterRng rng(12);
  const auto sys = random_system(rng, 3, 2, 0.25);
  const double probs[] = {0.2, 0.3, 0.5};
  ChaosGameOptions one, four;
  one.workers = 1;
  four.workers = 4;
  const auto a = chaos_game(sys, probs, 10001, 99, one);
  const auto b = chaos_game(sys, probs, 10001, 99, four);
  const auto c = chaos_game(sys, probs, 10001, 100, one);
  CHECK(a.points == b.points);
  CHECK(a.points != c.points);
}

TEST_CASE("chaos game cloud is stationary under one more random step") {
  CounterRng rng(31);
  const auto sys = random_system(rng, 3, 2, 0.25);
  const double probs[] = {0.2, 0.3, 0.5};
  const auto cloud = chaos_game(sys, probs, 200000, 5);
  const Categorical pick(probs);
  CounterRng extra(77);
  for (std::size_t axis = 0; axis < 2; ++axis) {
    double m1 = 0, m2 = 0, n1 = 0, n2 = 0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const auto p = cloud.point(i);
      const auto q = sys.map(pick.sample(extra))(p);
      m1 += p[axis];
      m2 += p[axis] * p[axis];
      n1 += q[axis];
      n2 += q[axis] * q[axis];
    }
    const double n = static_cast<double>(cloud.size());
    m1 /= n, m2 /= n, n1 /= n, n2 /= n;
    // Chaos-game samples are correlated; be generous with the error scale.
    const double se = std::sqrt((m2 - m1 * m1) / n) * 10.0;
    CHECK(std::fabs(m1 - n1) <= 3 * se);
    CHECK(std::fabs(std::sqrt(m2) - std::sqrt(n2)) <= 3 * se + 1e-3);
  }
}

TEST_CASE("chaos game argument checks") {
  const auto sys = scalar_system(2, 2, 0.5);
  const double bad_sum[] = {0.5, 0.6};
  const double zero[] = {1.0, 0.0};
  const double good[] = {0.5, 0.5};
  CHECK_THROWS_AS(chaos_game(sys, bad_sum, 10, 1), Error);
  CHECK_THROWS_AS(chaos_game(sys, zero, 10, 1), Error);
  const auto expanding = scalar_system(2, 2, 1.2);
  try {
    chaos_game(expanding, good, 10, 1);
    FAIL("expected a contraction error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::contraction);
  }
  ChaosGameOptions forced;
  forced.force = true;
  forced.burn_in = 3;
  CHECK(chaos_game(expanding, good, 10, 1, forced).size() == 10);
}

TEST_CASE("random translations are seeded") {
  std::vector<Matrix> linear(3, Matrix::scalar(2, 1.0 / 3.0));
  const auto a = with_random_translations(linear, 4);
  const auto b = with_random_translations(linear, 4);
  const auto c = with_random_translations(linear, 5);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.map(i).translation == b.map(i).translation);
    for (double x : a.map(i).translation) CHECK(std::fabs(x) <= 1.0);
  }
  CHECK(a.map(0).translation != c.map(0).translation);
}
