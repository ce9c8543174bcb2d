#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "selfaffine/constructions.hpp"
#include "selfaffine/error.hpp"

using namespace selfaffine;

namespace {

std::size_t nonzeros(const Matrix& m) {
  return static_cast<std::size_t>(
      std::count_if(m.entries().begin(), m.entries().end(), [](double x) { return x != 0.0; }));
}

// Exact P_Q at depth n for diagonal product maps whose linear parts are
// all equal: sigma_j of Q (A + B)^n come from sqrt(a_j^2n + b_j^2n).
double sumset_log_phi(double s, unsigned n) {
  const double a[] = {0.3, 0.3, 0.05, 0.05}, b[] = {0.3, 0.05, 0.3, 0.05};
  std::vector<double> sigma;
  for (int j = 0; j < 4; ++j)
    sigma.push_back(std::sqrt(std::pow(a[j], 2.0 * n) + std::pow(b[j], 2.0 * n)));
  std::sort(sigma.rbegin(), sigma.rend());
  const double whole = std::floor(s);
  double out = 0.0;
  for (int j = 0; j < whole; ++j) out += std::log(sigma[j]);
  if (s > whole) out += (s - whole) * std::log(sigma[static_cast<int>(whole)]);
  return out;
}

}  // namespace

TEST_CASE("generalized permutation example") {
  const auto sys = gen_perm_example(2, 0.2, 0.45, 2, 7);
  REQUIRE(sys.size() == 2);
  CHECK(sys.linear(0)(0, 1) == 0.0);
  CHECK(sys.linear(0)(1, 0) == 0.0);
  CHECK(sys.linear(1)(0, 0) == 0.0);
  CHECK(sys.linear(1)(1, 1) == 0.0);
  CHECK(contraction_report(sys).falconer_ok);

  const auto big = gen_perm_example(4, 0.1, 0.3, 6, 3);
  for (const auto& m : big.linear_parts()) {
    CHECK(nonzeros(m) == 4);
    for (double x : m.entries())
      if (x != 0.0) CHECK((std::fabs(x) >= 0.1 && std::fabs(x) <= 0.3));
  }
  CHECK(big.linear(3) == gen_perm_example(4, 0.1, 0.3, 6, 3).linear(3));
  CHECK_THROWS_AS(gen_perm_example(2, 0.3, 0.6, 2, 1), Error);
  CHECK_THROWS_AS(gen_perm_example(2, 0.3, 0.2, 2, 1), Error);
  CHECK_THROWS_AS(gen_perm_example(2, 0.1, 0.2, 1, 1), Error);
}

TEST_CASE("generalized permutations under Bernoulli measures have one growth rate") {
  // The row walk of e_1^T A_w is driven by i.i.d. permutations, so every
  // path sees the same ergodic average of log |entry|.
  const auto sys = gen_perm_example(2, 0.2, 0.45, 2, 7);
  const auto mu = Measure::bernoulli({0.5, 0.5});
  double rate = 0.0;
  for (std::size_t i = 0; i < 2; ++i)
    for (double x : sys.linear(i).entries())
      if (x != 0.0) rate += 0.25 * std::log(std::fabs(x));
  const ProjectionMap q(Matrix(2, 2, {1, 0, 0, 0}));
  const auto rep = exactness_diagnostic(sys, q, mu, 2000, 200, 4);
  CHECK(rep.cluster_count == 1);
  CHECK(std::fabs(rep.cluster_means[0] - rate) <= 0.02);
}

TEST_CASE("tensor example") {
  const auto sys = tensor_example(2, 3, 4, 0.4, 5);
  CHECK(sys.dimension() == 6);
  CHECK(contraction_report(sys).max_norm == doctest::Approx(0.4).epsilon(1e-12));
  CHECK_THROWS_AS(tensor_example(2, 2, 2, 0.5, 1), Error);

  const Matrix g(2, 2, {0.9, 0.2, -0.4, 0.7});
  const Matrix h(3, 3, {0.5, 0.1, 0, 0.2, 0.8, 0.3, 0, -0.1, 0.6});
  const Matrix k = kronecker(g, h);
  CHECK(kronecker(Matrix::identity(2), Matrix::identity(2)) == Matrix::identity(4));
  const double u[] = {0.3, -1.2};
  const double v[] = {0.5, 2.0, -0.7};
  std::vector<double> uv;
  for (double a : u)
    for (double b : v) uv.push_back(a * b);
  const auto lhs = matvec(k, uv);
  const auto gu = matvec(g, u), hv = matvec(h, v);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(lhs[i * 3 + j] == doctest::Approx(gu[i] * hv[j]));

  const auto sg = singular_values(g).values, sh = singular_values(h).values;
  std::vector<double> products;
  for (double a : sg)
    for (double b : sh) products.push_back(a * b);
  std::sort(products.rbegin(), products.rend());
  const auto sk = singular_values(k).values;
  for (std::size_t i = 0; i < 6; ++i) CHECK(sk[i] == doctest::Approx(products[i]).epsilon(1e-9));
}

TEST_CASE("random generators are seeded") {
  const auto a = random_contracting_system(3, 2, 0.3, 0.6, 9);
  const auto b = random_contracting_system(3, 2, 0.3, 0.6, 9);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(a.linear(i) == b.linear(i));
    const double norm = operator_norm(a.linear(i));
    CHECK(norm >= 0.3 - 1e-12);
    CHECK(norm <= 0.6 + 1e-12);
  }
  CounterRng rng(3);
  const Matrix o = random_orthogonal(4, rng);
  const Matrix g = o.transposed() * o;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) CHECK(g(i, j) == doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("sumset demo") {
  const auto demo = sumset_demo();
  CHECK(demo.product.size() == 81);
  CHECK(demo.product.dimension() == 8);
  const double dim = std::log(9.0) / std::log(1.0 / 0.3);
  CHECK(demo.dim_a == doctest::Approx(dim).epsilon(1e-6));
  CHECK(demo.dim_b == doctest::Approx(dim).epsilon(1e-6));
  CHECK(demo.s_target == doctest::Approx(demo.dim_a + demo.dim_b));

  const Matrix& q = demo.q_sum.matrix();
  CHECK(q == ProjectionMap::sum_block(8).matrix());
  const std::vector<double> uv{1, 2, 3, 4, 10, 20, 30, 40};
  CHECK(matvec(q, uv) == std::vector<double>{11, 22, 33, 44, 0, 0, 0, 0});

  // Block maps carry the union of the factor spectra.
  auto spectrum = singular_values(demo.product.linear(5)).values;
  auto a = singular_values(demo.factor_a.linear(0)).values;
  const auto b = singular_values(demo.factor_b.linear(5)).values;
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.rbegin(), a.rend());
  for (std::size_t i = 0; i < 8; ++i) CHECK(spectrum[i] == doctest::Approx(a[i]));

  const auto dom = domination_check(demo, 2, 2, 3);
  CHECK(dom.lhs1 == doctest::Approx(std::log(6.0)));
  CHECK(dom.lhs2 == doctest::Approx(std::log(6.0)));
  const double p3 = std::log(81.0) + sumset_log_phi(3.0, 3) - sumset_log_phi(3.0, 2);
  // Q = I on the product: singular values are the raw diagonal entries.
  const double p_identity = std::log(81.0) + 2 * std::log(0.3) + std::log(0.3);
  CHECK(dom.rhs * (demo.s_target - 3.0) == doctest::Approx(p_identity).epsilon(1e-9));
  CHECK(dom.pass);
  (void)p3;

  const auto drop = sumset_pressure_drop(demo, 3);
  const double want =
      std::log(81.0) + sumset_log_phi(demo.s_target, 3) - sumset_log_phi(demo.s_target, 2);
  CHECK(drop.p_q_at_s == doctest::Approx(want).epsilon(1e-9));
  CHECK(drop.p_q_at_s < -0.02);
  CHECK(drop.margin == -drop.p_q_at_s);

  const auto flat = sumset_pressure_drop(demo, ProjectionMap::identity(8), 2);
  CHECK(std::fabs(flat.p_q_at_s) < 1e-6);

  CHECK_THROWS_AS(domination_check(demo, 1, 2, 3), Error);
  CHECK_THROWS_AS(domination_check(demo, 2, 3, 3), Error);
}

TEST_CASE("gapless factor fails domination") {
  TensorFactors a{2, 2, std::vector<Matrix>(9, Matrix::scalar(2, 0.6)),
                  std::vector<Matrix>(9, Matrix::scalar(2, 0.5)), 1};
  TensorFactors b{2, 2, std::vector<Matrix>(9, Matrix::scalar(2, 0.5)),
                  std::vector<Matrix>(9, Matrix(2, 2, {0.6, 0, 0, 0.1})), 2};
  // Contraction 0.3 per factor.
  const auto sumset = sumset_system(std::move(a), std::move(b));
  const auto dom = domination_check(sumset, 2, 2, 2);
  CHECK(dom.lhs1 == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_FALSE(dom.pass);
}

TEST_CASE("sumset factors must contract by more than one half") {
  TensorFactors a{2, 2, std::vector<Matrix>(2, Matrix::scalar(2, 0.9)),
                  std::vector<Matrix>(2, Matrix::scalar(2, 0.9)), 1};
  TensorFactors b = a;
  try {
    sumset_system(std::move(a), std::move(b));
    FAIL("expected contraction error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::contraction);
  }
}

TEST_CASE("full-box factors are rejected by the pressure drop") {
  TensorFactors a{2, 2, std::vector<Matrix>(81, Matrix::scalar(2, 0.6)),
                  std::vector<Matrix>(81, Matrix::scalar(2, 0.5)), 1};
  TensorFactors b = a;
  b.translation_seed = 2;
  const auto sumset = sumset_system(std::move(a), std::move(b), 2);
  CHECK(sumset.s_target >= 4.0);
  CHECK_THROWS_AS(sumset_pressure_drop(sumset, 2), Error);
}
