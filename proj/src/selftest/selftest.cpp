#include "selfaffine/selftest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "selfaffine/constructions.hpp"
#include "selfaffine/error.hpp"
#include "selfaffine/geometry.hpp"
#include "selfaffine/measures.hpp"
#include "selfaffine/parallel.hpp"
#include "selfaffine/pressure.hpp"
#include "selfaffine/rng.hpp"

namespace selfaffine {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Context {
  std::uint64_t seed = 0;
  unsigned workers = 0;

  std::uint64_t seed_for(int id, std::uint64_t k = 0) const {
    return mix64(seed + 0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(id) + mix64(k));
  }
  ExecOptions exec() const {
    ExecOptions e;
    e.workers = workers;
    return e;
  }
};

struct Outcome {
  bool pass = false;
  Json metrics;
  double max_render_seconds = 0.0;
};

Json numbers(std::span<const double> xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

Matrix gaussian(std::size_t rows, std::size_t cols, CounterRng& rng) {
  Matrix m(rows, cols);
  for (double& x : m.entries()) x = rng.normal();
  return m;
}

Outcome worked_example(const Context& ctx) {
  const auto a = IfsSystem::from_linear({Matrix(2, 2, {1, 1, 0, 1}), Matrix(2, 2, {1, 1, 0, 2})});
  const auto stripped =
      IfsSystem::from_linear({Matrix(2, 2, {1, 0, 0, 1}), Matrix(2, 2, {1, 0, 0, 2})});
  const ProjectionMap q(Matrix(2, 2, {1, 0, 0, 0}));
  const auto est = pressure(a, q, 1.0, 20, 1, ctx.exec());
  const auto flat = pressure(stripped, q, 1.0, 20, 1, ctx.exec());

  const double target = std::log(3.0);
  const double error = std::fabs(est.diff_quotient - target);
  const auto peak = static_cast<std::size_t>(
      std::max_element(est.per_n.begin(), est.per_n.end()) - est.per_n.begin());
  bool trending = std::fabs(est.per_n.back() - target) < std::fabs(est.per_n[peak] - target);
  for (std::size_t i = peak + 1; i < est.per_n.size(); ++i)
    trending = trending && est.per_n[i] <= est.per_n[i - 1] + 1e-12;
  double flat_error = 0.0;
  for (double v : flat.per_n) flat_error = std::max(flat_error, std::fabs(v - std::log(2.0)));

  Outcome out;
  out.pass = error <= 0.1 && trending && flat_error <= 1e-12;
  out.metrics = {{"diff_quotient", number(est.diff_quotient)},
                 {"target", number(target)},
                 {"error", number(error)},
                 {"per_n", numbers(est.per_n)},
                 {"peak_depth", est.depths[peak]},
                 {"trending", trending},
                 {"stripped_max_error", number(flat_error)}};
  return out;
}

Outcome self_similar(const Context& ctx) {
  const auto sys = IfsSystem::from_linear(std::vector<Matrix>(3, Matrix::scalar(2, 1.0 / 3.0)),
                                          {{0.0, 0.0}, {2.0 / 3.0, 0.0}, {0.0, 2.0 / 3.0}});
  Json estimates = Json::array();
  double worst = 0.0;
  for (unsigned n = 2; n <= 8; ++n) {
    const double s = dim_aff_q(sys, ProjectionMap::identity(2), n, 1e-4, ctx.exec()).s_star;
    worst = std::max(worst, std::fabs(s - 1.0));
    estimates.push_back(number(s));
  }
  return {worst <= 1e-6, {{"first_depth", 2}, {"last_depth", 8}, {"estimates", estimates}, {"max_error", number(worst)}}};
}

// Q = O1 diag(e^u1, e^u2) O2 with u uniform in [-0.15, 0.15].
Outcome kernel_equality(const Context& ctx) {
  constexpr unsigned depth = 14;
  constexpr double spread = 0.15;
  double worst = 0.0;
  Json per_system = Json::array();
  for (int i = 0; i < 10; ++i) {
    const auto sys = random_contracting_system(2, 2, 0.3, 0.7, ctx.seed_for(3, i));
    const double base = dim_aff_q(sys, ProjectionMap::identity(2), depth, 1e-4, ctx.exec()).s_star;
    CounterRng rng(ctx.seed_for(3, 100 + i));
    double local = 0.0;
    for (int k = 0; k < 10; ++k) {
      const Matrix o1 = random_orthogonal(2, rng);
      const Matrix o2 = random_orthogonal(2, rng);
      const double diag[] = {std::exp(rng.uniform(-spread, spread)),
                             std::exp(rng.uniform(-spread, spread))};
      const ProjectionMap q(o1 * Matrix::diagonal(diag) * o2);
      const double s = dim_aff_q(sys, q, depth, 1e-4, ctx.exec()).s_star;
      local = std::max(local, std::fabs(s - base));
    }
    worst = std::max(worst, local);
    per_system.push_back({{"dim_identity", number(base)}, {"max_deviation", number(local)}});
  }
  return {worst <= 0.02,
          {{"depth", depth}, {"log_scale_spread", spread}, {"systems", per_system},
           {"max_deviation", number(worst)}}};
}

Outcome lipschitz_convexity(const Context& ctx) {
  constexpr unsigned depth = 8;
  constexpr std::size_t grid_size = 50;
  std::uint64_t checks = 0, lipschitz_bad = 0, convex_bad = 0;
  double worst_slack = -INFINITY;
  for (int i = 0; i < 20; ++i) {
    const std::size_t d = 2 + i % 2;
    const auto sys = random_contracting_system(3, d, 0.2, 0.6, ctx.seed_for(4, i));
    const double kappa = lipschitz_bound(sys);
    const DepthSpectra table(sys, ProjectionMap::identity(d), depth, ctx.exec());
    std::vector<double> s(grid_size), v(grid_size);
    for (std::size_t k = 0; k < grid_size; ++k) {
      s[k] = static_cast<double>(d) * static_cast<double>(k) / (grid_size - 1);
      v[k] = table.per_n(s[k]);
    }
    for (std::size_t a = 0; a < grid_size; ++a)
      for (std::size_t b = a + 1; b < grid_size; ++b) {
        ++checks;
        const double slack = std::fabs(v[b] - v[a]) - kappa * (s[b] - s[a]);
        worst_slack = std::max(worst_slack, slack);
        if (slack > 1e-10) ++lipschitz_bad;
        if (std::ceil(s[b]) - std::floor(s[a]) <= 1.0) {
          const double mid = table.per_n(0.5 * (s[a] + s[b]));
          if (mid > 0.5 * (v[a] + v[b]) + 1e-10) ++convex_bad;
        }
      }
  }
  return {lipschitz_bad == 0 && convex_bad == 0,
          {{"systems", 20}, {"depth", depth}, {"grid", grid_size}, {"pairs", checks},
           {"lipschitz_violations", lipschitz_bad}, {"convexity_violations", convex_bad},
           {"max_lipschitz_slack", number(worst_slack)}}};
}

Outcome subsystem_monotonicity(const Context& ctx) {
  constexpr unsigned depth = 8;
  std::uint64_t checks = 0, bad = 0;
  double smallest_gap = INFINITY;
  for (int i = 0; i < 20; ++i) {
    const std::size_t maps = 3 + i % 2;
    const auto sys = random_contracting_system(maps, 2, 0.2, 0.7, ctx.seed_for(5, i));
    CounterRng rng(ctx.seed_for(5, 100 + i));
    const ProjectionMap projections[] = {ProjectionMap::identity(2),
                                         ProjectionMap(gaussian(2, 2, rng))};
    for (const auto& q : projections) {
      const DepthSpectra full(sys, q, depth, ctx.exec());
      for (std::size_t drop = 0; drop < maps; ++drop) {
        std::vector<AffineMap> kept;
        for (std::size_t j = 0; j < maps; ++j)
          if (j != drop) kept.push_back(sys.map(j));
        const DepthSpectra sub(IfsSystem(std::move(kept)), q, depth, ctx.exec());
        for (double s = 0.0; s <= static_cast<double>(q.rank()); s += 0.25) {
          ++checks;
          const double gap = full.log_sum(s) - sub.log_sum(s);
          smallest_gap = std::min(smallest_gap, gap);
          if (!(gap > 0.0)) ++bad;
        }
      }
    }
  }
  return {bad == 0,
          {{"systems", 20}, {"depth", depth}, {"checks", checks}, {"violations", bad},
           {"min_log_gap", number(smallest_gap)}}};
}

// Q1 has random rank r; s is drawn from [0, r] so both sums are defined.
Outcome kernel_monotonicity(const Context& ctx) {
  constexpr unsigned depth = 6;
  std::uint64_t bad = 0;
  double worst = -INFINITY;
  for (int t = 0; t < 1000; ++t) {
    const std::size_t d = 2 + t % 2;
    const auto sys = random_contracting_system(3, d, 0.2, 0.7, ctx.seed_for(6, t));
    CounterRng rng(ctx.seed_for(6, 5000 + t));
    const std::size_t r = 1 + rng.below(d);
    const Matrix q1 = gaussian(d, r, rng) * gaussian(r, d, rng);
    const Matrix b = gaussian(d, d, rng);
    const ProjectionMap p1(q1), p2(b * q1);
    const double s = rng.uniform(0.0, static_cast<double>(std::min(p1.rank(), p2.rank())));
    const double lhs = log_partition_sum(sys, p2, s, depth, ctx.exec());
    const double rhs = log_partition_sum(sys, p1, s, depth, ctx.exec()) + std::log(svf(b, s).value);
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + 1e-10) ++bad;
  }
  return {bad == 0,
          {{"triples", 1000}, {"depth", depth}, {"violations", bad},
           {"max_excess", number(worst)}}};
}

Outcome compound_identity(const Context& ctx) {
  CounterRng rng(ctx.seed_for(7));
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const Matrix m = gaussian(5, 5, rng);
    const auto sigma = singular_values(m).values;
    double product = 1.0;
    for (std::size_t k = 1; k <= 5; ++k) {
      product *= sigma[k - 1];
      const double top = singular_values(compound(m, k)).largest();
      worst = std::max(worst, std::fabs(top - product) / product);
    }
  }
  return {worst <= 1e-9, {{"matrices", 100}, {"max_relative_error", number(worst)}}};
}

// At s = d both sides equal |det A det B|, so the check there only sees the
// rounding of AB, about eps cond(A) cond(B); pairs are drawn with condition
// number below 100 to keep that floor under the slack.
Outcome submultiplicativity(const Context& ctx) {
  CounterRng rng(ctx.seed_for(8));
  auto draw = [&rng] {
    for (;;) {
      const Matrix m = gaussian(3, 3, rng);
      const auto sigma = singular_values(m);
      if (sigma.smallest() > 0.0 && sigma.largest() < 100.0 * sigma.smallest()) return m;
    }
  };
  std::uint64_t bad = 0, checks = 0;
  double worst_inner = -INFINITY, worst_top = -INFINITY;
  for (int t = 0; t < 10000; ++t) {
    const Matrix a = draw();
    const Matrix b = draw();
    const Matrix ab = a * b;
    for (int k = 0; k <= 12; ++k) {
      const double s = 0.25 * k;
      const double lhs = svf(ab, s).value;
      const double rhs = svf(a, s).value * svf(b, s).value;
      ++checks;
      double& worst = k < 12 ? worst_inner : worst_top;
      worst = std::max(worst, lhs / rhs - 1.0);
      if (lhs > rhs * (1.0 + 1e-12)) ++bad;
    }
  }
  return {bad == 0,
          {{"pairs", 10000}, {"max_condition", 100}, {"s_step", 0.25}, {"checks", checks},
           {"violations", bad}, {"max_relative_excess_below_d", number(worst_inner)},
           {"max_relative_excess_at_d", number(worst_top)}}};
}

// The a.e. statement is checked on the mean over translation samples for
// each Q; every sample must also respect the upper bound.
Outcome box_dimension(const Context& ctx) {
  constexpr std::size_t samples = 20, points = 1'000'000;
  constexpr unsigned depth = 10;
  const std::vector<Matrix> linear(3, Matrix::scalar(2, 1.0 / 3.0));
  const double probs[] = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};

  std::vector<ProjectionMap> qs{ProjectionMap::identity(2)};
  CounterRng rng(ctx.seed_for(9));
  for (int k = 0; k < 5; ++k) {
    double u[] = {rng.normal(), rng.normal()}, v[] = {rng.normal(), rng.normal()};
    const double nu = std::hypot(u[0], u[1]), nv = std::hypot(v[0], v[1]);
    for (double& x : u) x /= nu;
    for (double& x : v) x /= nv;
    qs.emplace_back(Matrix(2, 2, {u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]}));
  }
  // Translations do not enter the estimate; one per Q suffices.
  const auto reference = IfsSystem::from_linear(linear);
  std::vector<double> dims;
  for (const auto& q : qs) dims.push_back(dim_aff_q(reference, q, depth, 1e-4, ctx.exec()).s_star);

  std::vector<double> mean_slope(qs.size(), 0.0), worst_excess(qs.size(), -INFINITY);
  std::vector<std::size_t> within(qs.size(), 0);
  Outcome out;
  for (std::size_t t = 0; t < samples; ++t) {
    const auto start = Clock::now();
    const auto sys = with_random_translations(linear, ctx.seed_for(9, 1 + t));
    ChaosGameOptions game;
    game.workers = ctx.workers;
    const auto cloud = chaos_game(sys, probs, points, ctx.seed_for(9, 1000 + t), game);
    BoxFitOptions fit;
    fit.workers = ctx.workers;
    for (std::size_t k = 0; k < qs.size(); ++k) {
      const double slope = box_dim_fit(project_points(qs[k], cloud, ctx.workers), fit).fit_slope;
      mean_slope[k] += slope / samples;
      worst_excess[k] = std::max(worst_excess[k], slope - dims[k]);
      if (std::fabs(slope - dims[k]) <= 0.15) ++within[k];
    }
    out.max_render_seconds = std::max(out.max_render_seconds, seconds_since(start));
  }

  out.pass = true;
  Json rows = Json::array();
  for (std::size_t k = 0; k < qs.size(); ++k) {
    const double gap = std::fabs(mean_slope[k] - dims[k]);
    out.pass = out.pass && gap <= 0.15 && worst_excess[k] <= 0.15;
    rows.push_back({{"projection", matrix_to_json(qs[k].matrix())},
                    {"dim_estimate", number(dims[k])},
                    {"mean_slope", number(mean_slope[k])},
                    {"gap", number(gap)},
                    {"max_upper_excess", number(worst_excess[k])},
                    {"samples_within_tolerance", within[k]}});
  }
  out.metrics = {{"samples", samples}, {"points", points}, {"depth", depth},
                 {"scales", 7}, {"projections", rows}};
  return out;
}

Outcome non_exact(const Context& ctx) {
  const auto ex = phase_locked_example();
  const ProjectionMap q(Matrix(2, 2, {1, 0, 0, 0}));
  ExactnessOptions opts;
  opts.workers = ctx.workers;
  const auto rep = exactness_diagnostic(ex.system, q, ex.measure, 2000, 500, ctx.seed_for(10), opts);
  const auto full = exactness_diagnostic(ex.system, ProjectionMap::identity(2), ex.measure, 2000,
                                         500, ctx.seed_for(10, 1), opts);

  std::vector<oracle::Dense> linear;
  for (const auto& m : ex.system.maps()) {
    oracle::Dense rows(2, std::vector<double>(2));
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) rows[r][c] = m.linear(r, c);
    linear.push_back(rows);
  }
  const auto expected = oracle::monomial_rates(linear, ex.measure.transition(),
                                               ex.measure.stationary());

  bool means_ok = rep.cluster_count == expected.rates.size();
  double worst = 0.0;
  for (std::size_t i = 0; means_ok && i < expected.rates.size(); ++i) {
    worst = std::max(worst, std::fabs(rep.cluster_means[i] - expected.rates[i]));
    means_ok = means_ok && worst <= 0.02;
  }
  Outcome out;
  out.pass = rep.cluster_count == 2 && rep.separation_score >= 5.0 && means_ok &&
             full.cluster_count == 1;
  out.metrics = {{"n", 2000},
                 {"trials", 500},
                 {"cluster_count", rep.cluster_count},
                 {"cluster_means", numbers(rep.cluster_means)},
                 {"cluster_weights", numbers(rep.cluster_weights)},
                 {"separation_score", number(rep.separation_score)},
                 {"oracle_rates", numbers(expected.rates)},
                 {"oracle_weights", numbers(expected.weights)},
                 {"max_mean_error", number(worst)},
                 {"identity_cluster_count", full.cluster_count},
                 {"identity_cluster_means", numbers(full.cluster_means)}};
  return out;
}

Outcome sumset(const Context& ctx) {
  constexpr std::uint64_t budget = 1'000'000;
  ExecOptions exec = ctx.exec();
  exec.leaf_budget = budget;
  const auto demo = sumset_demo(6, ctx.exec());
  const unsigned depth = max_feasible_depth(demo.product.size(), budget);
  const auto dom = domination_check(demo, 2, 2, depth, exec);
  const auto drop = sumset_pressure_drop(demo, depth, exec);

  // diag(.6, .1) (x) .5 I and .5 I (x) diag(.6, .1), nine copies each.
  const oracle::DiagonalFamily a{9, {0.3, 0.3, 0.05, 0.05}};
  const oracle::DiagonalFamily b{9, {0.3, 0.05, 0.3, 0.05}};
  const double s_target = oracle::diagonal_dimension(a) + oracle::diagonal_dimension(b);
  const double gap = oracle::diagonal_gap({0.6, 0.1}, 2);
  const double rhs = oracle::direct_sum_pressure(a, b, 3.0) / (s_target - 3.0);
  const double p_q = oracle::sum_projection_drop(a, b, s_target, depth);

  const double margin = std::min(dom.lhs1, dom.lhs2) - dom.rhs;
  const double error = std::max({std::fabs(dom.lhs1 - gap), std::fabs(dom.lhs2 - gap),
                                 std::fabs(dom.rhs - rhs), std::fabs(drop.p_q_at_s - p_q)});
  Outcome out;
  out.pass = dom.pass && margin >= 0.05 && drop.p_q_at_s <= -0.02 && error <= 0.02;
  out.metrics = {{"depth", depth},
                 {"s_target", number(demo.s_target)},
                 {"domination", to_json(dom)},
                 {"domination_margin", number(margin)},
                 {"pressure_drop", number(drop.p_q_at_s)},
                 {"oracle",
                  {{"s_target", number(s_target)},
                   {"lhs", number(gap)},
                   {"rhs", number(rhs)},
                   {"pressure_drop", number(p_q)}}},
                 {"max_oracle_error", number(error)}};
  return out;
}

using Runner = Outcome (*)(const Context&);

struct Entry {
  const char* name;
  Runner run;
};

constexpr Entry kEntries[] = {
    {"worked example pressure", worked_example},
    {"self-similar exactness", self_similar},
    {"kernel equality", kernel_equality},
    {"lipschitz and convexity", lipschitz_convexity},
    {"subsystem monotonicity", subsystem_monotonicity},
    {"kernel monotonicity", kernel_monotonicity},
    {"compound identity", compound_identity},
    {"svf submultiplicativity", submultiplicativity},
    {"box dimension consistency", box_dimension},
    {"non-exact projection", non_exact},
    {"sumset demo", sumset},
    {"determinism", nullptr},
};

Json run_ids(const std::vector<int>& ids, const Context& ctx,
             const std::function<void(const CriterionEvent&)>& progress) {
  Json list = Json::array();
  for (int id : ids) {
    const auto start = Clock::now();
    const Outcome result = kEntries[id - 1].run(ctx);
    list.push_back({{"id", id},
                    {"name", kEntries[id - 1].name},
                    {"pass", result.pass},
                    {"metrics", result.metrics}});
    if (progress)
      progress({id, kEntries[id - 1].name, result.pass, seconds_since(start),
                result.max_render_seconds});
  }
  return list;
}

}  // namespace

std::string criterion_name(int id) {
  require(id >= 1 && id <= kCriterionCount, ErrorCode::domain,
          "criterion id must be in 1.." + std::to_string(kCriterionCount));
  return kEntries[id - 1].name;
}

Json run_selftest(const SelftestOptions& options) {
  std::vector<int> ids = options.criteria;
  if (ids.empty())
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  for (int id : ids) criterion_name(id);

  const bool rerun = ids.back() == kCriterionCount;
  std::vector<int> base(ids.begin(), ids.end() - (rerun ? 1 : 0));
  const bool implied = base.empty();
  if (implied)
    for (int id = 1; id < kCriterionCount; ++id) base.push_back(id);

  const Context ctx{options.seed, options.workers};
  Json criteria = run_ids(base, ctx, implied ? nullptr : options.progress);
  if (rerun) {
    const auto start = Clock::now();
    const unsigned first = resolve_workers(options.workers);
    const Context other{options.seed, first == 1 ? 2u : 1u};
    const std::string a = criteria.dump();
    const std::string b = run_ids(base, other, nullptr).dump();
    const bool same = a == b;
    if (implied) criteria = Json::array();
    criteria.push_back({{"id", kCriterionCount},
                        {"name", kEntries[kCriterionCount - 1].name},
                        {"pass", same},
                        {"metrics",
                         {{"criteria_compared", base.size()},
                          {"document_bytes", a.size()},
                          {"identical", same}}}});
    if (options.progress)
      options.progress({kCriterionCount, kEntries[kCriterionCount - 1].name, same,
                        seconds_since(start), 0.0});
  }

  bool all = true;
  for (const auto& c : criteria) all = all && c["pass"].get<bool>();
  return {{"suite", "selfaffine acceptance"},
          {"seed", options.seed},
          {"criteria", std::move(criteria)},
          {"all_pass", all}};
}

}  // namespace selfaffine
