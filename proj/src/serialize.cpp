#include "selfaffine/serialize.hpp"

#include <cmath>
#include <string>

#include "selfaffine/error.hpp"

namespace selfaffine {

namespace {

constexpr std::size_t kSampleLimit = 10000;

Json numbers(std::span<const double> xs) {
  Json out = Json::array();
  for (double x : xs) out.push_back(number(x));
  return out;
}

double real(const Json& doc, const std::string& what) {
  require(doc.is_number(), ErrorCode::invalid_input, what + " must be a number");
  const double x = doc.get<double>();
  require(std::isfinite(x), ErrorCode::invalid_input, what + " must be finite");
  return x;
}

std::vector<double> reals(const Json& doc, const std::string& what) {
  require(doc.is_array(), ErrorCode::invalid_input, what + " must be an array");
  std::vector<double> out;
  for (const auto& x : doc) out.push_back(real(x, what + " entry"));
  return out;
}

const Json& field(const Json& doc, const char* key, const std::string& where) {
  require(doc.is_object() && doc.contains(key), ErrorCode::invalid_input,
          where + " is missing field '" + key + "'");
  return doc.at(key);
}

}  // namespace

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json to_json(const IfsSystem& sys) {
  Json maps = Json::array();
  for (const auto& m : sys.maps())
    maps.push_back({{"linear", numbers(m.linear.entries())}, {"translation", numbers(m.translation)}});
  return {{"dimension", sys.dimension()}, {"maps", std::move(maps)}};
}

IfsSystem system_from_json(const Json& doc) {
  const Json& dim = field(doc, "dimension", "system");
  require(dim.is_number_unsigned() && dim.get<std::size_t>() >= 1, ErrorCode::invalid_input,
          "system dimension must be a positive integer");
  const std::size_t d = dim.get<std::size_t>();
  const Json& maps = field(doc, "maps", "system");
  require(maps.is_array() && !maps.empty(), ErrorCode::invalid_input,
          "system maps must be a non-empty array");
  std::vector<AffineMap> out;
  for (std::size_t i = 0; i < maps.size(); ++i) {
    const std::string where = "map " + std::to_string(i);
    auto linear = reals(field(maps[i], "linear", where), where + " linear");
    require(linear.size() == d * d, ErrorCode::invalid_input,
            where + " linear part needs " + std::to_string(d * d) + " entries");
    std::vector<double> t(d, 0.0);
    if (maps[i].contains("translation")) t = reals(maps[i].at("translation"), where + " translation");
    out.push_back({Matrix(d, d, std::move(linear)), std::move(t)});
  }
  return IfsSystem(std::move(out));
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& doc) {
  require(doc.is_array() && !doc.empty(), ErrorCode::invalid_input,
          "matrix must be a non-empty array of rows");
  const std::size_t rows = doc.size();
  std::size_t cols = 0;
  std::vector<double> entries;
  for (const auto& row : doc) {
    const auto values = reals(row, "matrix row");
    if (cols == 0) cols = values.size();
    require(values.size() == cols && cols > 0, ErrorCode::invalid_input,
            "matrix rows must have equal positive length");
    entries.insert(entries.end(), values.begin(), values.end());
  }
  return Matrix(rows, cols, std::move(entries));
}

ProjectionMap projection_from_json(const Json& doc, std::size_t dimension) {
  if (doc.is_string()) return ProjectionMap::preset(doc.get<std::string>(), dimension);
  Matrix m = matrix_from_json(doc);
  require(m.rows() == dimension && m.cols() == dimension, ErrorCode::invalid_input,
          "projection must be " + std::to_string(dimension) + " x " + std::to_string(dimension));
  return ProjectionMap(std::move(m));
}

Json to_json(const Measure& mu) {
  if (mu.is_bernoulli()) return {{"probs", numbers(mu.stationary())}};
  Json rows = Json::array();
  for (const auto& row : mu.transition()) rows.push_back(numbers(row));
  return {{"transition", std::move(rows)}, {"stationary", numbers(mu.stationary())}};
}

Measure measure_from_json(const Json& doc) {
  if (doc.is_array()) return Measure::bernoulli(reals(doc, "probs"));
  require(doc.is_object(), ErrorCode::invalid_input, "measure must be an object or an array");
  if (doc.contains("transition")) {
    const Json& t = doc.at("transition");
    require(t.is_array(), ErrorCode::invalid_input, "transition must be an array of rows");
    std::vector<std::vector<double>> rows;
    for (const auto& row : t) rows.push_back(reals(row, "transition row"));
    return Measure::markov(std::move(rows));
  }
  return Measure::bernoulli(reals(field(doc, "probs", "measure"), "probs"));
}

Json to_json(const PressureEstimate& est) {
  return {{"s", number(est.s)},
          {"depths", est.depths},
          {"log_sums", numbers(est.log_sums)},
          {"per_n", numbers(est.per_n)},
          {"diff_quotient", number(est.diff_quotient)},
          {"rigorous_upper", est.rigorous_upper ? number(*est.rigorous_upper) : Json(nullptr)}};
}

Json to_json(const DimensionEstimate& est) {
  return {{"s_star", number(est.s_star)},
          {"bracket", {number(est.lo), number(est.hi)}},
          {"pressure_at_root", number(est.pressure_at_root)},
          {"saturated", est.saturated},
          {"depth", est.depth},
          {"rank", est.rank}};
}

Json to_json(const LyapunovEstimate& est) {
  return {{"n", est.n},
          {"trials", est.trials},
          {"exponents", numbers(est.exponents)},
          {"std_errors", numbers(est.std_errors)}};
}

Json to_json(const LocalDimension& est) {
  return {{"s_star", number(est.s_star)},
          {"saturated", est.saturated},
          {"n", est.n},
          {"rank", est.rank}};
}

Json to_json(const OrbitLimitReport& report) {
  Json out = {{"n", report.n},
              {"trials", report.trials},
              {"s", report.s ? number(*report.s) : Json(nullptr)}};
  if (report.samples.size() <= kSampleLimit) {
    out["samples"] = numbers(report.samples);
  } else {
    const auto h = histogram(report.samples, 200);
    out["samples"] = nullptr;
    out["histogram"] = {{"lo", number(h.lo)}, {"hi", number(h.hi)}, {"counts", h.counts}};
  }
  out["sample_mean"] = number(report.sample_mean);
  out["sample_std_error"] = number(report.sample_std_error);
  out["cluster_count"] = report.cluster_count;
  out["cluster_means"] = numbers(report.cluster_means);
  out["cluster_weights"] = numbers(report.cluster_weights);
  out["cluster_variances"] = numbers(report.cluster_variances);
  out["within_ss"] = numbers(report.within_ss);
  out["separation_score"] = number(report.separation_score);
  return out;
}

Json to_json(const BoxCountSeries& series) {
  return {{"deltas", numbers(series.deltas)},
          {"counts", series.counts},
          {"fit_slope", number(series.fit_slope)},
          {"fit_intercept", number(series.fit_intercept)},
          {"fit_r2", number(series.fit_r2)},
          {"degenerate", series.degenerate}};
}

Json to_json(const ContractionReport& report) {
  return {{"max_norm", number(report.max_norm)},
          {"max_pair_sum", number(report.max_pair_sum)},
          {"falconer_ok", report.falconer_ok}};
}

Json to_json(const DominationReport& report) {
  return {{"depth", report.depth},
          {"lhs1", number(report.lhs1)},
          {"lhs2", number(report.lhs2)},
          {"rhs", number(report.rhs)},
          {"pass", report.pass}};
}

Json to_json(const PressureDrop& drop) {
  return {{"depth", drop.depth},
          {"p_q_at_s", number(drop.p_q_at_s)},
          {"margin", number(drop.margin)},
          {"estimate", to_json(drop.estimate)}};
}

Json to_json(const SumsetSystem& sumset) {
  return {{"d1", sumset.a.d1},
          {"d2", sumset.a.d2},
          {"factor_sizes", {sumset.factor_a.size(), sumset.factor_b.size()}},
          {"dim_a", number(sumset.dim_a)},
          {"dim_b", number(sumset.dim_b)},
          {"s_target", number(sumset.s_target)},
          {"dim_depth", sumset.dim_depth}};
}

Json to_json(const TensorFactors& factors) {
  Json left = Json::array(), right = Json::array();
  for (const auto& m : factors.left) left.push_back(matrix_to_json(m));
  for (const auto& m : factors.right) right.push_back(matrix_to_json(m));
  return {{"d1", factors.d1},
          {"d2", factors.d2},
          {"left", std::move(left)},
          {"right", std::move(right)},
          {"translation_seed", factors.translation_seed}};
}

TensorFactors tensor_factors_from_json(const Json& doc) {
  TensorFactors out;
  for (const char* key : {"d1", "d2"}) {
    const Json& v = field(doc, key, "tensor factors");
    require(v.is_number_unsigned() && v.get<std::size_t>() >= 1, ErrorCode::invalid_input,
            std::string(key) + " must be a positive integer");
  }
  out.d1 = doc.at("d1").get<std::size_t>();
  out.d2 = doc.at("d2").get<std::size_t>();
  for (const char* key : {"left", "right"})
    require(field(doc, key, "tensor factors").is_array(), ErrorCode::invalid_input,
            std::string(key) + " must be an array of matrices");
  for (const auto& m : doc.at("left")) out.left.push_back(matrix_from_json(m));
  for (const auto& m : doc.at("right")) out.right.push_back(matrix_from_json(m));
  if (doc.contains("translation_seed")) {
    require(doc.at("translation_seed").is_number_unsigned(), ErrorCode::invalid_input,
            "translation_seed must be a non-negative integer");
    out.translation_seed = doc.at("translation_seed").get<std::uint64_t>();
  }
  return out;
}

}  // namespace selfaffine
