#include "selfaffine/ifs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "selfaffine/error.hpp"
#include "selfaffine/parallel.hpp"
#include "selfaffine/rng.hpp"

namespace selfaffine {

std::vector<double> AffineMap::operator()(std::span<const double> x) const {
  auto y = matvec(linear, x);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += translation[i];
  return y;
}

IfsSystem::IfsSystem(std::vector<AffineMap> maps) : maps_(std::move(maps)) {
  require(!maps_.empty(), ErrorCode::invalid_input, "an IFS needs at least one map");
  dimension_ = maps_.front().linear.rows();
  for (std::size_t i = 0; i < maps_.size(); ++i) {
    const auto& m = maps_[i];
    const std::string label = "map " + std::to_string(i);
    require(m.linear.rows() == dimension_ && m.linear.cols() == dimension_,
            ErrorCode::invalid_input, label + ": linear part must be " +
                                          std::to_string(dimension_) + "x" +
                                          std::to_string(dimension_));
    require(m.translation.size() == dimension_, ErrorCode::invalid_input,
            label + ": translation length mismatch");
    require(std::all_of(m.translation.begin(), m.translation.end(),
                        [](double x) { return std::isfinite(x); }),
            ErrorCode::invalid_input, label + ": non-finite translation");
    require(numeric_rank(m.linear) == dimension_, ErrorCode::invalid_input,
            label + ": linear part is not invertible");
  }
}

IfsSystem IfsSystem::from_linear(std::vector<Matrix> linear,
                                 std::vector<std::vector<double>> translations) {
  require(translations.empty() || translations.size() == linear.size(),
          ErrorCode::invalid_input, "translation count mismatch");
  std::vector<AffineMap> maps;
  maps.reserve(linear.size());
  for (std::size_t i = 0; i < linear.size(); ++i) {
    std::vector<double> t = translations.empty()
                                ? std::vector<double>(linear[i].rows(), 0.0)
                                : std::move(translations[i]);
    maps.push_back({std::move(linear[i]), std::move(t)});
  }
  return IfsSystem(std::move(maps));
}

std::vector<Matrix> IfsSystem::linear_parts() const {
  std::vector<Matrix> out;
  out.reserve(maps_.size());
  for (const auto& m : maps_) out.push_back(m.linear);
  return out;
}

namespace {

void check_word(const IfsSystem& sys, std::span<const Letter> word) {
  for (std::size_t k = 0; k < word.size(); ++k)
    require(word[k] < sys.size(), ErrorCode::index,
            "letter " + std::to_string(word[k]) + " at position " + std::to_string(k) +
                " outside alphabet of size " + std::to_string(sys.size()));
}

}  // namespace

Matrix linear_word(const IfsSystem& sys, std::span<const Letter> word) {
  check_word(sys, word);
  Matrix product = Matrix::identity(sys.dimension());
  for (Letter letter : word) product = product * sys.linear(letter);
  return product;
}

AffineMap affine_word(const IfsSystem& sys, std::span<const Letter> word) {
  check_word(sys, word);
  const std::size_t d = sys.dimension();
  AffineMap result{Matrix::identity(d), std::vector<double>(d, 0.0)};
  // Translation is sum_k A_{w_1 ... w_{k-1}} u_{w_k}.
  for (Letter letter : word) {
    const auto shift = matvec(result.linear, sys.map(letter).translation);
    for (std::size_t i = 0; i < d; ++i) result.translation[i] += shift[i];
    result.linear = result.linear * sys.linear(letter);
  }
  return result;
}

ContractionReport contraction_report(const IfsSystem& sys) {
  std::vector<double> norms;
  norms.reserve(sys.size());
  for (const auto& m : sys.maps()) norms.push_back(operator_norm(m.linear));
  ContractionReport report;
  report.max_norm = *std::max_element(norms.begin(), norms.end());
  if (norms.size() >= 2) {
    auto sorted = norms;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    report.max_pair_sum = sorted[0] + sorted[1];
    report.falconer_ok = report.max_pair_sum < 1.0;
  } else {
    report.max_pair_sum = report.max_norm;
    report.falconer_ok = report.max_norm < 0.5;
  }
  return report;
}

void require_contracting(const IfsSystem& sys) {
  const double norm = contraction_report(sys).max_norm;
  require(norm < 1.0, ErrorCode::contraction,
          "system is not contracting in the Euclidean operator norm (max norm " +
              std::to_string(norm) + ")");
}

std::vector<double> cylinder_point(const IfsSystem& sys, std::span<const Letter> word,
                                   std::span<const double> v0) {
  require(v0.size() == sys.dimension(), ErrorCode::domain, "start point dimension mismatch");
  require_contracting(sys);
  check_word(sys, word);
  std::vector<double> x(v0.begin(), v0.end());
  for (auto it = word.rbegin(); it != word.rend(); ++it) x = sys.map(*it)(x);
  return x;
}

void validate_probabilities(std::span<const double> probs, std::size_t expected) {
  require(probs.size() == expected, ErrorCode::domain,
          "expected " + std::to_string(expected) + " probabilities, got " +
              std::to_string(probs.size()));
  double total = 0.0;
  for (double p : probs) {
    require(std::isfinite(p) && p > 0.0, ErrorCode::domain, "probabilities must be positive");
    total += p;
  }
  require(std::abs(total - 1.0) <= 1e-12, ErrorCode::domain,
          "probabilities must sum to 1 (sum is " + std::to_string(total) + ")");
}

PointCloud chaos_game(const IfsSystem& sys, std::span<const double> probs,
                      std::size_t n_points, std::uint64_t seed,
                      const ChaosGameOptions& options) {
  validate_probabilities(probs, sys.size());
  if (!options.force) require_contracting(sys);
  require(options.orbits >= 1, ErrorCode::domain, "need at least one orbit");

  const std::size_t d = sys.dimension();
  PointCloud cloud{d, std::vector<double>(n_points * d)};
  const Categorical letters(probs);
  const std::size_t orbits = std::min<std::size_t>(options.orbits, std::max<std::size_t>(n_points, 1));
  const std::size_t base = n_points / orbits;
  const std::size_t extra = n_points % orbits;

  parallel_for(orbits, options.workers, [&](std::size_t orbit) {
    const std::size_t count = base + (orbit < extra ? 1 : 0);
    const std::size_t first = orbit * base + std::min(orbit, extra);
    CounterRng rng(seed, orbit);
    std::vector<double> x(d, 0.0);
    std::vector<double> y(d);
    auto step = [&] {
      const auto& m = sys.map(letters.sample(rng));
      for (std::size_t r = 0; r < d; ++r) {
        double acc = m.translation[r];
        for (std::size_t c = 0; c < d; ++c) acc += m.linear(r, c) * x[c];
        y[r] = acc;
      }
      x.swap(y);
    };
    for (std::size_t k = 0; k < options.burn_in; ++k) step();
    for (std::size_t k = 0; k < count; ++k) {
      step();
      std::copy(x.begin(), x.end(), cloud.points.begin() + static_cast<std::ptrdiff_t>((first + k) * d));
    }
  });
  return cloud;
}

IfsSystem with_random_translations(std::vector<Matrix> linear, std::uint64_t seed) {
  CounterRng rng(seed, 0x7a11);
  std::vector<std::vector<double>> translations;
  translations.reserve(linear.size());
  for (const auto& m : linear) {
    std::vector<double> t(m.rows());
    for (double& x : t) x = rng.uniform(-1.0, 1.0);
    translations.push_back(std::move(t));
  }
  return IfsSystem::from_linear(std::move(linear), std::move(translations));
}

}  // namespace selfaffine
