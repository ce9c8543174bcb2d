#include "selfaffine/projection.hpp"

#include <charconv>
#include <string>

#include "selfaffine/error.hpp"

namespace selfaffine {

ProjectionMap::ProjectionMap(Matrix matrix) : matrix_(std::move(matrix)) {
  require(matrix_.is_square() && !matrix_.empty(), ErrorCode::invalid_input,
          "projection must be a non-empty square matrix");
  spectrum_ = singular_values(matrix_);
  rank_ = spectrum_.numeric_rank();
}

ProjectionMap ProjectionMap::identity(std::size_t d) {
  return ProjectionMap(Matrix::identity(d));
}

ProjectionMap ProjectionMap::coordinate(std::size_t d, std::size_t k) {
  require(k < d, ErrorCode::domain,
          "coordinate " + std::to_string(k) + " outside dimension " + std::to_string(d));
  Matrix m(d, d);
  m(k, k) = 1.0;
  return ProjectionMap(std::move(m));
}

ProjectionMap ProjectionMap::sum_block(std::size_t d) {
  require(d >= 2 && d % 2 == 0, ErrorCode::domain, "sum-block projection needs even dimension");
  const std::size_t h = d / 2;
  Matrix m(d, d);
  for (std::size_t i = 0; i < h; ++i) {
    m(i, i) = 1.0;
    m(i, h + i) = 1.0;
  }
  return ProjectionMap(std::move(m));
}

ProjectionMap ProjectionMap::preset(std::string_view name, std::size_t d) {
  if (name == "identity") return identity(d);
  if (name == "sum-block") return sum_block(d);
  if (name.starts_with("coord:")) {
    const auto digits = name.substr(6);
    std::size_t k = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    require(ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty(),
            ErrorCode::invalid_input, "malformed projection preset '" + std::string(name) + "'");
    return coordinate(d, k);
  }
  fail(ErrorCode::invalid_input, "unknown projection preset '" + std::string(name) + "'");
}

}  // namespace selfaffine
