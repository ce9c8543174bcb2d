#pragma once

#include <cstddef>
#include <string_view>

#include "selfaffine/linalg.hpp"

namespace selfaffine {

// A d x d endomorphism Q together with its numeric rank.
class ProjectionMap {
 public:
  explicit ProjectionMap(Matrix matrix);

  static ProjectionMap identity(std::size_t d);
  // Orthogonal projection onto coordinate axis k.
  static ProjectionMap coordinate(std::size_t d, std::size_t k);
  // On R^h (+) R^h: (u, v) -> (u + v, 0), i.e. the block matrix [I I; 0 0].
  static ProjectionMap sum_block(std::size_t d);
  // "identity", "coord:k" or "sum-block".
  static ProjectionMap preset(std::string_view name, std::size_t d);

  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dimension() const noexcept { return matrix_.rows(); }
  std::size_t rank() const noexcept { return rank_; }
  const SingularSpectrum& spectrum() const noexcept { return spectrum_; }
  bool full_rank() const noexcept { return rank_ == dimension(); }

 private:
  Matrix matrix_;
  SingularSpectrum spectrum_;
  std::size_t rank_ = 0;
};

}  // namespace selfaffine
