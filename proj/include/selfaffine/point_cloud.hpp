#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace selfaffine {

// Flat row-major storage: point i occupies points[i*dimension, (i+1)*dimension).
struct PointCloud {
  std::size_t dimension = 0;
  std::vector<double> points;

  std::size_t size() const noexcept { return dimension == 0 ? 0 : points.size() / dimension; }
  std::span<const double> point(std::size_t i) const noexcept {
    return {points.data() + i * dimension, dimension};
  }
};

}  // namespace selfaffine
