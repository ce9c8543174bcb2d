#pragma once

// Point-cloud projection, delta-mesh box counting and dimension fits, and
// plain-text / raster export.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "selfaffine/point_cloud.hpp"
#include "selfaffine/projection.hpp"

namespace selfaffine {

PointCloud project_points(const ProjectionMap& q, const PointCloud& cloud,
                          unsigned workers = 0);

// Number of half-open cubes prod_j [k_j delta, (k_j + 1) delta) holding at
// least one point.
std::uint64_t box_count(const PointCloud& cloud, double delta, unsigned workers = 0);

struct BoxCountSeries {
  // Descending.
  std::vector<double> deltas;
  std::vector<std::uint64_t> counts;
  double fit_slope = 0.0;
  double fit_intercept = 0.0;
  double fit_r2 = 0.0;
  // All points coincide; slope is 0.
  bool degenerate = false;
};

// Bounding-box diagonal length.
double diameter(const PointCloud& cloud);

struct BoxFitOptions {
  // Defaults (0): delta_hi = diameter / 16, delta_lo = delta_hi / 64.
  double delta_hi = 0.0;
  double delta_lo = 0.0;
  std::size_t n_scales = 7;
  unsigned workers = 0;
};

// Least-squares slope of log count against log(1 / delta) over a geometric
// sequence of deltas.
BoxCountSeries box_dim_fit(const PointCloud& cloud, const BoxFitOptions& options = {});

// Header x0,x1,... then one point per line, values printed with %.17g.
std::string to_csv(const PointCloud& cloud);
PointCloud from_csv(const std::string& text);
void export_csv(const PointCloud& cloud, const std::filesystem::path& path);
PointCloud import_csv(const std::filesystem::path& path);

struct Raster {
  std::size_t width = 0;
  std::size_t height = 0;
  // Row-major from the top row; true marks a hit pixel.
  std::vector<bool> hits;
};

// Bins coordinates (axis_x, axis_y) over the cloud's bounding box; larger y
// is drawn higher up.
Raster rasterize(const PointCloud& cloud, std::size_t width, std::size_t height,
                 std::size_t axis_x = 0, std::size_t axis_y = 1);
// Binary P6, max value 255, black hits on white.
std::string to_ppm(const Raster& raster);
void export_ppm(const PointCloud& cloud, const std::filesystem::path& path, std::size_t width,
                std::size_t height, std::size_t axis_x = 0, std::size_t axis_y = 1);

}  // namespace selfaffine
