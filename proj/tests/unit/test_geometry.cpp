#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "selfaffine/error.hpp"
#include "selfaffine/geometry.hpp"
#include "selfaffine/ifs.hpp"
#include "selfaffine/rng.hpp"

using namespace selfaffine;

TEST_CASE("project points") {
  PointCloud cloud{2, {1.0, 2.0, -3.0, 4.0}};
  CHECK(project_points(ProjectionMap::identity(2), cloud).points == cloud.points);
  const auto flat = project_points(ProjectionMap(Matrix(2, 2, {1, 0, 0, 0})), cloud);
  CHECK(flat.points == std::vector<double>{1.0, 0.0, -3.0, 0.0});
  const ProjectionMap q(Matrix(2, 2, {0.5, 1.5, -2.0, 0.25}));
  const auto moved = project_points(q, PointCloud{2, {1.0, 2.0}});
  CHECK(moved.points == matvec(q.matrix(), std::vector<double>{1.0, 2.0}));
  CHECK_THROWS_AS(project_points(ProjectionMap::identity(3), cloud), Error);
}

TEST_CASE("box count basics") {
  CHECK(box_count(PointCloud{2, {0.3, 0.3}}, 0.1) == 1);
  CHECK(box_count(PointCloud{2, {0.31, 0.31, 0.39, 0.35}}, 0.1) == 1);
  CHECK(box_count(PointCloud{2, {0.39, 0.31, 0.41, 0.31}}, 0.1) == 2);
  CHECK(box_count(PointCloud{1, {-0.05, 0.05}}, 0.1) == 2);
  CHECK_THROWS_AS(box_count(PointCloud{1, {0.0}}, 0.0), Error);

  const int m = 30;
  PointCloud grid{2, {}};
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      grid.points.push_back((i + 0.5) * 0.01);
      grid.points.push_back((j + 0.5) * 0.01);
    }
  CHECK(box_count(grid, 0.01) == m * m);
  CHECK(box_count(grid, 0.01, 1) == box_count(grid, 0.01, 4));
}

TEST_CASE("box counts refine monotonically") {
  CounterRng rng(2);
  PointCloud cloud{3, std::vector<double>(30000)};
  for (double& x : cloud.points) x = rng.uniform(-1.0, 1.0);
  for (double delta : {0.4, 0.2, 0.1}) {
    const auto coarse = box_count(cloud, delta);
    CHECK(box_count(cloud, delta / 2) >= coarse);
    CHECK(box_count(cloud, delta / 3) >= coarse);
  }
}

TEST_CASE("box dimension of simple sets") {
  CounterRng rng(3);
  PointCloud square{2, std::vector<double>(2000000)};
  for (double& x : square.points) x = rng.uniform();
  const auto fit = box_dim_fit(square);
  CHECK(std::fabs(fit.fit_slope - 2.0) < 0.1);
  CHECK(fit.fit_r2 > 0.99);
  CHECK(fit.deltas.size() == 7);
  for (std::size_t i = 1; i < fit.deltas.size(); ++i) {
    CHECK(fit.deltas[i] < fit.deltas[i - 1]);
    CHECK(fit.counts[i] >= fit.counts[i - 1]);
  }

  PointCloud line{2, {}};
  for (int i = 0; i < 100000; ++i) {
    const double t = rng.uniform();
    line.points.push_back(t);
    line.points.push_back(0.5 * t);
  }
  CHECK(std::fabs(box_dim_fit(line).fit_slope - 1.0) < 0.1);

  const auto single = box_dim_fit(PointCloud{2, {0.2, 0.7}});
  CHECK(single.degenerate);
  CHECK(single.fit_slope == 0.0);
  BoxFitOptions bad;
  bad.n_scales = 3;
  CHECK_THROWS_AS(box_dim_fit(square, bad), Error);
  bad.n_scales = 5;
  bad.delta_hi = 0.01;
  bad.delta_lo = 0.1;
  CHECK_THROWS_AS(box_dim_fit(square, bad), Error);
}

TEST_CASE("csv format and round trip") {
  CHECK(to_csv(PointCloud{3, {}}) == "x0,x1,x2\n");
  CHECK(to_csv(PointCloud{2, {0.5, -1.0}}) == "x0,x1\n0.5,-1\n");
  CounterRng rng(4);
  PointCloud cloud{2, std::vector<double>(200)};
  for (double& x : cloud.points) x = rng.normal() * 1e-3;
  const auto back = from_csv(to_csv(cloud));
  CHECK(back.dimension == 2);
  CHECK(back.points == cloud.points);

  const auto dir = std::filesystem::temp_directory_path();
  const auto path = dir / "selfaffine_unit_cloud.csv";
  export_csv(cloud, path);
  CHECK(import_csv(path).points == cloud.points);
  const ProjectionMap q(Matrix(2, 2, {1, 0.5, 0, 0}));
  CHECK(project_points(q, import_csv(path)).points == project_points(q, cloud).points);
  std::filesystem::remove(path);

  CHECK_THROWS_AS(from_csv("x0,x1\n1,2,3\n"), Error);
  CHECK_THROWS_AS(from_csv("a,b\n1,2\n"), Error);
  CHECK_THROWS_AS(from_csv("x0\nnan\n"), Error);
  CHECK_THROWS_AS(import_csv(dir / "selfaffine_missing_file.csv"), Error);
}

TEST_CASE("ppm raster") {
  const auto one = to_ppm(rasterize(PointCloud{2, {0.3, 0.4}}, 3, 2));
  const std::string header = "P6\n3 2\n255\n";
  REQUIRE(one.size() == header.size() + 18);
  CHECK(one.substr(0, header.size()) == header);
  // A single point sits in bin (0, 0): bottom-left pixel.
  std::size_t dark = 0;
  for (std::size_t p = 0; p < 6; ++p)
    if (one[header.size() + 3 * p] == '\0') {
      ++dark;
      CHECK(p == 3);
    }
  CHECK(dark == 1);

  const auto r = rasterize(PointCloud{2, {0.0, 0.0, 1.0, 1.0}}, 4, 4);
  CHECK(r.hits[3 * 4 + 0]);
  CHECK(r.hits[0 * 4 + 3]);
  CHECK_THROWS_AS(rasterize(PointCloud{2, {0.0, 0.0}}, 4, 4, 0, 2), Error);
}
