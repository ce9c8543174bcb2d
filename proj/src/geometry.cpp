#include "selfaffine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "selfaffine/error.hpp"
#include "selfaffine/parallel.hpp"
#include "selfaffine/rng.hpp"

namespace selfaffine {

namespace {

// Open-addressing set of integer lattice points.
class LatticeSet {
 public:
  explicit LatticeSet(std::size_t dimension) : d_(dimension) { rehash(1024); }

  void insert(const std::int64_t* key, std::uint64_t hash) {
    if (2 * (size_ + 1) > capacity_) rehash(capacity_ * 2);
    place(key, hash);
  }

  std::size_t size() const noexcept { return size_; }

  static std::uint64_t hash_of(const std::int64_t* key, std::size_t d) noexcept {
    std::uint64_t h = 0x243F6A8885A308D3ULL;
    for (std::size_t i = 0; i < d; ++i) h = mix64(h ^ static_cast<std::uint64_t>(key[i]));
    return h;
  }

 private:
  void place(const std::int64_t* key, std::uint64_t hash) {
    std::size_t slot = hash & (capacity_ - 1);
    for (;;) {
      if (!used_[slot]) {
        used_[slot] = 1;
        hashes_[slot] = hash;
        std::copy(key, key + d_, keys_.begin() + static_cast<std::ptrdiff_t>(slot * d_));
        ++size_;
        return;
      }
      if (hashes_[slot] == hash &&
          std::equal(key, key + d_, keys_.begin() + static_cast<std::ptrdiff_t>(slot * d_)))
        return;
      slot = (slot + 1) & (capacity_ - 1);
    }
  }

  void rehash(std::size_t capacity) {
    std::vector<std::int64_t> keys = std::move(keys_);
    std::vector<std::uint64_t> hashes = std::move(hashes_);
    std::vector<char> used = std::move(used_);
    const std::size_t old = capacity_;
    capacity_ = capacity;
    keys_.assign(capacity_ * d_, 0);
    hashes_.assign(capacity_, 0);
    used_.assign(capacity_, 0);
    size_ = 0;
    for (std::size_t i = 0; i < old; ++i)
      if (used[i]) place(keys.data() + i * d_, hashes[i]);
  }

  std::size_t d_;
  std::size_t capacity_ = 0;
  std::size_t size_ = 0;
  std::vector<std::int64_t> keys_;
  std::vector<std::uint64_t> hashes_;
  std::vector<char> used_;
};

constexpr double kMaxIndex = 9.0e18;

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::io, "cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  require(static_cast<bool>(out), ErrorCode::io, "failed writing " + path.string());
}

}  // namespace

PointCloud project_points(const ProjectionMap& q, const PointCloud& cloud, unsigned workers) {
  const std::size_t d = cloud.dimension;
  require(q.dimension() == d, ErrorCode::domain,
          "projection dimension " + std::to_string(q.dimension()) +
              " does not match cloud dimension " + std::to_string(d));
  PointCloud out{d, std::vector<double>(cloud.points.size())};
  const std::size_t n = cloud.size();
  const std::size_t chunk = 65536;
  const auto& m = q.matrix();
  parallel_for((n + chunk - 1) / chunk, workers, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * chunk);
    for (std::size_t i = c * chunk; i < end; ++i)
      kernel::multiply(m.entries().data(), cloud.points.data() + i * d, out.points.data() + i * d,
                       d, d, 1);
  });
  return out;
}

std::uint64_t box_count(const PointCloud& cloud, double delta, unsigned workers) {
  require(std::isfinite(delta) && delta > 0.0, ErrorCode::domain, "delta must be positive");
  const std::size_t d = cloud.dimension;
  const std::size_t n = cloud.size();
  if (n == 0) return 0;
  const unsigned parts = std::max(1u, std::min<unsigned>(resolve_workers(workers), 64));
  std::vector<std::size_t> sizes(parts, 0);
  // Worker w keeps the cubes whose hash falls in residue class w, so the
  // partial sets are disjoint and the total is their sum.
  parallel_for(parts, parts, [&](std::size_t w) {
    LatticeSet set(d);
    std::vector<std::int64_t> key(d);
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = cloud.points.data() + i * d;
      for (std::size_t j = 0; j < d; ++j) {
        const double idx = std::floor(p[j] / delta);
        require(std::abs(idx) < kMaxIndex, ErrorCode::domain,
                "coordinate too large for the mesh size");
        key[j] = static_cast<std::int64_t>(idx);
      }
      const std::uint64_t h = LatticeSet::hash_of(key.data(), d);
      if (h % parts == w) set.insert(key.data(), h);
    }
    sizes[w] = set.size();
  });
  std::uint64_t total = 0;
  for (std::size_t s : sizes) total += s;
  return total;
}

double diameter(const PointCloud& cloud) {
  const std::size_t d = cloud.dimension;
  if (cloud.size() == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = 0; j < d; ++j) {
    double lo = cloud.points[j], hi = cloud.points[j];
    for (std::size_t i = 1; i < cloud.size(); ++i) {
      const double v = cloud.points[i * d + j];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    sum += (hi - lo) * (hi - lo);
  }
  return std::sqrt(sum);
}

BoxCountSeries box_dim_fit(const PointCloud& cloud, const BoxFitOptions& options) {
  require(options.n_scales >= 4, ErrorCode::domain, "box fit needs at least 4 scales");
  const double diam = diameter(cloud);
  double hi = options.delta_hi > 0.0 ? options.delta_hi : diam / 16.0;
  double lo = options.delta_lo > 0.0 ? options.delta_lo : hi / 64.0;

  BoxCountSeries out;
  if (diam == 0.0) {
    out.degenerate = true;
    if (hi <= 0.0) hi = 1.0;
    if (lo <= 0.0 || lo >= hi) lo = hi / 64.0;
  }
  require(lo > 0.0 && lo < hi, ErrorCode::domain, "need 0 < delta_lo < delta_hi");

  const std::size_t m = options.n_scales;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(m - 1);
    out.deltas.push_back(hi * std::pow(lo / hi, t));
  }
  for (double delta : out.deltas) out.counts.push_back(box_count(cloud, delta, options.workers));
  if (out.degenerate) return out;

  double sx = 0, sy = 0;
  std::vector<double> x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x[i] = std::log(1.0 / out.deltas[i]);
    y[i] = std::log(static_cast<double>(std::max<std::uint64_t>(out.counts[i], 1)));
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  out.fit_slope = sxy / sxx;
  out.fit_intercept = my - out.fit_slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = y[i] - (out.fit_intercept + out.fit_slope * x[i]);
    ss_res += r * r;
  }
  out.fit_r2 = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  return out;
}

std::string to_csv(const PointCloud& cloud) {
  std::string out;
  for (std::size_t j = 0; j < cloud.dimension; ++j) {
    if (j) out += ',';
    out += 'x' + std::to_string(j);
  }
  out += '\n';
  char buf[32];
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    for (std::size_t j = 0; j < cloud.dimension; ++j) {
      if (j) out += ',';
      std::snprintf(buf, sizeof buf, "%.17g", cloud.points[i * cloud.dimension + j]);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

PointCloud from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::invalid_input,
          "CSV is missing its header");
  PointCloud cloud;
  {
    std::istringstream header(line);
    std::string cell;
    while (std::getline(header, cell, ',')) {
      require(cell == "x" + std::to_string(cloud.dimension), ErrorCode::invalid_input,
              "unexpected CSV header column '" + cell + "'");
      ++cloud.dimension;
    }
  }
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream cells(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      require(end != cell.c_str() && *end == '\0' && std::isfinite(v), ErrorCode::invalid_input,
              "bad CSV value '" + cell + "' on line " + std::to_string(row));
      cloud.points.push_back(v);
      ++cols;
    }
    require(cols == cloud.dimension, ErrorCode::invalid_input,
            "CSV line " + std::to_string(row) + " has " + std::to_string(cols) + " values");
  }
  return cloud;
}

void export_csv(const PointCloud& cloud, const std::filesystem::path& path) {
  write_file(path, to_csv(cloud));
}

PointCloud import_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::io, "cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return from_csv(text.str());
}

Raster rasterize(const PointCloud& cloud, std::size_t width, std::size_t height,
                 std::size_t axis_x, std::size_t axis_y) {
  require(width >= 1 && height >= 1, ErrorCode::domain, "raster needs positive size");
  require(axis_x < cloud.dimension && axis_y < cloud.dimension, ErrorCode::domain,
          "raster axis outside the cloud dimension");
  Raster r{width, height, std::vector<bool>(width * height, false)};
  const std::size_t n = cloud.size();
  if (n == 0) return r;
  const std::size_t d = cloud.dimension;
  auto range = [&](std::size_t axis) {
    double lo = cloud.points[axis], hi = lo;
    for (std::size_t i = 1; i < n; ++i) {
      lo = std::min(lo, cloud.points[i * d + axis]);
      hi = std::max(hi, cloud.points[i * d + axis]);
    }
    return std::pair{lo, hi};
  };
  const auto [x_lo, x_hi] = range(axis_x);
  const auto [y_lo, y_hi] = range(axis_y);
  auto bin = [](double v, double lo, double hi, std::size_t bins) -> std::size_t {
    if (hi <= lo) return 0;
    const auto b = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(b, bins - 1);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t px = bin(cloud.points[i * d + axis_x], x_lo, x_hi, width);
    const std::size_t py = bin(cloud.points[i * d + axis_y], y_lo, y_hi, height);
    r.hits[(height - 1 - py) * width + px] = true;
  }
  return r;
}

std::string to_ppm(const Raster& raster) {
  std::string out = "P6\n" + std::to_string(raster.width) + " " +
                    std::to_string(raster.height) + "\n255\n";
  out.reserve(out.size() + raster.hits.size() * 3);
  for (bool hit : raster.hits) out.append(3, hit ? '\0' : '\xff');
  return out;
}

void export_ppm(const PointCloud& cloud, const std::filesystem::path& path, std::size_t width,
                std::size_t height, std::size_t axis_x, std::size_t axis_y) {
  write_file(path, to_ppm(rasterize(cloud, width, height, axis_x, axis_y)));
}

}  // namespace selfaffine
