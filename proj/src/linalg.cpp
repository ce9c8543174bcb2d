#include "selfaffine/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <string>

#include "selfaffine/error.hpp"

namespace selfaffine {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), entries_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  require(rows > 0 && cols > 0, ErrorCode::invalid_input,
          "matrix dimensions must be positive");
  require(entries_.size() == rows * cols, ErrorCode::invalid_input,
          "matrix expects " + std::to_string(rows * cols) + " entries, got " +
              std::to_string(entries_.size()));
  require(all_finite(), ErrorCode::invalid_input, "matrix has non-finite entries");
}

Matrix Matrix::identity(std::size_t n) { return scalar(n, 1.0); }

Matrix Matrix::scalar(std::size_t n, double value) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
  return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
  Matrix m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](double x) { return std::isfinite(x); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), ErrorCode::domain, "matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  kernel::multiply(a.entries().data(), b.entries().data(), out.entries().data(),
                   a.rows(), a.cols(), b.cols());
  return out;
}

Matrix operator*(double scale, const Matrix& m) {
  Matrix out = m;
  for (double& x : out.entries()) x *= scale;
  return out;
}

Matrix operator+(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::domain,
          "matrix sum shape mismatch");
  Matrix out = a;
  auto dst = out.entries();
  auto src = b.entries();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
  return out;
}

std::vector<double> matvec(const Matrix& m, std::span<const double> x) {
  require(x.size() == m.cols(), ErrorCode::domain, "vector length mismatch");
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < m.cols(); ++c) acc += m(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

Matrix direct_sum(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() + b.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      out(a.rows() + i, a.cols() + j) = b(i, j);
  return out;
}

std::size_t SingularSpectrum::numeric_rank() const noexcept {
  const double top = largest();
  if (!(top > 0.0)) return 0;
  const double cut = kRankTolerance * top;
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [cut](double v) { return v >= cut; }));
}

namespace kernel {

void multiply(const double* a, const double* b, double* out, std::size_t r,
              std::size_t k, std::size_t c) noexcept {
  for (std::size_t i = 0; i < r; ++i) {
    double* row = out + i * c;
    std::fill(row, row + c, 0.0);
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b + p * c;
      for (std::size_t j = 0; j < c; ++j) row[j] += aip * brow[j];
    }
  }
}

namespace {

double dot(const double* x, const double* y, std::size_t n) noexcept {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

constexpr double kJacobiTolerance = 1e-15;
constexpr int kMaxSweeps = 80;

}  // namespace

void singular_values(const double* m, std::size_t rows, std::size_t cols,
                     double* work, double* out) noexcept {
  // Orthogonalise the columns of the taller orientation; columns are stored
  // contiguously in work (length len each).
  const bool tall = rows >= cols;
  const std::size_t len = tall ? rows : cols;
  const std::size_t n = tall ? cols : rows;
  if (tall) {
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) work[j * rows + i] = m[i * cols + j];
  } else {
    std::memcpy(work, m, rows * cols * sizeof(double));
  }

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      double* up = work + p * len;
      for (std::size_t q = p + 1; q < n; ++q) {
        double* uq = work + q * len;
        const double gamma = dot(up, uq, len);
        if (gamma == 0.0) continue;
        const double alpha = dot(up, up, len);
        const double beta = dot(uq, uq, len);
        if (std::abs(gamma) <= kJacobiTolerance * std::sqrt(alpha) * std::sqrt(beta))
          continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double az = std::abs(zeta);
        const double root = az > 1.0 ? az * std::sqrt(1.0 + 1.0 / (zeta * zeta))
                                     : std::sqrt(1.0 + zeta * zeta);
        const double t = std::copysign(1.0, zeta) / (az + root);
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < len; ++i) {
          const double x = up[i];
          const double y = uq[i];
          up[i] = c * x - s * y;
          uq[i] = s * x + c * y;
        }
      }
    }
    if (!rotated) break;
  }

  for (std::size_t j = 0; j < n; ++j) {
    const double* u = work + j * len;
    out[j] = std::sqrt(dot(u, u, len));
  }
  // n is small; insertion sort keeps the order deterministic.
  for (std::size_t i = 1; i < n; ++i) {
    const double v = out[i];
    std::size_t j = i;
    while (j > 0 && out[j - 1] < v) {
      out[j] = out[j - 1];
      --j;
    }
    out[j] = v;
  }
}

int renormalize(double* m, std::size_t count) noexcept {
  double top = 0.0;
  for (std::size_t i = 0; i < count; ++i) top = std::max(top, std::abs(m[i]));
  if (top == 0.0 || (top >= 0x1p-100 && top <= 0x1p100)) return 0;
  int exponent = 0;
  std::frexp(top, &exponent);
  for (std::size_t i = 0; i < count; ++i) m[i] = std::ldexp(m[i], -exponent);
  return exponent;
}

}  // namespace kernel

SingularSpectrum singular_values(const Matrix& m) {
  require(m.all_finite(), ErrorCode::invalid_input, "matrix has non-finite entries");
  SingularSpectrum spectrum;
  if (m.empty()) return spectrum;
  spectrum.values.resize(std::min(m.rows(), m.cols()));
  std::vector<double> work(m.rows() * m.cols());
  kernel::singular_values(m.entries().data(), m.rows(), m.cols(), work.data(),
                          spectrum.values.data());
  return spectrum;
}

std::size_t numeric_rank(const Matrix& m) { return singular_values(m).numeric_rank(); }

double operator_norm(const Matrix& m) { return singular_values(m).largest(); }

double svf_from_spectrum(std::span<const double> sigma, double s) {
  const auto whole = static_cast<std::size_t>(std::floor(s));
  const double frac = s - static_cast<double>(whole);
  double value = 1.0;
  for (std::size_t j = 0; j < whole; ++j) value *= sigma[j];
  if (frac > 0.0) value *= std::pow(sigma[whole], frac);
  return value;
}

double log_svf(std::span<const double> log_sigma, double s) {
  const auto whole = static_cast<std::size_t>(std::floor(s));
  const double frac = s - static_cast<double>(whole);
  double value = 0.0;
  for (std::size_t j = 0; j < whole; ++j) value += log_sigma[j];
  if (frac > 0.0) value += frac * log_sigma[whole];
  return value;
}

SvfValue svf(const Matrix& m, double s) {
  const auto spectrum = singular_values(m);
  const auto dim = static_cast<double>(spectrum.values.size());
  require(s >= 0.0 && s <= dim, ErrorCode::domain,
          "svf order s=" + std::to_string(s) + " outside [0, " + std::to_string(dim) + "]");
  if (s > static_cast<double>(spectrum.numeric_rank())) return {0.0, true};
  return {svf_from_spectrum(spectrum.values, s), false};
}

std::size_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (std::size_t i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

double determinant(const Matrix& m) {
  require(m.is_square(), ErrorCode::domain, "determinant needs a square matrix");
  const std::size_t n = m.rows();
  std::vector<double> lu(m.entries().begin(), m.entries().end());
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(lu[r * n + col]) > std::abs(lu[pivot * n + col])) pivot = r;
    if (lu[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu[pivot * n + c], lu[col * n + c]);
      det = -det;
    }
    const double diag = lu[col * n + col];
    det *= diag;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = lu[r * n + col] / diag;
      if (factor == 0.0) continue;
      for (std::size_t c = col + 1; c < n; ++c) lu[r * n + c] -= factor * lu[col * n + c];
    }
  }
  return det;
}

namespace {

std::vector<std::vector<std::size_t>> lexicographic_subsets(std::size_t n, std::size_t k) {
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> current(k);
  std::iota(current.begin(), current.end(), 0);
  while (true) {
    subsets.push_back(current);
    std::size_t i = k;
    while (i > 0 && current[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++current[i - 1];
    for (std::size_t j = i; j < k; ++j) current[j] = current[j - 1] + 1;
  }
  return subsets;
}

}  // namespace

Matrix compound(const Matrix& m, std::size_t k) {
  require(m.is_square(), ErrorCode::domain, "compound needs a square matrix");
  const std::size_t d = m.rows();
  require(k >= 1 && k <= d, ErrorCode::domain,
          "compound order k=" + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  const auto subsets = lexicographic_subsets(d, k);
  const std::size_t size = subsets.size();
  Matrix out(size, size);
  Matrix minor(k, k);
  for (std::size_t I = 0; I < size; ++I) {
    for (std::size_t J = 0; J < size; ++J) {
      for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) minor(a, b) = m(subsets[I][a], subsets[J][b]);
      out(I, J) = determinant(minor);
    }
  }
  return out;
}

void orthonormalize_columns(Matrix& y, std::span<double> log_diag) {
  const std::size_t rows = y.rows();
  const std::size_t cols = y.cols();
  require(log_diag.size() == cols, ErrorCode::domain, "log_diag length mismatch");
  for (std::size_t j = 0; j < cols; ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t i = 0; i < j; ++i) {
        double proj = 0.0;
        for (std::size_t r = 0; r < rows; ++r) proj += y(r, i) * y(r, j);
        for (std::size_t r = 0; r < rows; ++r) y(r, j) -= proj * y(r, i);
      }
    }
    double top = 0.0;
    for (std::size_t r = 0; r < rows; ++r) top = std::max(top, std::abs(y(r, j)));
    require(top > 0.0, ErrorCode::degenerate, "rank collapse during re-orthonormalisation");
    double sumsq = 0.0;
    for (std::size_t r = 0; r < rows; ++r) sumsq += (y(r, j) / top) * (y(r, j) / top);
    const double norm = top * std::sqrt(sumsq);
    log_diag[j] += std::log(norm);
    for (std::size_t r = 0; r < rows; ++r) y(r, j) /= norm;
  }
}

}  // namespace selfaffine
