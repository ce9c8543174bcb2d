#pragma once

// Small dense real matrices: singular values by one-sided Jacobi, the
// singular value function, and compound (exterior power) matrices.

#include <cstddef>
#include <span>
#include <vector>

namespace selfaffine {

class Matrix {
 public:
  Matrix() = default;
  // Zero matrix.
  Matrix(std::size_t rows, std::size_t cols);
  // Row-major entries; throws invalid_input on size mismatch or non-finite
  // entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static Matrix identity(std::size_t n);
  static Matrix diagonal(std::span<const double> values);
  static Matrix scalar(std::size_t n, double value);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool empty() const noexcept { return entries_.empty(); }

  double operator()(std::size_t r, std::size_t c) const noexcept {
    return entries_[r * cols_ + c];
  }
  double& operator()(std::size_t r, std::size_t c) noexcept {
    return entries_[r * cols_ + c];
  }

  std::span<const double> entries() const noexcept { return entries_; }
  std::span<double> entries() noexcept { return entries_; }

  Matrix transposed() const;
  bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> entries_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double scale, const Matrix& m);
Matrix operator+(const Matrix& a, const Matrix& b);
std::vector<double> matvec(const Matrix& m, std::span<const double> x);

Matrix kronecker(const Matrix& a, const Matrix& b);
// Block-diagonal [a 0; 0 b].
Matrix direct_sum(const Matrix& a, const Matrix& b);

// Descending singular values, length min(rows, cols).
struct SingularSpectrum {
  std::vector<double> values;

  double largest() const noexcept { return values.empty() ? 0.0 : values.front(); }
  double smallest() const noexcept { return values.empty() ? 0.0 : values.back(); }
  // Count of values >= kRankTolerance * largest().
  std::size_t numeric_rank() const noexcept;
};

inline constexpr double kRankTolerance = 1e-12;

SingularSpectrum singular_values(const Matrix& m);
std::size_t numeric_rank(const Matrix& m);
double operator_norm(const Matrix& m);

struct SvfValue {
  double value = 0.0;
  // Set when s exceeds the numeric rank; value is then 0.
  bool degenerate = false;
};

// phi^s(m) = sigma_1 ... sigma_floor(s) * sigma_ceil(s)^(s - floor(s)).
SvfValue svf(const Matrix& m, double s);
double svf_from_spectrum(std::span<const double> sigma, double s);
// Same interpolation on log singular values; needs ceil(s) entries.
double log_svf(std::span<const double> log_sigma, double s);

// Matrix of k x k minors, row and column subsets in lexicographic order.
Matrix compound(const Matrix& m, std::size_t k);
std::size_t binomial(std::size_t n, std::size_t k);
double determinant(const Matrix& m);

// Allocation-free kernels for hot loops. Buffers are row-major.
namespace kernel {

// out = a (r x k) * b (k x c)
void multiply(const double* a, const double* b, double* out, std::size_t r,
              std::size_t k, std::size_t c) noexcept;

// Writes min(rows, cols) descending singular values of the row-major
// matrix m into out. work must hold rows * cols doubles.
void singular_values(const double* m, std::size_t rows, std::size_t cols,
                     double* work, double* out) noexcept;

// Rescales m by an exact power of two when its largest entry leaves
// [2^-100, 2^100]; returns the base-2 exponent removed (0 if untouched).
int renormalize(double* m, std::size_t count) noexcept;

}  // namespace kernel

// Gram-Schmidt on the columns of y (applied twice for stability). Adds
// log|r_jj| to log_diag[j] and leaves y with orthonormal columns.
void orthonormalize_columns(Matrix& y, std::span<double> log_diag);

}  // namespace selfaffine
