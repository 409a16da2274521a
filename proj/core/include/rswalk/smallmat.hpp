#pragma once

// Dense real linear algebra for the small matrices (at most ~16x16) that
// appear in transfer-matrix products: products, LU solves, Householder QR,
// Jacobi singular values and Hessenberg/Francis eigenvalues.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace rswalk {

/// Row-major dense matrix with value semantics.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Builds a matrix from row-major entries; the count must equal rows*cols.
  Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> row_major);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static Mat identity(std::size_t n);
  static Mat diagonal(std::span<const double> d);
  static Mat column(std::span<const double> v);
  static Mat ones(std::size_t rows, std::size_t cols = 1);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  bool square() const noexcept { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> data() const noexcept { return data_; }
  std::span<double> data() noexcept { return data_; }

  Mat transpose() const;
  Mat block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const;
  void set_block(std::size_t r0, std::size_t c0, const Mat& b);
  std::vector<double> row(std::size_t r) const;
  std::vector<double> col(std::size_t c) const;

  double max_abs() const noexcept;
  double trace() const;
  bool all_finite() const noexcept;

  Mat& operator+=(const Mat& b);
  Mat& operator-=(const Mat& b);
  Mat& operator*=(double s) noexcept;

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator*(const Mat& a, const Mat& b);
  friend bool operator==(const Mat&, const Mat&) = default;

  std::string to_string(int precision = 6) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Largest absolute entrywise difference; shapes must match.
double max_abs_diff(const Mat& a, const Mat& b);

/// Solves a*x = b by LU with partial pivoting. Throws NumericError(Singular)
/// when a pivot falls below 1e-14 times the largest entry of a.
Mat solve(const Mat& a, const Mat& b);
Mat inverse(const Mat& a);
double determinant(const Mat& a);

struct QrResult {
  Mat q;  ///< rows x cols with orthonormal columns
  Mat r;  ///< cols x cols upper triangular, nonnegative diagonal
  bool rank_deficient = false;
};

/// Thin Householder QR of a tall or square matrix (rows >= cols).
QrResult qr(const Mat& a);

/// Singular values in descending order (one-sided Jacobi).
std::vector<double> singular_values(const Mat& a);

/// Number of singular values above rel_tol times the largest one.
std::size_t numerical_rank(const Mat& a, double rel_tol = 1e-9);

/// Least-squares solution of a*x = b for a with full column rank.
Mat least_squares(const Mat& a, const Mat& b);

using Complex = std::complex<double>;

/// Eigenvalues with multiplicity, sorted by descending modulus, then
/// descending real part, then descending imaginary part.
struct EigenSet {
  std::vector<Complex> values;

  std::size_t size() const noexcept { return values.size(); }
  std::vector<double> moduli() const;
};

/// Eigenvalues of a square matrix via balancing, Hessenberg reduction and
/// the Francis double-shift QR iteration. Throws NumericError(NoConvergence)
/// when the iteration cap is exceeded.
EigenSet eigenvalues(const Mat& a);

void sort_eigenvalues(std::vector<Complex>& values);

}  // namespace rswalk
