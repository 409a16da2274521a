#include "rswalk/smallmat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <iomanip>

#include "rswalk/error.hpp"

namespace rswalk {

Mat::Mat(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::initializer_list<double> row_major)
    : Mat(rows, cols, std::vector<double>(row_major)) {}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) {
    throw std::invalid_argument("Mat: entry count does not match shape");
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::diagonal(std::span<const double> d) {
  Mat m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

Mat Mat::column(std::span<const double> v) {
  return Mat(v.size(), 1, std::vector<double>(v.begin(), v.end()));
}

Mat Mat::ones(std::size_t rows, std::size_t cols) { return Mat(rows, cols, 1.0); }

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
  if (r0 + nr > rows_ || c0 + nc > cols_) throw std::out_of_range("Mat::block");
  Mat b(nr, nc);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
  return b;
}

void Mat::set_block(std::size_t r0, std::size_t c0, const Mat& b) {
  if (r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_) throw std::out_of_range("Mat::set_block");
  for (std::size_t r = 0; r < b.rows_; ++r)
    for (std::size_t c = 0; c < b.cols_; ++c) (*this)(r0 + r, c0 + c) = b(r, c);
}

std::vector<double> Mat::row(std::size_t r) const {
  return {data_.begin() + static_cast<std::ptrdiff_t>(r * cols_),
          data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols_)};
}

std::vector<double> Mat::col(std::size_t c) const {
  std::vector<double> v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

double Mat::max_abs() const noexcept {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::abs(x));
  return m;
}

double Mat::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

bool Mat::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
}

Mat& Mat::operator+=(const Mat& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) throw std::invalid_argument("Mat +: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += b.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& b) {
  if (rows_ != b.rows_ || cols_ != b.cols_) throw std::invalid_argument("Mat -: shape mismatch");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= b.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) noexcept {
  for (double& x : data_) x *= s;
  return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols_ != b.rows_) throw std::invalid_argument("Mat *: shape mismatch");
  Mat c(a.rows_, b.cols_);
  for (std::size_t i = 0; i < a.rows_; ++i) {
    for (std::size_t k = 0; k < a.cols_; ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

std::string Mat::to_string(int precision) const {
  std::ostringstream os;
  os << std::setprecision(precision);
  for (std::size_t r = 0; r < rows_; ++r) {
    os << (r == 0 ? "[" : " ");
    for (std::size_t c = 0; c < cols_; ++c) os << (c ? ", " : "") << (*this)(r, c);
    os << (r + 1 == rows_ ? "]" : ";\n");
  }
  return os.str();
}

double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double m = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) {
    m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  }
  return m;
}

namespace {

struct Lu {
  Mat lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

Lu lu_decompose(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("LU: matrix must be square");
  const std::size_t n = a.rows();
  Lu f{a, std::vector<std::size_t>(n), 1, false};
  std::iota(f.perm.begin(), f.perm.end(), std::size_t{0});
  const double scale = a.max_abs();
  const double tiny = 1e-14 * (scale > 0 ? scale : 1.0);
  Mat& m = f.lu;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(m(i, k)) > std::abs(m(piv, k))) piv = i;
    if (std::abs(m(piv, k)) <= tiny) {
      f.singular = true;
      continue;
    }
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(f.perm[k], f.perm[piv]);
      f.sign = -f.sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = m(i, k) / m(k, k);
      m(i, k) = l;
      for (std::size_t j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
    }
  }
  return f;
}

}  // namespace

Mat solve(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("solve: shape mismatch");
  const Lu f = lu_decompose(a);
  if (f.singular) throw NumericError(NumericError::Kind::Singular, "solve: singular matrix");
  const std::size_t n = a.rows();
  Mat x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b(f.perm[i], c);
      for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= f.lu(i, j) * x(j, c);
      x(i, c) = s / f.lu(i, i);
    }
  }
  return x;
}

Mat inverse(const Mat& a) { return solve(a, Mat::identity(a.rows())); }

double determinant(const Mat& a) {
  const Lu f = lu_decompose(a);
  if (f.singular) return 0.0;
  double d = f.sign;
  for (std::size_t i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
  return d;
}

QrResult qr(const Mat& a) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m < n) throw std::invalid_argument("qr: requires rows >= cols");
  Mat r = a;
  std::vector<std::vector<double>> vs;
  vs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> v(m - k);
    double norm = 0.0;
    for (std::size_t i = k; i < m; ++i) {
      v[i - k] = r(i, k);
      norm += v[i - k] * v[i - k];
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      vs.emplace_back();
      continue;
    }
    const double alpha = v[0] > 0 ? -norm : norm;
    v[0] -= alpha;
    double vnorm = 0.0;
    for (double x : v) vnorm += x * x;
    vnorm = std::sqrt(vnorm);
    if (vnorm == 0.0) {
      vs.emplace_back();
      continue;
    }
    for (double& x : v) x /= vnorm;
    for (std::size_t j = k; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * r(i, j);
      for (std::size_t i = k; i < m; ++i) r(i, j) -= 2.0 * dot * v[i - k];
    }
    vs.push_back(std::move(v));
  }

  Mat q(m, n);
  for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    const auto& v = vs[k];
    if (v.empty()) continue;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k; i < m; ++i) dot += v[i - k] * q(i, j);
      for (std::size_t i = k; i < m; ++i) q(i, j) -= 2.0 * dot * v[i - k];
    }
  }

  QrResult out{std::move(q), Mat(n, n), false};
  const double tiny = 1e-12 * std::max(a.max_abs(), std::numeric_limits<double>::min());
  for (std::size_t i = 0; i < n; ++i) {
    const double sgn = r(i, i) < 0 ? -1.0 : 1.0;
    for (std::size_t j = i; j < n; ++j) out.r(i, j) = sgn * r(i, j);
    if (sgn < 0)
      for (std::size_t row = 0; row < m; ++row) out.q(row, i) = -out.q(row, i);
    if (std::abs(out.r(i, i)) <= tiny) out.rank_deficient = true;
  }
  return out;
}

std::vector<double> singular_values(const Mat& a) {
  Mat w = a.rows() >= a.cols() ? a : a.transpose();
  const std::size_t m = w.rows();
  const std::size_t n = w.cols();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (int sweep = 0; sweep < 100; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
          alpha += w(k, i) * w(k, i);
          beta += w(k, j) * w(k, j);
          gamma += w(k, i) * w(k, j);
        }
        if (gamma == 0.0 || std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < m; ++k) {
          const double wi = w(k, i);
          const double wj = w(k, j);
          w(k, i) = c * wi - s * wj;
          w(k, j) = s * wi + c * wj;
        }
      }
    }
    if (!rotated) break;
  }
  std::vector<double> sv(n);
  for (std::size_t j = 0; j < n; ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += w(k, j) * w(k, j);
    sv[j] = std::sqrt(s);
  }
  std::sort(sv.begin(), sv.end(), std::greater<>());
  return sv;
}

std::size_t numerical_rank(const Mat& a, double rel_tol) {
  const auto sv = singular_values(a);
  if (sv.empty() || sv.front() == 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(
      sv.begin(), sv.end(), [&](double s) { return s > rel_tol * sv.front(); }));
}

Mat least_squares(const Mat& a, const Mat& b) {
  const QrResult f = qr(a);
  if (f.rank_deficient) {
    throw NumericError(NumericError::Kind::RankDeficient, "least_squares: rank-deficient system");
  }
  const Mat qtb = f.q.transpose() * b;
  const std::size_t n = a.cols();
  Mat x(n, b.cols());
  for (std::size_t c = 0; c < b.cols(); ++c) {
    for (std::size_t i = n; i-- > 0;) {
      double s = qtb(i, c);
      for (std::size_t j = i + 1; j < n; ++j) s -= f.r(i, j) * x(j, c);
      x(i, c) = s / f.r(i, i);
    }
  }
  return x;
}

std::vector<double> EigenSet::moduli() const {
  std::vector<double> m(values.size());
  std::transform(values.begin(), values.end(), m.begin(), [](Complex z) { return std::abs(z); });
  return m;
}

void sort_eigenvalues(std::vector<Complex>& values) {
  std::stable_sort(values.begin(), values.end(), [](Complex a, Complex b) {
    const double ma = std::abs(a), mb = std::abs(b);
    if (ma != mb) return ma > mb;
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

namespace {

void balance(Mat& a) {
  constexpr double radix = 2.0;
  constexpr double sqrdx = radix * radix;
  const std::size_t n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (std::size_t i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      const double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sqrdx;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sqrdx;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        g = 1.0 / f;
        for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
        for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

void hessenberg(Mat& a) {
  const std::size_t n = a.rows();
  if (n < 3) return;
  for (std::size_t k = 0; k + 2 < n; ++k) {
    std::vector<double> v(n - k - 1);
    double norm = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      v[i - k - 1] = a(i, k);
      norm += a(i, k) * a(i, k);
    }
    norm = std::sqrt(norm);
    if (norm == 0.0) continue;
    const double alpha = v[0] > 0 ? -norm : norm;
    v[0] -= alpha;
    double vnorm = 0.0;
    for (double x : v) vnorm += x * x;
    vnorm = std::sqrt(vnorm);
    if (vnorm == 0.0) continue;
    for (double& x : v) x /= vnorm;
    for (std::size_t j = 0; j < n; ++j) {
      double dot = 0.0;
      for (std::size_t i = k + 1; i < n; ++i) dot += v[i - k - 1] * a(i, j);
      for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= 2.0 * dot * v[i - k - 1];
    }
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j - k - 1];
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= 2.0 * dot * v[j - k - 1];
    }
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

double sign_of(double magnitude, double sign_source) {
  return sign_source >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Francis double-shift QR on an upper Hessenberg matrix.
std::vector<Complex> hessenberg_qr(Mat& a) {
  const int n = static_cast<int>(a.rows());
  std::vector<Complex> w(static_cast<std::size_t>(n));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int max_its = 60;
  auto A = [&a](int r, int c) -> double& {
    return a(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  };

  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(A(i, j));

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l = 0;
    do {
      for (l = nn; l > 0; --l) {
        double s = std::abs(A(l - 1, l - 1)) + std::abs(A(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(A(l, l - 1)) <= eps * s) {
          A(l, l - 1) = 0.0;
          break;
        }
      }
      double x = A(nn, nn);
      if (l == nn) {
        w[static_cast<std::size_t>(nn--)] = x + t;
      } else {
        double y = A(nn - 1, nn - 1);
        double ww = A(nn, nn - 1) * A(nn - 1, nn);
        if (l == nn - 1) {
          const double p = 0.5 * (y - x);
          const double q = p * p + ww;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + sign_of(z, p);
            w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
            if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
          } else {
            w[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
            w[static_cast<std::size_t>(nn - 1)] = std::conj(w[static_cast<std::size_t>(nn)]);
          }
          nn -= 2;
        } else {
          if (its == max_its) {
            throw NumericError(NumericError::Kind::NoConvergence,
                               "eigenvalues: QR iteration did not converge");
          }
          if (its > 0 && its % 10 == 0) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) A(i, i) -= x;
            const double s = std::abs(A(nn, nn - 1)) + std::abs(A(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
          }
          ++its;
          int m = nn - 2;
          double p = 0, q = 0, r = 0, z = 0;
          for (; m >= l; --m) {
            z = A(m, m);
            r = x - z;
            double s = y - z;
            p = (r * s - ww) / A(m + 1, m) + A(m, m + 1);
            q = A(m + 1, m + 1) - z - r - s;
            r = A(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(A(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(A(m - 1, m - 1)) + std::abs(z) +
                                            std::abs(A(m + 1, m + 1)));
            if (u <= eps * v) break;
          }
          for (int i = m; i < nn - 1; ++i) {
            A(i + 2, i) = 0.0;
            if (i != m) A(i + 2, i - 1) = 0.0;
          }
          for (int k = m; k < nn; ++k) {
            if (k != m) {
              p = A(k, k - 1);
              q = A(k + 1, k - 1);
              r = 0.0;
              if (k + 1 != nn) r = A(k + 2, k - 1);
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            const double s = sign_of(std::sqrt(p * p + q * q + r * r), p);
            if (s == 0.0) continue;
            if (k == m) {
              if (l != m) A(k, k - 1) = -A(k, k - 1);
            } else {
              A(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
              p = A(k, j) + q * A(k + 1, j);
              if (k + 1 != nn) {
                p += r * A(k + 2, j);
                A(k + 2, j) -= p * z;
              }
              A(k + 1, j) -= p * y;
              A(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
              p = x * A(i, k) + y * A(i, k + 1);
              if (k + 1 != nn) {
                p += z * A(i, k + 2);
                A(i, k + 2) -= p * r;
              }
              A(i, k + 1) -= p * q;
              A(i, k) -= p;
            }
          }
        }
      }
    } while (l + 1 < nn);
  }
  return w;
}

}  // namespace

EigenSet eigenvalues(const Mat& a) {
  if (!a.square()) throw std::invalid_argument("eigenvalues: matrix must be square");
  if (!a.all_finite()) {
    throw NumericError(NumericError::Kind::Overflow, "eigenvalues: non-finite entries");
  }
  EigenSet out;
  if (a.rows() == 0) return out;
  Mat h = a;
  balance(h);
  hessenberg(h);
  out.values = hessenberg_qr(h);
  sort_eigenvalues(out.values);
  return out;
}

}  // namespace rswalk
