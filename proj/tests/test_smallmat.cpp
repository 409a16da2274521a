#include <cmath>
#include <random>

#include "doctest.h"
#include "rswalk/error.hpp"
#include "rswalk/smallmat.hpp"

using namespace rswalk;

namespace {

Mat random_mat(std::size_t r, std::size_t c, std::mt19937_64& gen) {
  std::normal_distribution<double> nd;
  Mat a(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) a(i, j) = nd(gen);
  return a;
}

}  // namespace

TEST_CASE("basic matrix algebra") {
  const Mat a(2, 2, {1, 2, 3, 4});
  const Mat b(2, 2, {0, 1, 1, 0});
  CHECK(a * b == Mat(2, 2, {2, 1, 4, 3}));
  CHECK(a + b == Mat(2, 2, {1, 3, 4, 4}));
  CHECK(a.transpose() == Mat(2, 2, {1, 3, 2, 4}));
  CHECK(a.trace() == 5.0);
  CHECK(Mat::identity(3).block(1, 1, 2, 2) == Mat::identity(2));
  CHECK_THROWS_AS(Mat(2, 2, {1, 2, 3}), std::invalid_argument);
  CHECK_THROWS_AS(a * Mat(3, 1), std::invalid_argument);
}

TEST_CASE("solve and inverse") {
  const Mat b(3, 2, {1, 2, 3, 4, 5, 6});
  CHECK(max_abs_diff(solve(Mat::identity(3), b), b) == 0.0);
  CHECK(max_abs_diff(inverse(Mat(2, 2, {2, 0, 0, 4})), Mat(2, 2, {0.5, 0, 0, 0.25})) < 1e-15);
  CHECK_THROWS_AS(solve(Mat(2, 2, {1, 2, 2, 4}), Mat(2, 1)), NumericError);
  CHECK(determinant(Mat(2, 2, {1, 2, 2, 4})) == 0.0);

  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = random_mat(6, 6, gen);
    const Mat rhs = random_mat(6, 3, gen);
    const Mat x = solve(a, rhs);
    CHECK(max_abs_diff(a * x, rhs) <= 1e-9 * rhs.max_abs());
    CHECK(max_abs_diff(inverse(a) * a, Mat::identity(6)) < 1e-9);
  }
}

TEST_CASE("qr factorization") {
  auto q1 = qr(Mat::identity(3));
  CHECK(q1.q == Mat::identity(3));
  CHECK(q1.r == Mat::identity(3));
  const std::vector<double> d{2.0, 3.0};
  auto q2 = qr(Mat::diagonal(d));
  CHECK(max_abs_diff(q2.q, Mat::identity(2)) == 0.0);
  CHECK(max_abs_diff(q2.r, Mat::diagonal(d)) == 0.0);

  std::mt19937_64 gen(11);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat a = random_mat(6, 6, gen);
    const auto f = qr(a);
    CHECK_FALSE(f.rank_deficient);
    CHECK(max_abs_diff(f.q * f.r, a) <= 1e-10 * a.max_abs());
    CHECK(max_abs_diff(f.q.transpose() * f.q, Mat::identity(6)) <= 1e-10);
    double prod = 1.0;
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(f.r(i, i) >= 0.0);
      for (std::size_t j = 0; j < i; ++j) CHECK(f.r(i, j) == 0.0);
      prod *= f.r(i, i);
    }
    CHECK(std::abs(prod - std::abs(determinant(a))) <= 1e-9 * prod);
  }
  const Mat tall = random_mat(7, 3, gen);
  const auto ft = qr(tall);
  CHECK(ft.q.rows() == 7);
  CHECK(ft.r.rows() == 3);
  CHECK(max_abs_diff(ft.q * ft.r, tall) <= 1e-10 * tall.max_abs());
  CHECK(qr(Mat(3, 2, {1, 2, 2, 4, 3, 6})).rank_deficient);
}

TEST_CASE("singular values and rank") {
  const Mat q(3, 3, {0.2, 0.3, 0.5, 0.2, 0.3, 0.5, 0.2, 0.3, 0.5});
  CHECK(numerical_rank(q) == 1);
  CHECK(numerical_rank(Mat::identity(4)) == 4);
  const auto sv = singular_values(Mat(2, 2, {3, 0, 0, -4}));
  CHECK(sv[0] == doctest::Approx(4.0));
  CHECK(sv[1] == doctest::Approx(3.0));
  CHECK(numerical_rank(Mat(2, 3, {1, 2, 3, 2, 4, 6})) == 1);
}

TEST_CASE("least squares recovers exact combinations") {
  const Mat a(3, 2, {1, 0, 0, 1, 1, 1});
  const Mat x(2, 1, {0.25, 0.75});
  CHECK(max_abs_diff(least_squares(a, a * x), x) < 1e-14);
}

TEST_CASE("eigenvalues of simple matrices") {
  const std::vector<double> d{3.0, -1.0, 2.0};
  auto e = eigenvalues(Mat::diagonal(d));
  REQUIRE(e.size() == 3);
  CHECK(e.values[0].real() == doctest::Approx(3.0));
  CHECK(e.values[1].real() == doctest::Approx(2.0));
  CHECK(e.values[2].real() == doctest::Approx(-1.0));

  // companion matrix of (x-2)(x-3) = x^2 - 5x + 6
  auto c = eigenvalues(Mat(2, 2, {5, -6, 1, 0}));
  CHECK(std::abs(c.values[0] - Complex(3, 0)) < 1e-12);
  CHECK(std::abs(c.values[1] - Complex(2, 0)) < 1e-12);

  auto rot = eigenvalues(Mat(2, 2, {0, -1, 1, 0}));
  CHECK(std::abs(rot.values[0] - Complex(0, 1)) < 1e-12);
  CHECK(std::abs(rot.values[1] - Complex(0, -1)) < 1e-12);

  auto jordan = eigenvalues(Mat(2, 2, {2, -1, 1, 0}));
  CHECK(std::abs(jordan.values[0] - 1.0) < 1e-7);
  CHECK(std::abs(jordan.values[1] - 1.0) < 1e-7);
}

TEST_CASE("eigenvalue invariants on random matrices") {
  std::mt19937_64 gen(3);
  for (std::size_t n : {3u, 4u, 6u, 8u, 12u, 16u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Mat a = random_mat(n, n, gen);
      const auto e = eigenvalues(a);
      REQUIRE(e.size() == n);
      Complex sum = 0.0, prod = 1.0;
      for (auto z : e.values) {
        sum += z;
        prod *= z;
      }
      const double tr = a.trace();
      const double det = determinant(a);
      CHECK(std::abs(sum - tr) <= 1e-8 * std::max(1.0, std::abs(tr)));
      CHECK(std::abs(prod - det) <= 1e-8 * std::max(1.0, std::abs(det)));
      for (std::size_t k = 0; k + 1 < n; ++k) {
        CHECK(std::abs(e.values[k]) >= std::abs(e.values[k + 1]));
      }
      // conjugate pairs are present for real input
      for (auto z : e.values) {
        if (std::abs(z.imag()) < 1e-12) continue;
        bool found = false;
        for (auto w : e.values) found = found || std::abs(w - std::conj(z)) < 1e-8;
        CHECK(found);
      }
    }
  }
}

TEST_CASE("eigenvalues of widely scaled spectra") {
  const std::vector<double> d{3e4, 1.0, 1e-5, 0.5};
  Mat s(4, 4, {1, 2, 0, 1, 0, 1, 3, 0, 1, 0, 1, 2, 2, 1, 0, 1});
  const Mat a = s * Mat::diagonal(d) * inverse(s);
  const auto e = eigenvalues(a);
  CHECK(e.values[0].real() == doctest::Approx(3e4).epsilon(1e-8));
  CHECK(e.values[1].real() == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(e.values[2].real() == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(e.values[3].real() == doctest::Approx(1e-5).epsilon(1e-6));
}

TEST_CASE("non-finite input is rejected") {
  Mat a = Mat::identity(2);
  a(0, 1) = std::nan("");
  CHECK_THROWS_AS(eigenvalues(a), NumericError);
}
