#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rswalk/envgen.hpp"
#include "rswalk/error.hpp"

using namespace rswalk;

TEST_CASE("periodic realization") {
  const auto spec = EnvSpec::periodic({0.099, 0.749, 0.749});
  const auto t = realize(spec, {0, 5}, 1);
  const double want[] = {0.099, 0.749, 0.749, 0.099, 0.749, 0.749};
  for (long i = 0; i <= 5; ++i) CHECK(t.at(i) == want[i]);
  CHECK(t.at(-1) == 0.749);
  CHECK(t.at(-3) == 0.099);

  const auto other = realize(spec, {0, 5}, 99);
  for (long i = -10; i <= 10; ++i) CHECK(other.at(i) == t.at(i));

  const auto c = realize(EnvSpec::periodic({0.499}), {-100, 100}, 5);
  for (long i = -100; i <= 100; ++i) CHECK(c.at(i) == 0.499);
}

TEST_CASE("shift equivariance") {
  const auto spec = EnvSpec::periodic({0.2, 0.3, 0.4});
  const auto t = realize(spec, {0, 20}, 0);
  for (long i = -5; i < 20; ++i) {
    CHECK(t.shifted(3).at(i) == t.at(i));
    CHECK(t.shifted(0).at(i) == t.at(i));
    CHECK(t.shifted(1).at(i) == t.at(i + 1));
  }

  const auto iid = realize(EnvSpec::iid({0.3, 0.6}, {0.25, 0.75}), {0, 100}, 42);
  for (long i = -50; i < 50; ++i) CHECK(iid.shifted(1).at(i) == iid.at(i + 1));

  const auto g = realize(EnvSpec::gauss_map(), {0, 100}, 42);
  for (long i = 0; i < 99; ++i) CHECK(g.shifted(1).at(i) == g.at(i + 1));
  CHECK(g.shifted(5).window() == Window{-5, 95});
  CHECK_THROWS_AS(g.shifted(1).at(100), WindowError);
  CHECK_THROWS_AS(g.shifted(500), WindowError);
}

TEST_CASE("iid realization is deterministic and uses the law's support") {
  const auto spec = EnvSpec::iid({0.3, 0.6}, {0.25, 0.75});
  const auto a = realize(spec, {0, 9999}, 7);
  const auto b = realize(spec, {0, 9999}, 7);
  const auto c = realize(spec, {0, 9999}, 8);
  int low = 0, diff = 0;
  for (long i = 0; i < 10000; ++i) {
    CHECK(a.at(i) == b.at(i));
    CHECK((a.at(i) == 0.3 || a.at(i) == 0.6));
    low += a.at(i) == 0.3;
    diff += a.at(i) != c.at(i);
  }
  CHECK(std::abs(low / 10000.0 - 0.25) < 4 * std::sqrt(0.25 * 0.75 / 10000));
  CHECK(diff > 1000);
}

TEST_CASE("gauss map orbit") {
  const auto g = realize(EnvSpec::gauss_map(), {0, 0}, 3);
  CHECK(g.at(0) > 0.0);
  CHECK(g.at(0) < 1.0);

  const auto orbit = realize(EnvSpec::gauss_map(), {-50, 2000}, 11);
  for (long i = -50; i < 2000; ++i) {
    const double x = orbit.at(i);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    bool restart = false;
    for (long r : orbit.restarts()) restart = restart || r == i + 1;
    if (!restart) CHECK(orbit.at(i + 1) == 1.0 / x - std::floor(1.0 / x));
  }
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(EnvSpec::periodic({}), ConfigError);
  CHECK_THROWS_AS(EnvSpec::periodic({0.5, 1.0}), ConfigError);
  CHECK_THROWS_AS(EnvSpec::periodic({0.0}), ConfigError);
  CHECK_THROWS_AS(EnvSpec::periodic({1e-13}), ConfigError);
  CHECK_THROWS_AS(EnvSpec::iid({0.3, 0.6}, {0.5, 0.6}), ConfigError);
  CHECK_THROWS_AS(EnvSpec::iid({0.3, 0.6}, {1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(EnvSpec::iid({0.3}, {0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(realize(EnvSpec::periodic({0.5}), {3, 2}, 0), ConfigError);
}

TEST_CASE("ergodic log sigma means") {
  const auto b = ergodic_log_sigma_mean(EnvSpec::periodic({0.099, 0.749, 0.749}), 1, 0);
  const double mu = (1 - 0.099) * (1 - 0.749) * (1 - 0.749) / (0.099 * 0.749 * 0.749);
  CHECK(b.exact);
  CHECK(b.value == doctest::Approx(std::log(mu) / 3.0).epsilon(1e-14));
  CHECK(ergodic_log_sigma_mean(EnvSpec::periodic({0.5}), 1, 0).value == 0.0);

  const auto g = ergodic_log_sigma_mean(EnvSpec::gauss_map(), 1'000'000, 2024);
  CHECK_FALSE(g.exact);
  CHECK(std::abs(g.value - std::numbers::ln2 / 2) < 1e-2);
  CHECK(g.std_error > 0.0);

  const auto iid = ergodic_log_sigma_mean(EnvSpec::iid({0.3, 0.6}, {0.5, 0.5}), 200'000, 5);
  const double exact = 0.5 * std::log(0.7 / 0.3) + 0.5 * std::log(0.4 / 0.6);
  CHECK(std::abs(iid.value - exact) < 4 * iid.std_error);
}

TEST_CASE("realization composed of shared tracks") {
  std::vector<EnvTrack> tracks{realize(EnvSpec::periodic({0.499}), {0, 0}, 0),
                               realize(EnvSpec::periodic({0.099, 0.749, 0.749}), {0, 0}, 0)};
  EnvRealization e(tracks, {0, 0, 1, 1});
  CHECK(e.regimes() == 4);
  CHECK(e.period() == 3);
  CHECK(e.regenerable());
  CHECK(e.p(1, 7) == 0.499);
  CHECK(e.p(3, 3) == 0.099);
  CHECK(e.sigma(2, 0) == doctest::Approx(0.901 / 0.099));
  const auto te = e.shift(1);
  CHECK(te.p(2, 2) == 0.099);
  CHECK(te.origin_shift() == 1);
}
