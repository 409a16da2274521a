#include <cmath>

#include "doctest.h"
#include "rswalk/config.hpp"
#include "rswalk/error.hpp"
#include "rswalk/hitting.hpp"
#include "rswalk/simulate.hpp"

using namespace rswalk;

namespace {

RegimeModel constant(double p) {
  return RegimeModel::with_specs(Mat::identity(1), {EnvSpec::periodic({p})});
}

double mc_band(const McEstimate& est) {
  return std::max(3.0 * est.std_error, 3.0 / static_cast<double>(est.replicates));
}

}  // namespace

TEST_CASE("trajectories are deterministic and move by one") {
  const auto c = preset("game-d");
  const auto e = c.model.realize({-100, 100}, c.seed);
  const auto a = run(c.model, e, {0, 0}, 5000, 99);
  const auto b = run(c.model, e, {0, 0}, 5000, 99);
  REQUIRE(a.states.size() == 5001);
  for (std::size_t k = 0; k < a.states.size(); ++k) {
    CHECK(a.states[k].x == b.states[k].x);
    CHECK(a.states[k].g == b.states[k].g);
    if (k > 0) CHECK(std::abs(a.states[k].x - a.states[k - 1].x) == 1);
  }
  const auto strided = run(c.model, e, {0, 0}, 5000, 99, 7);
  CHECK(strided.n.back() == 5000);
  for (std::size_t k = 0; k < strided.n.size(); ++k) {
    CHECK(strided.states[k].x == a.states[strided.n[k]].x);
  }
  CHECK(run(c.model, e, {0, 0}, 5000, 100).states.back().x != a.states.back().x);
}

TEST_CASE("regime moves follow the positive entries of Q") {
  const auto c = preset("game-c");
  const auto e = c.model.realize({-100, 100}, c.seed);
  const auto t = run(c.model, e, {2, 0}, 2000, 3);
  for (std::size_t k = 1; k < t.states.size(); ++k) {
    CHECK(c.model.Q()(t.states[k - 1].g, t.states[k].g) > 0.0);
  }
}

TEST_CASE("nearly deterministic walk climbs every step") {
  const auto model = constant(1.0 - 1e-11);
  const auto e = model.realize({0, 0}, 0);
  const auto t = run(model, e, {0, 7}, 1000, 1);
  CHECK(t.states.back().x == 1007);
}

TEST_CASE("single losing game drifts down at the predicted rate") {
  const auto c = preset("game-a");
  const auto e = c.model.realize({-10, 10}, c.seed);
  const auto d = mc_drift(c.model, e, {0, 0}, 10000, 200, c.seed);
  CHECK(d.replicates == 200);
  CHECK(std::abs(d.value - (-20.0)) <= 3.0 * d.std_error);
  CHECK(d.std_error == doctest::Approx(100.0 / std::sqrt(200.0)).epsilon(0.15));
}

TEST_CASE("game c drifts up") {
  const auto c = preset("game-c");
  const auto e = c.model.realize({-10, 10}, c.seed);
  const auto d = mc_drift(c.model, e, {0, 100}, 10000, 200, c.seed);
  CHECK(d.value > 0.0);
}

TEST_CASE("one-step frequencies match the environment") {
  const auto c = preset("game-d");
  const auto e = c.model.realize({-10, 10}, c.seed);
  Rng rng(derive_seed(c.seed, 77));
  const std::size_t n = 1'000'000;
  std::vector<double> ups(2, 0.0), counts(2, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const auto s = step(c.model, e, {0, 3}, rng);
    counts[s.g] += 1;
    if (s.x == 4) ups[s.g] += 1;
  }
  for (std::size_t g = 0; g < 2; ++g) {
    const double p = e.p(g, 3);
    const double freq = ups[g] / counts[g];
    const double se = std::sqrt(p * (1 - p) / counts[g]);
    CHECK(std::abs(freq - p) <= 4 * se);
    CHECK(std::abs(counts[g] / n - 0.5) <= 4 * 0.5 / std::sqrt(static_cast<double>(n)));
  }
}

TEST_CASE("alternating game keeps the parity class") {
  const auto c = preset("game-cprime");
  const auto e = c.model.realize({-10, 10}, c.seed);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto t = run(c.model, e, {1, 0}, 10000, seed);
    const long parity = (static_cast<long>(t.start.g) + t.start.x) % 2;
    for (const auto& s : t.states) CHECK(((static_cast<long>(s.g) + s.x) % 2 + 2) % 2 == parity);
  }
}

TEST_CASE("monte carlo hitting against closed forms and the solver") {
  SUBCASE("symmetric walk hits its neighbour") {
    const auto model = constant(0.5);
    const auto e = model.realize({0, 0}, 0);
    const auto h = mc_hitting(model, e, {0, 1}, 0, 1'000'000, 2000, 5);
    CHECK(h.estimate.value == doctest::Approx(1.0));
    CHECK(h.estimate.replicates + h.estimate.censored == 2000);
    CHECK(h.estimate.censored < 10);
  }
  SUBCASE("upward biased walk returns with probability q/p") {
    // escapes end at the upper edge, where (q/p)^60 is far below the band
    const auto model = constant(0.6);
    const auto e = model.realize({0, 0}, 0);
    const auto h = mc_hitting(model, e, {0, 1}, 0, 1'000'000, 10000, 6, Window{-60, 60});
    CHECK(h.estimate.censored == 0);
    CHECK(std::abs(h.estimate.value - 2.0 / 3.0) <= mc_band(h.estimate));
  }
  SUBCASE("game d against the solver") {
    const auto c = preset("game-d");
    const auto e = c.model.realize({-100, 100}, c.seed);
    const Window w{-40, 40};
    const auto t = solve_window(c.model, e, 0, w, BoundaryMode::Killed);
    const auto h = mc_hitting(c.model, e, {0, 5}, 0, 1'000'000, 4000, 8, w);
    CHECK(std::abs(h.estimate.value - t.f(5)[0]) <= mc_band(h.estimate));
  }
  SUBCASE("window exits count as misses") {
    const auto c = preset("game-c");
    const auto e = c.model.realize({-100, 100}, c.seed);
    const Window w{-8, 8};
    const auto t = solve_window(c.model, e, 0, w, BoundaryMode::Killed);
    const auto h = mc_hitting(c.model, e, {1, 4}, 0, 100000, 4000, 9, w);
    CHECK(h.estimate.censored == 0);
    CHECK(std::abs(h.estimate.value - t.f(4)[1]) <= mc_band(h.estimate));
  }
  CHECK_THROWS_AS(mc_hitting(constant(0.5), constant(0.5).realize({0, 0}, 0), {0, 0}, 0, 10, 1, 1),
                  ConfigError);
}

TEST_CASE("regime at the first hit") {
  SUBCASE("single regime is a point mass") {
    const auto model = constant(0.4);
    const auto e = model.realize({0, 0}, 0);
    const auto r = regime_at_hit(model, e, {0, 3}, 0, 100000, 200, 4);
    CHECK(r.frequency[0] == 1.0);
  }
  SUBCASE("game d from above matches the rank-one ratios") {
    const auto c = preset("game-d");
    const auto e = c.model.realize({-100, 100}, c.seed);
    const auto closed = rank1_hitting(c.model, e, 0, {0, 0});
    const auto r = regime_at_hit(c.model, e, {1, 3}, 0, 1'000'000, 6000, 10, Window{-60, 60});
    REQUIRE(r.hits > 1000);
    for (std::size_t b = 0; b < 2; ++b) {
      CHECK(std::abs(r.frequency[b] - closed.regime_from_above[b]) <= 3 * r.std_error[b]);
    }
  }
}

TEST_CASE("non-regenerable environments stop the walk at the window edge") {
  const auto c = preset("gauss-map");
  const auto e = c.model.realize({-5, 5}, c.seed);
  CHECK_THROWS_AS(run(c.model, e, {0, 0}, 100000, 1), WindowError);
}

TEST_CASE("replicate seeding is independent of scheduling") {
  const auto c = preset("game-b");
  const auto e = c.model.realize({0, 0}, c.seed);
  const auto a = final_displacements(c.model, e, {0, 0}, 500, 64, 42);
  const auto b = final_displacements(c.model, e, {0, 0}, 500, 64, 42);
  CHECK(a == b);
  for (std::size_t r = 0; r < 64; r += 13) {
    const auto t = run(c.model, e, {0, 0}, 500, derive_seed(42, r));
    CHECK(static_cast<double>(t.states.back().x) == a[r]);
  }
}
