#include <cmath>
#include <map>

#include "doctest.h"
#include "rswalk/config.hpp"
#include "rswalk/error.hpp"
#include "rswalk/hitting.hpp"

using namespace rswalk;

namespace {

RegimeModel constant(double p) {
  return RegimeModel::with_specs(Mat::identity(1), {EnvSpec::periodic({p})});
}

// Gambler's ruin on {a, ..., b} for a walk with constant up-probability p:
// probability of reaching b before a from i.
double ruin_up(double p, long a, long b, long i) {
  if (std::abs(p - 0.5) < 1e-15) return static_cast<double>(i - a) / static_cast<double>(b - a);
  const double s = (1 - p) / p;
  return (1 - std::pow(s, static_cast<double>(i - a))) / (1 - std::pow(s, static_cast<double>(b - a)));
}

// Step-by-step propagation of the law of (regime, site, visits) with the
// walk killed outside the window. Returns the mass that has reached k
// visits within depth steps and the mass still undecided.
std::pair<double, double> enumerate_visits(const RegimeModel& model, const EnvRealization& e,
                                           Window w, long target, std::size_t alpha, long start,
                                           std::size_t k, std::size_t depth) {
  const std::size_t m = model.m();
  using State = std::tuple<std::size_t, long, std::size_t>;
  std::map<State, double> law{{{alpha, start, 0}, 1.0}};
  double done = 0.0;
  for (std::size_t step = 0; step < depth; ++step) {
    std::map<State, double> next;
    for (const auto& [s, mass] : law) {
      const auto [g, x, v] = s;
      for (std::size_t h = 0; h < m; ++h) {
        const double qg = model.Q()(g, h);
        if (qg == 0.0) continue;
        const double p = e.p(h, x);
        for (int dir : {1, -1}) {
          const long y = x + dir;
          const double pm = mass * qg * (dir == 1 ? p : 1 - p);
          if (y <= w.lo || y >= w.hi) continue;  // killed at the edges
          const std::size_t nv = v + (y == target ? 1 : 0);
          if (nv >= k) {
            done += pm;
          } else {
            next[{h, y, nv}] += pm;
          }
        }
      }
    }
    law = std::move(next);
  }
  double alive = 0.0;
  for (const auto& [s, mass] : law) alive += mass;
  return {done, alive};
}

}  // namespace

TEST_CASE("symmetric walk: killed window gives the linear ruin profile") {
  const auto model = constant(0.5);
  const auto e = model.realize({-100, 100}, 0);
  const long L = 40;
  const auto t = solve_window(model, e, 0, {-L, L}, BoundaryMode::Killed);
  for (long i = -L; i <= L; ++i) {
    CHECK(t.norm(i) == doctest::Approx(1.0 - std::abs(static_cast<double>(i)) / L).epsilon(1e-12));
  }
  CHECK(t.residual <= 1e-10);
  CHECK(t.U(0, 0) == doctest::Approx(1.0 - 1.0 / L));
}

TEST_CASE("constant bias matches closed-form ruin probabilities") {
  for (double p : {0.4, 0.5, 0.6, 0.75}) {
    CAPTURE(p);
    const auto model = constant(p);
    const auto e = model.realize({-400, 400}, 0);
    const Window w{-60, 90};
    const auto k = solve_window(model, e, 0, w, BoundaryMode::Killed);
    const auto a = solve_window(model, e, 0, w, BoundaryMode::Absorbed);
    for (long i = w.lo; i <= w.hi; ++i) {
      const double exact_k = i > 0 ? 1 - ruin_up(p, 0, w.hi, i) : (i < 0 ? ruin_up(p, w.lo, 0, i) : 1.0);
      CHECK(k.norm(i) == doctest::Approx(exact_k).epsilon(1e-10));
      // absorbed edges count as hits
      CHECK(a.norm(i) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  // far from the edges the killed values approach (q/p)^i
  const auto model = constant(0.6);
  const auto e = model.realize({-400, 400}, 0);
  const auto t = solve_window(model, e, 0, {-10, 300}, BoundaryMode::Killed);
  for (long i = 1; i <= 20; ++i) {
    CHECK(t.norm(i) == doctest::Approx(std::pow(2.0 / 3.0, static_cast<double>(i))).epsilon(1e-10));
  }
}

TEST_CASE("table invariants on the preset models") {
  for (const auto& name : preset_names()) {
    if (name == "gauss-map") continue;
    CAPTURE(name);
    const auto c = preset(name);
    const auto e = c.model.realize({-200, 200}, c.seed);
    const auto k = solve_window(c.model, e, 3, {-60, 60}, BoundaryMode::Killed);
    const auto a = solve_window(c.model, e, 3, {-60, 60}, BoundaryMode::Absorbed);
    CHECK(k.residual <= 1e-10);
    CHECK(a.residual <= 1e-10);
    CHECK(max_abs_diff(k.resolved(3), Mat::identity(c.model.m())) == 0.0);
    for (std::size_t r = 0; r < c.model.m(); ++r) {
      double row = 0.0;
      for (std::size_t b = 0; b < c.model.m(); ++b) {
        CHECK(k.U(r, b) >= 0.0);
        row += k.U(r, b);
      }
      CHECK(row <= 1.0 + 1e-10);
    }
    for (long i = -60; i <= 60; ++i) {
      const auto fk = k.f(i);
      const auto fa = a.f(i);
      for (std::size_t r = 0; r < c.model.m(); ++r) {
        CHECK(fk[r] >= -1e-14);
        CHECK(fk[r] <= fa[r] + 1e-12);
        CHECK(fa[r] <= 1.0 + 1e-10);
        for (std::size_t b = 0; b < c.model.m(); ++b) CHECK(k.resolved(i)(r, b) <= fk[r] + 1e-14);
      }
    }
  }
}

TEST_CASE("window monotonicity") {
  const auto c = preset("game-c");
  const auto e = c.model.realize({-1000, 1000}, c.seed);
  double prev_k = -1.0, prev_a = 2.0;
  for (long L : {30L, 60L, 120L, 240L}) {
    const auto k = solve_window(c.model, e, 0, {-L, L}, BoundaryMode::Killed);
    const auto a = solve_window(c.model, e, 0, {-L, L}, BoundaryMode::Absorbed);
    CHECK(k.norm(10) >= prev_k - 1e-14);
    CHECK(a.norm(10) <= prev_a + 1e-12);
    prev_k = k.norm(10);
    prev_a = a.norm(10);
  }
}

TEST_CASE("game c: starts below the target hit it almost surely") {
  const auto c = preset("game-c");
  const auto e = c.model.realize({-5000, 5000}, c.seed);
  double prev = 0.0;
  for (long L : {60L, 120L, 240L, 480L}) {
    const auto t = solve_window(c.model, e, 0, {-L, L}, BoundaryMode::Killed);
    CHECK(t.norm(-30) >= prev);
    prev = t.norm(-30);
  }
  CHECK(prev > 1.0 - 1e-6);
  const auto br = solve_bracketed(c.model, e, 0, {-30, -1});
  CHECK(br.converged);
  CHECK(br.gap < 1e-4);
}

TEST_CASE("two-level exit probabilities sum to one") {
  for (const char* name : {"game-c", "game-d", "weird-rank2", "counterexample"}) {
    CAPTURE(name);
    const auto c = preset(name);
    const auto e = c.model.realize({-100, 100}, c.seed);
    const auto ex = solve_exit(c.model, e, -25, 25);
    for (std::size_t j = 1; j + 1 < ex.hit_hi_first.size(); ++j) {
      for (std::size_t r = 0; r < c.model.m(); ++r) {
        CHECK(ex.hit_hi_first[j][r] + ex.hit_lo_first[j][r] == doctest::Approx(1.0).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("certain hitting propagates to every lower start") {
  const auto c = preset("game-d");
  const auto e = c.model.realize({-5000, 5000}, c.seed);
  const auto br = solve_bracketed(c.model, e, 0, {-40, -1}, 1e-10);
  REQUIRE(br.converged);
  bool seen = false;
  for (long i = -1; i >= -40; --i) {
    if (std::abs(br.killed.norm(i) - 1.0) <= 1e-9) seen = true;
    if (seen) CHECK(std::abs(br.killed.norm(i) - 1.0) <= 1e-9);
  }
  CHECK(seen);
}

TEST_CASE("k-th visit probabilities") {
  SUBCASE("k = 1 is the hitting probability") {
    const auto c = preset("game-d");
    const auto e = c.model.realize({-100, 100}, c.seed);
    const auto t = solve_window(c.model, e, 0, {-40, 40}, BoundaryMode::Killed);
    for (long i : {-7L, 5L, 20L}) {
      for (std::size_t r = 0; r < 2; ++r) CHECK(kth_visit(t, r, i, 1) == doctest::Approx(t.f(i)[r]));
    }
    CHECK_THROWS_AS(kth_visit(t, 0, 1, 0), ConfigError);
  }
  SUBCASE("stochastic return matrix gives k-independent values") {
    const auto c = preset("game-d");
    const auto e = c.model.realize({-100, 100}, c.seed);
    const auto t = solve_window(c.model, e, 0, {-40, 40}, BoundaryMode::Absorbed);
    for (std::size_t k = 1; k <= 6; ++k) CHECK(kth_visit(t, 1, -5, k) == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("symmetric walk agrees with exhaustive enumeration") {
    const auto model = constant(0.5);
    const auto e = model.realize({-10, 10}, 0);
    const Window w{-4, 4};  // interior sites -3..3
    const auto t = solve_window(model, e, 0, w, BoundaryMode::Killed);
    for (long i : {-3L, -1L, 0L, 2L}) {
      double prev = 1.0;
      for (std::size_t k = 1; k <= 4; ++k) {
        const double v = kth_visit(t, 0, i, k);
        CHECK(v <= prev + 1e-15);
        prev = v;
        const auto [done, alive] = enumerate_visits(model, e, w, 0, 0, i, k, 12);
        CHECK(v >= done - 1e-12);
        CHECK(v <= done + alive + 1e-12);
        // deeper enumeration closes the gap
        const auto [d2, a2] = enumerate_visits(model, e, w, 0, 0, i, k, 200);
        CHECK(v == doctest::Approx(d2).epsilon(1e-9));
        CHECK(a2 < 1e-9);
      }
    }
  }
  SUBCASE("two regimes agree with enumeration") {
    const auto c = preset("weird-rank2");
    const auto e = c.model.realize({-10, 10}, c.seed);
    const Window w{-4, 4};
    const auto t = solve_window(c.model, e, 1, w, BoundaryMode::Killed);
    for (std::size_t r = 0; r < 3; ++r) {
      for (std::size_t k = 1; k <= 3; ++k) {
        const auto [done, alive] = enumerate_visits(c.model, e, w, 1, r, -2, k, 150);
        CHECK(alive < 1e-9);
        CHECK(kth_visit(t, r, -2, k) == doctest::Approx(done).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("gamma estimates") {
  SUBCASE("biased walk") {
    const auto model = constant(0.6);
    const auto e = model.realize({-2000, 2000}, 0);
    const auto plus = estimate_gamma(model, e, Direction::Plus);
    const auto minus = estimate_gamma(model, e, Direction::Minus);
    CHECK(plus.gamma == doctest::Approx(std::log(2.0 / 3.0)).epsilon(0.05));
    CHECK(std::abs(minus.gamma) < 1e-6);
    CHECK(minus.used_midpoint);
    CHECK(std::max(plus.gamma, minus.gamma) == doctest::Approx(0.0));
    CHECK(plus.log_norm.size() == 200);
  }
  SUBCASE("symmetric walk") {
    const auto model = constant(0.5);
    const auto e = model.realize({-2000, 2000}, 0);
    CHECK(std::abs(estimate_gamma(model, e, Direction::Plus).gamma) < 0.01);
    CHECK(std::abs(estimate_gamma(model, e, Direction::Minus).gamma) < 0.01);
  }
  SUBCASE("game c drifts up") {
    const auto c = preset("game-c");
    const auto e = c.model.realize({-2000, 2000}, c.seed);
    const auto plus = estimate_gamma(c.model, e, Direction::Plus);
    const auto minus = estimate_gamma(c.model, e, Direction::Minus);
    CHECK(plus.gamma < -0.01);
    CHECK(std::abs(minus.gamma) < 1e-6);
  }
  CHECK_THROWS_AS(estimate_gamma(constant(0.5), constant(0.5).realize({-10, 10}, 0), Direction::Plus, 3),
                  ConfigError);
}

TEST_CASE("subadditivity of hitting norms") {
  {
    const auto model = constant(0.4);
    const auto e = model.realize({-1000, 1000}, 0);
    const auto r = subadditivity_check(model, e, 0, 8);
    CHECK(r.holds);
    CHECK(r.lhs_plus == doctest::Approx(r.rhs_plus).epsilon(1e-8));
  }
  {
    const auto c = preset("game-c");
    const auto e = c.model.realize({-1000, 1000}, c.seed);
    const auto r1 = subadditivity_check(c.model, e, 0, 1);
    CHECK(r1.lhs_minus == doctest::Approx(r1.rhs_minus));
    CHECK(r1.lhs_plus == doctest::Approx(r1.rhs_plus));
    const auto r6 = subadditivity_check(c.model, e, 0, 6);
    CHECK(r6.holds);
    CHECK(r6.lhs_plus < r6.rhs_plus);
  }
}

TEST_CASE("rank one closed forms") {
  const auto c = preset("game-d");
  const auto e = c.model.realize({-300, 300}, c.seed);
  const auto r = rank1_hitting(c.model, e, 0, {0, 2});
  CHECK(r.effective_p[0] == doctest::Approx(0.299).epsilon(1e-12));
  CHECK(r.effective_p[1] == doctest::Approx(0.624).epsilon(1e-12));
  CHECK(r.effective_p[2] == doctest::Approx(0.624).epsilon(1e-12));
  // regime-resolved solver output, normalized, matches the closed form
  const auto t = solve_window(c.model, e, 0, {-100, 100}, BoundaryMode::Killed);
  for (long i : {1L, 4L, 9L}) {
    for (std::size_t a = 0; a < 2; ++a) {
      const double f = t.f(i)[a];
      for (std::size_t b = 0; b < 2; ++b) {
        CHECK(t.resolved(i)(a, b) / f == doctest::Approx(r.regime_from_above[b]).epsilon(1e-10));
      }
    }
  }
  for (long i : {-1L, -6L}) {
    const double f = t.f(i)[0];
    for (std::size_t b = 0; b < 2; ++b) {
      CHECK(t.resolved(i)(0, b) / f == doctest::Approx(r.regime_from_below[b]).epsilon(1e-10));
    }
  }
  const auto same = RegimeModel(Mat(2, 2, {0.3, 0.7, 0.3, 0.7}),
                                {EnvSpec::periodic({0.45, 0.6})}, {0, 0});
  const auto rs = rank1_hitting(same, same.realize({-5, 5}, 0), 0, {0, 0});
  CHECK(rs.regime_from_above[0] == doctest::Approx(0.3));
  CHECK(rs.regime_from_below[1] == doctest::Approx(0.7));
  CHECK_THROWS_AS(rank1_hitting(preset("game-c").model, e, 0, {0, 0}), ConfigError);
}

TEST_CASE("alternating counterexample series") {
  const auto c = preset("counterexample");
  const auto e = c.model.realize({-10, 10}, c.seed);
  const auto a = counterexample_series(c.model, e, 0);
  CHECK(a.period == 2);
  CHECK(a.rho[0] == doctest::Approx(0.51 / 0.49));
  CHECK(a.lambda == doctest::Approx(0.9888).epsilon(5e-4));
  CHECK(a.S.finite);
  CHECK(a.S.tail_bound < 1e-12);
  CHECK(a.verdict == Limit::PlusInfinity);
  // closed-form series sum: (1 + rho_1) / (1 - lambda)
  CHECK(a.S.value == doctest::Approx((1 + a.rho[1]) / (1 - a.lambda)).epsilon(1e-10));

  const auto b = counterexample_series(c.model, e, 1);
  CHECK(b.lambda == doctest::Approx(1.1276).epsilon(5e-4));
  CHECK(b.verdict == Limit::MinusInfinity);
  CHECK(b.F.finite);
  CHECK_FALSE(b.S.finite);

  const auto te = e.shift(1);
  CHECK(counterexample_series(c.model, te, 0).verdict == Limit::MinusInfinity);
  CHECK(counterexample_series(c.model, te, 1).verdict == Limit::PlusInfinity);

  const RegimeModel fair(Mat(2, 2, {0, 1, 1, 0}), {EnvSpec::periodic({0.5})}, {0, 0});
  CHECK(counterexample_series(fair, fair.realize({0, 0}, 0), 0).verdict == Limit::Boundary);
  CHECK_THROWS_AS(counterexample_series(preset("game-d").model, e, 0), ConfigError);
}
