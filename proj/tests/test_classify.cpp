#include <cmath>
#include <random>

#include "doctest.h"
#include "rswalk/classify.hpp"
#include "rswalk/error.hpp"

using namespace rswalk;

namespace {

Classification run_preset(std::string_view name) {
  const auto c = preset(name);
  const auto e = c.model.realize(c.window, c.seed);
  return classify_full(c.model, e);
}

}  // namespace

TEST_CASE("mu of the two-valued game") {
  CHECK(std::abs(mu_game_b(0.1, 0.75) - 1.0) <= 1e-12);
  CHECK(mu_verdict(mu_game_b(0.1, 0.75)) == Verdict::Recurrent);
  CHECK(mu_game_b(0.099, 0.749) == doctest::Approx(1.02205).epsilon(1e-5));
  CHECK(mu_verdict(mu_game_b(0.099, 0.749)) == Verdict::TransientMinus);
  CHECK(mu_game_b(0.5, 0.5) == 1.0);
  CHECK(mu_verdict(mu_game_b(0.2, 0.8)) == Verdict::TransientPlus);
  CHECK_THROWS_AS(mu_game_b(0.0, 0.5), ConfigError);
  CHECK_THROWS_AS(mu_game_b(0.5, 1.0), ConfigError);
}

TEST_CASE("mu curve of the mixed game") {
  CHECK(std::abs(mu_game_d(0.5) - 0.8512) <= 5e-4);
  CHECK(mu_game_d(0.0) == doctest::Approx(mu_game_b(0.099, 0.749)));
  CHECK(mu_game_d(1.0) == doctest::Approx(std::pow(0.501 / 0.499, 3)));
  const auto curve = mu_game_d_curve();
  REQUIRE(curve.size() == 101);
  for (const auto& pt : curve) {
    const double direct = (1 / (0.099 + 0.4 * pt.pi1) - 1) * std::pow(1 / (0.749 - 0.25 * pt.pi1) - 1, 2);
    CHECK(pt.mu == doctest::Approx(direct).epsilon(1e-12));
  }
  CHECK(curve[50].pi1 == 0.5);
  CHECK_THROWS_AS(mu_game_d(1.5), ConfigError);
}

TEST_CASE("single regime classification") {
  const auto a = classify_single_regime(EnvSpec::periodic({0.499}));
  CHECK(a.verdict == Verdict::TransientMinus);
  CHECK(*a.u == doctest::Approx(std::log(0.501 / 0.499)));
  CHECK(a.confidence == Confidence::Exact);
  CHECK(classify_single_regime(EnvSpec::periodic({0.099, 0.749, 0.749})).verdict == Verdict::TransientMinus);
  CHECK(classify_single_regime(EnvSpec::periodic({0.6})).verdict == Verdict::TransientPlus);
  CHECK(classify_single_regime(EnvSpec::periodic({0.1, 0.75, 0.75})).verdict == Verdict::Recurrent);
  const auto g = classify_single_regime(EnvSpec::gauss_map());
  CHECK(g.verdict == Verdict::TransientMinus);
  CHECK(g.confidence == Confidence::Numerical);
  CHECK(std::abs(*g.u - std::log(2.0) / 2) < 1e-2);
  // a fair i.i.d. law has u = 0, which numerics cannot separate from 0
  const auto fair = classify_single_regime(EnvSpec::iid({0.4, 0.6}, {0.5, 0.5}), 200000, 9);
  CHECK(fair.verdict == Verdict::Indeterminate);
}

TEST_CASE("full classification of the preset models") {
  CHECK(run_preset("game-a").verdict == Verdict::TransientMinus);
  CHECK(run_preset("game-b").verdict == Verdict::TransientMinus);
  CHECK(run_preset("game-d").verdict == Verdict::TransientPlus);

  const auto c = run_preset("game-c");
  CHECK(c.verdict == Verdict::TransientPlus);
  REQUIRE(c.dims);
  CHECK(c.dims->d0 == 6);
  CHECK(c.dims->dual_d0 == 4);
  CHECK(c.has("d0_minus >= k"));
  CHECK(c.confidence == Confidence::Exact);

  const auto cp = run_preset("game-cprime");
  CHECK(cp.verdict == Verdict::TransientMinus);
  REQUIRE(cp.dims);
  CHECK(cp.dims->d0 == 2);
  CHECK(cp.dims->dual_d0 == 4);

  const auto ce = run_preset("counterexample");
  CHECK(ce.verdict == Verdict::EnvironmentDependent);
  REQUIRE(ce.environment_table.size() == 4);
  for (const auto& row : ce.environment_table) {
    // first regime 0 on e goes up; flipping either the regime or the shift flips the limit
    const bool up = (row.first_regime == 0) == (row.shift == 0);
    CHECK(row.verdict == (up ? Limit::PlusInfinity : Limit::MinusInfinity));
  }

  const auto rec = run_preset("recurrent");
  CHECK(rec.verdict == Verdict::Recurrent);
  CHECK(rec.has("irreducibility"));

  const auto deg = run_preset("weird-rank2-degenerate");
  CHECK(deg.has("degenerate reduction"));
  CHECK(deg.verdict == Verdict::TransientMinus);

  const auto w = run_preset("weird-rank2");
  REQUIRE(w.dims);
  CHECK(w.dims->reduced);
  CHECK(w.dims->k == 2);
  CHECK(w.dims->d0 == 2);

  const auto g = run_preset("gauss-map");
  CHECK(g.verdict == Verdict::TransientMinus);
  CHECK(g.confidence == Confidence::Numerical);
}

TEST_CASE("classification invariants on every preset") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto c = run_preset(name);
    CHECK_FALSE(c.exclusivity_violated);
    REQUIRE(c.gamma_plus);
    REQUIRE(c.gamma_minus);
    CHECK(std::abs(std::max(*c.gamma_plus, *c.gamma_minus)) <= 0.02);
    if (c.verdict == Verdict::Recurrent) {
      bool irreducible = false;
      for (const auto& ev : c.evidence) irreducible = irreducible || (ev.criterion == "irreducibility" && ev.detail == "irreducible");
      CHECK(irreducible);
    }
    // the rate on the escape side is clearly negative for strong drifts
    if (c.verdict == Verdict::TransientPlus) CHECK(*c.gamma_plus <= *c.gamma_minus);
    if (c.verdict == Verdict::TransientMinus) CHECK(*c.gamma_minus <= *c.gamma_plus);
  }
}

TEST_CASE("rank-one sign of u agrees with the reduced dimensions") {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> u(0.1, 0.9);
  for (int trial = 0; trial < 40; ++trial) {
    const double w = u(gen);
    const Mat q(2, 2, {w, 1 - w, w, 1 - w});
    const RegimeModel model(q, {EnvSpec::periodic({u(gen), u(gen)}), EnvSpec::periodic({u(gen), u(gen), u(gen)})},
                            {0, 1});
    const auto e = model.realize({0, 0}, 0);
    const auto c = classify_full(model, e, ClassifyOptions{.estimate_gammas = false});
    TransferBuilder b(model);
    REQUIRE(b.reduced_dim() == 1);
    const auto s = forward_spectrum(b, e);
    CHECK((*c.u < 0) == (s.d0_minus == 1));
    CHECK(c.verdict == (*c.u < 0 ? Verdict::TransientPlus : Verdict::TransientMinus));
  }
}

TEST_CASE("parrondo certificate") {
  auto check = [](std::string_view name) {
    const auto c = preset(name);
    return parrondo_check(c.model, c.model.realize(c.window, c.seed));
  };
  const auto c = check("game-c");
  CHECK(c.every_game_losing);
  CHECK(c.dual_d0_is_k);
  CHECK(c.d0_minus_at_least_k);
  CHECK(c.certified);
  const auto cp = check("game-cprime");
  CHECK(cp.every_game_losing);
  CHECK_FALSE(cp.certified);
  const auto a = check("game-a");
  CHECK_FALSE(a.d0_minus_at_least_k);
  CHECK_FALSE(a.certified);
}

TEST_CASE("psi recursion") {
  const auto c = preset("game-cprime");
  const auto e = c.model.realize({-10, 10}, c.seed);
  SUBCASE("iterates stay stochastic") {
    const auto run = psi_iterate(c.model, e, -300, 0, 0.3, 0.9);
    for (const auto& s : run) {
      CHECK(s.x >= 0.0);
      CHECK(s.x <= 1.0);
      CHECK(s.y >= 0.0);
      CHECK(s.y <= 1.0);
      CHECK(s.z > 0.0);
    }
  }
  SUBCASE("degenerate seed oscillates with period two") {
    const auto lim = psi_recursion(c.model, e, 2, 0.0, 1.0);
    CHECK(lim.period == 2);
    REQUIRE(lim.limits.size() == 2);
    const Mat even(2, 2, {0, 1, 0.9987, 0.0013});
    const Mat odd(2, 2, {0.0039, 0.9961, 1, 0});
    CHECK(max_abs_diff(lim.limits[0], even) <= 5e-4);
    CHECK(max_abs_diff(lim.limits[1], odd) <= 5e-4);
  }
  SUBCASE("seed Q is a fixed point") {
    const auto lim = psi_recursion(c.model, e, 2, 0.0, 0.0, 200);
    CHECK(lim.period == 1);
    for (const auto& s : lim.series) CHECK(max_abs_diff(psi_matrix(s), c.model.Q()) <= 1e-12);
  }
  CHECK_THROWS_AS(psi_iterate(preset("game-d").model, e, 0, 3, 0.5, 0.5), ConfigError);
}
