#include "rswalk/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <sstream>

#include "rswalk/classify.hpp"
#include "rswalk/config.hpp"
#include "rswalk/error.hpp"
#include "rswalk/hitting.hpp"
#include "rswalk/simulate.hpp"
#include "rswalk/spectral.hpp"

namespace rswalk {

namespace {

// Collects named comparisons and the overall verdict of one criterion.
class Ledger {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_.push_back(what);
    }
  }
  void note(const std::string& s) { notes_.push_back(s); }

  CriterionResult finish(int number, std::string title) const {
    CriterionResult r{number, std::move(title), pass_, {}};
    std::ostringstream d;
    std::vector<std::string> items = failures_;
    items.insert(items.end(), notes_.begin(), notes_.end());
    for (std::size_t k = 0; k < items.size(); ++k) d << (k ? "; " : "") << items[k];
    r.detail = d.str();
    return r;
  }

 private:
  bool pass_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int precision = 6) {
  std::ostringstream s;
  s.precision(precision);
  s << v;
  return s.str();
}

struct Prepared {
  RunConfig config;
  EnvRealization env;
};

Prepared prepare(std::string_view name) {
  auto c = preset(name);
  auto e = c.model.realize(c.window, c.seed);
  return {std::move(c), std::move(e)};
}

RegimeModel constant_chain(double p) { return RegimeModel::with_specs(Mat::identity(1), {EnvSpec::periodic({p})}); }

// Probability that a birth-death chain with up-probabilities p(j) reaches
// target before leaving (lo, hi), from i. Killed at lo and hi.
double birth_death_hit(const std::function<double(long)>& p, long lo, long hi, long target, long i) {
  if (i == target) return 1.0;
  if (i <= lo || i >= hi) return 0.0;
  // pi_k = prod rho_j along the path away from the target
  const int dir = i > target ? 1 : -1;
  const long edge = dir > 0 ? hi : lo;
  double weight = 1.0;
  double total = 0.0;
  double from_i = 0.0;
  for (long k = target; k != edge; k += dir) {
    if (k != target) weight *= dir > 0 ? (1 - p(k)) / p(k) : p(k) / (1 - p(k));
    total += weight;
    if ((dir > 0 && k >= i) || (dir < 0 && k <= i)) from_i += weight;
  }
  return from_i / total;
}

// Infinite-lattice hitting probability of 0 from i for constant p.
double ruin_infinite(double p, long i) {
  if (i == 0 || p == 0.5) return 1.0;
  const double s = (1 - p) / p;
  if (i > 0) return p > 0.5 ? std::pow(s, static_cast<double>(i)) : 1.0;
  return p < 0.5 ? std::pow(1 / s, static_cast<double>(-i)) : 1.0;
}

double mc_band(const McEstimate& est) {
  return std::max(3 * est.std_error, 3.0 / static_cast<double>(est.replicates));
}

CriterionResult criterion1() {
  Ledger l;
  const double fair = mu_game_b(0.1, 0.75);
  const double off = mu_game_b(0.099, 0.749);
  l.expect(std::abs(fair - 1) <= 1e-12, "mu(0.1, 0.75) = " + fmt(fair, 17));
  l.expect(off > 1, "mu(0.099, 0.749) = " + fmt(off));
  l.note("mu(0.1, 0.75) - 1 = " + fmt(fair - 1, 3) + ", mu(0.099, 0.749) = " + fmt(off));
  return l.finish(1, "two-valued game ratio");
}

CriterionResult criterion2() {
  Ledger l;
  const auto [c, e] = prepare("game-d");
  const auto h = rank1_hitting(c.model, e, 0, {0, 2});
  const double expected[3] = {0.299, 0.624, 0.624};
  for (std::size_t k = 0; k < 3; ++k) {
    l.expect(std::abs(h.effective_p[k] - expected[k]) <= 1e-12,
             "effective p at site " + std::to_string(k) + " = " + fmt(h.effective_p[k], 17));
  }
  const double mu = mu_game_d(0.5);
  l.expect(std::abs(mu - 0.8512) <= 5e-4, "mu(1/2) = " + fmt(mu));
  const auto curve = mu_game_d_curve(101);
  l.expect(curve.size() == 101, "curve has " + std::to_string(curve.size()) + " points");
  double worst = 0;
  for (std::size_t k = 0; k < curve.size(); ++k) {
    const double pi1 = static_cast<double>(k) / 100;
    const double direct =
        (1 / (0.099 + 0.4 * pi1) - 1) * std::pow(1 / (0.749 - 0.25 * pi1) - 1, 2);
    worst = std::max(worst, std::abs(curve[k].pi1 - pi1) + std::abs(curve[k].mu - direct) / direct);
  }
  l.expect(worst <= 1e-12, "curve deviates from the formula by " + fmt(worst, 3));
  l.note("p_eff = {0.299, 0.624, 0.624}, mu(1/2) = " + fmt(mu) + ", curve error " + fmt(worst, 3));
  return l.finish(2, "mixed game effective chain");
}

CriterionResult criterion3() {
  Ledger l;
  for (const auto& [name, d0, dual, verdict] :
       {std::tuple{"game-c", 6u, 4u, Verdict::TransientPlus}, std::tuple{"game-cprime", 2u, 4u, Verdict::TransientMinus}}) {
    const auto [c, e] = prepare(name);
    const TransferBuilder b(c.model);
    const auto fwd = exact_periodic_spectrum(b, e);
    const auto inv = inverse_spectrum(b, e);
    l.expect(fwd.d0 == d0, std::string(name) + " d0 = " + std::to_string(fwd.d0));
    l.expect(inv.d0 == dual, std::string(name) + " dual d0 = " + std::to_string(inv.d0));
    const auto cls = classify_full(c.model, e);
    l.expect(cls.verdict == verdict, std::string(name) + " verdict " + to_string(cls.verdict));
    l.note(std::string(name) + ": d0 " + std::to_string(fwd.d0) + ", dual d0 " + std::to_string(inv.d0) + ", " +
           to_string(cls.verdict));
  }
  return l.finish(3, "spectral dimensions of the switched games");
}

CriterionResult criterion4() {
  Ledger l;
  const auto [c, e] = prepare("counterexample");
  // sigma = q/p per regime and site: regime 1 is constant, regime 2 alternates
  const double s1 = e.q(0, 0) / e.p(0, 0);
  const double s2a = e.q(1, 0) / e.p(1, 0);
  const double s2b = e.q(1, 1) / e.p(1, 1);
  l.expect(std::abs(s1 - 1.0408) <= 5e-4, "sigma(1) = " + fmt(s1));
  l.expect(std::abs(s2a - 1.0833) <= 5e-4, "sigma(2) even = " + fmt(s2a));
  l.expect(std::abs(s2b - 0.95) <= 5e-4, "sigma(2) odd = " + fmt(s2b));

  const auto first1 = counterexample_series(c.model, e, 0);
  const auto first2 = counterexample_series(c.model, e, 1);
  const double lambda1 = first1.lambda;
  const double lambda2 = first2.lambda;
  l.expect(std::abs(lambda1 - 0.9888) <= 5e-4, "lambda1 = " + fmt(lambda1));
  l.expect(std::abs(lambda2 - 1.1276) <= 5e-4, "lambda2 = " + fmt(lambda2));

  // A_2 A_1 from the explicit form of the alternating model
  auto rho = [&](std::size_t regime, long k) { return e.q(regime, k) / e.p(regime, k); };
  const double a1 = rho(1, 1), b1 = rho(0, 2), a2 = rho(0, 1), b2 = rho(1, 2);
  const Mat closed(4, 4,
                   {1 + a1 + a1 * b1, 0, 0, -a1 - a1 * b1,  //
                    0, 1 + a2 + a2 * b2, -a2 - a2 * b2, 0,  //
                    0, 1 + a2, -a2, 0,                      //
                    1 + a1, 0, 0, -a1});
  const TransferBuilder b(c.model);
  const Mat product = monodromy(b, e, 1, 2);
  const double matrix_err = max_abs_diff(product, closed);
  l.expect(matrix_err <= 1e-8, "A2 A1 differs from the closed form by " + fmt(matrix_err, 3));

  auto ev = eigenvalues(product).values;
  std::vector<double> got;
  for (const auto& z : ev) {
    l.expect(std::abs(z.imag()) <= 1e-8, "complex eigenvalue " + fmt(z.real()) + "+" + fmt(z.imag()) + "i");
    got.push_back(z.real());
  }
  std::vector<double> want{1.0, 1.0, lambda1, lambda2};
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  double eig_err = 0;
  for (std::size_t k = 0; k < 4; ++k) eig_err = std::max(eig_err, std::abs(got[k] - want[k]));
  l.expect(eig_err <= 1e-8, "eigenvalues differ from {1, 1, lambda1, lambda2} by " + fmt(eig_err, 3));

  const auto cls = classify_full(c.model, e);
  l.expect(cls.environment_table.size() == 4, "table has " + std::to_string(cls.environment_table.size()) + " rows");
  for (const auto& row : cls.environment_table) {
    const bool up = (row.first_regime == 0) == (row.shift == 0);
    const Limit want_limit = up ? Limit::PlusInfinity : Limit::MinusInfinity;
    l.expect(row.verdict == want_limit, "(" + std::to_string(row.first_regime + 1) + ", 0, T^" +
                                            std::to_string(row.shift) + " e) -> " + to_string(row.verdict));
  }
  l.expect(cls.verdict == Verdict::EnvironmentDependent, "verdict " + to_string(cls.verdict));
  l.note("sigma " + fmt(s1, 5) + ", " + fmt(s2a, 5) + ", " + fmt(s2b, 5) + "; lambda " + fmt(lambda1, 5) + ", " +
         fmt(lambda2, 5) + "; eigenvalue error " + fmt(eig_err, 3) + "; " + to_string(cls.verdict));
  return l.finish(4, "reducible alternating counterexample");
}

CriterionResult criterion5() {
  Ledger l;
  const auto c = preset("game-cprime");
  const auto e = c.model.realize({-10, 10}, c.seed);
  const auto lim = psi_recursion(c.model, e, 2, 0.0, 1.0);
  l.expect(lim.period == 2, "period " + std::to_string(lim.period));
  if (lim.limits.size() == 2) {
    const Mat even(2, 2, {0, 1, 0.9987, 0.0013});
    const Mat odd(2, 2, {0.0039, 0.9961, 1, 0});
    const double de = max_abs_diff(lim.limits[0], even);
    const double dodd = max_abs_diff(lim.limits[1], odd);
    l.expect(de <= 5e-4, "even limit off by " + fmt(de, 3));
    l.expect(dodd <= 5e-4, "odd limit off by " + fmt(dodd, 3));
    l.note("parity limits within " + fmt(std::max(de, dodd), 3));
  }
  const auto fixed = psi_recursion(c.model, e, 2, 0.0, 0.0, 200);
  double worst = 0;
  for (const auto& s : fixed.series) worst = std::max(worst, max_abs_diff(psi_matrix(s), c.model.Q()));
  l.expect(worst <= 1e-12, "seed Q drifts by " + fmt(worst, 3));
  l.note("seed Q constant within " + fmt(worst, 3));
  return l.finish(5, "psi recursion limits");
}

CriterionResult criterion6(const AcceptanceOptions& opts) {
  Ledger l;
  const auto m = ergodic_log_sigma_mean(EnvSpec::gauss_map(), 1'000'000, opts.seed);
  const double target = std::log(2.0) / 2;
  l.expect(m.samples >= 1'000'000, "samples " + std::to_string(m.samples));
  l.expect(std::abs(m.value - target) <= 1e-2, "mean " + fmt(m.value) + " vs " + fmt(target));
  l.note("mean " + fmt(m.value) + " over " + std::to_string(m.samples) + " iterates, target " + fmt(target));
  return l.finish(6, "Gauss map ergodic mean");
}

CriterionResult criterion7(const AcceptanceOptions& opts) {
  Ledger l;
  constexpr std::size_t kReps = 10'000;
  constexpr std::size_t kHorizon = 1'000'000;
  const Window eval{-20, 20};
  const Window mc_window{-40, 40};
  double worst_bracket = 0;
  double worst_window = 0;
  std::size_t mc_checks = 0;
  for (double p : {0.4, 0.5, 0.6}) {
    const auto model = constant_chain(p);
    const auto e = model.realize({-100000, 100000}, opts.seed);
    const auto br = solve_bracketed(model, e, 0, eval);
    for (long i = eval.lo; i <= eval.hi; ++i) {
      const double exact = ruin_infinite(p, i);
      const double lo = br.killed.norm(i);
      const double hi = br.absorbed.norm(i);
      const double err = std::max({lo - exact, exact - hi, 0.0});
      worst_bracket = std::max(worst_bracket, std::abs(lo - exact) - br.gap);
      l.expect(err <= 1e-8 && std::abs(lo - exact) <= br.gap + 1e-8,
               "p=" + fmt(p) + " i=" + std::to_string(i) + ": bracket [" + fmt(lo) + ", " + fmt(hi) +
                   "] vs " + fmt(exact));
    }
    const auto t = solve_window(model, e, 0, mc_window, BoundaryMode::Killed);
    auto pf = [p](long) { return p; };
    for (long i = mc_window.lo; i <= mc_window.hi; ++i) {
      const double exact = birth_death_hit(pf, mc_window.lo, mc_window.hi, 0, i);
      worst_window = std::max(worst_window, std::abs(t.norm(i) - exact));
    }
    for (long start : {-3L, 2L}) {
      const auto mc = mc_hitting(model, e, {0, start}, 0, kHorizon, kReps, derive_seed(opts.seed, mc_checks++), mc_window);
      const double exact = birth_death_hit(pf, mc_window.lo, mc_window.hi, 0, start);
      const double band = mc_band(mc.estimate);
      l.expect(mc.estimate.censored == 0, "censored runs at p=" + fmt(p));
      l.expect(std::abs(mc.estimate.value - exact) <= band,
               "p=" + fmt(p) + " start " + std::to_string(start) + ": MC " + fmt(mc.estimate.value) + " +- " +
                   fmt(band) + " vs " + fmt(exact));
    }
  }
  l.expect(worst_window <= 1e-8, "finite-window ruin error " + fmt(worst_window, 3));

  const auto [c, e] = prepare("game-d");
  const std::pair<long, long> pairs[] = {{5, 0}, {-5, 0}, {3, 1}, {-2, 4}, {10, 0}};
  double worst_z = 0;
  for (const auto& [start, target] : pairs) {
    const Window w{target - 40, target + 40};
    const auto t = solve_window(c.model, e, target, w, BoundaryMode::Killed);
    for (std::size_t alpha = 0; alpha < c.model.m(); ++alpha) {
      const auto mc = mc_hitting(c.model, e, {alpha, start}, target, kHorizon, kReps,
                                 derive_seed(opts.seed, mc_checks++), w);
      const double solver = t.f(start)[alpha];
      const double band = mc_band(mc.estimate);
      const double dev = std::abs(mc.estimate.value - solver);
      if (band > 0) worst_z = std::max(worst_z, dev / band * 3);
      l.expect(dev <= band, "game D " + std::to_string(start) + "->" + std::to_string(target) + " regime " +
                                std::to_string(alpha + 1) + ": MC " + fmt(mc.estimate.value) + " vs solver " +
                                fmt(solver));
    }
  }
  l.note("bracket excess " + fmt(std::max(worst_bracket, 0.0), 3) + ", window ruin error " + fmt(worst_window, 3) +
         ", game D worst deviation " + fmt(worst_z, 3) + " SE");
  return l.finish(7, "solver, closed form and Monte Carlo agree");
}

CriterionResult criterion8(const AcceptanceOptions& opts) {
  Ledger l;
  double worst_gamma = 0, worst_a = 0, worst_mn = 0, worst_harm = 0, worst_u = 0;
  for (const auto& name : preset_names()) {
    const auto [c, e] = prepare(name);
    const auto cls = classify_full(c.model, e);
    l.expect(!cls.exclusivity_violated, name + ": exclusivity violated");
    if (cls.gamma_plus && cls.gamma_minus) {
      const double g = std::abs(std::max(*cls.gamma_plus, *cls.gamma_minus));
      worst_gamma = std::max(worst_gamma, g);
      l.expect(g <= 0.02, name + ": max(gamma) = " + fmt(g));
    } else {
      l.expect(false, name + ": gamma estimates missing");
    }

    const TransferBuilder b(c.model);
    const std::size_t m = c.model.m();
    for (long i = -20; i <= 20; ++i) {
      const Mat M = b.M(e, i);
      const Mat N = b.N(e, i);
      worst_mn = std::max(worst_mn, max_abs_diff(M + N, c.model.Q()));
      const auto [Mr, Nr] = b.reduced(e, i);
      if (std::abs(determinant(Mr)) > 1e-12) {
        const Mat A = b.A(e, i);
        worst_a = std::max(worst_a, max_abs_diff(A * Mat::ones(A.rows()), Mat::ones(A.rows())));
      }
    }

    const Window w{-30, 30};
    const auto t = solve_window(c.model, e, 0, w, BoundaryMode::Killed);
    for (long i = w.lo + 1; i < w.hi; ++i) {
      if (i == 0) continue;
      const Mat rhs = b.M(e, i) * t.resolved(i + 1) + b.N(e, i) * t.resolved(i - 1);
      worst_harm = std::max(worst_harm, max_abs_diff(t.resolved(i), rhs));
    }
    for (std::size_t a = 0; a < m; ++a) {
      double row = 0;
      for (std::size_t bb = 0; bb < m; ++bb) {
        l.expect(t.U(a, bb) >= -1e-12, name + ": negative return probability");
        row += t.U(a, bb);
      }
      worst_u = std::max(worst_u, row - 1);
    }
    for (std::size_t n = 1; n <= 8; ++n) {
      const auto s = subadditivity_check(c.model, e, 0, n);
      l.expect(s.holds, name + ": subadditivity fails at n=" + std::to_string(n));
    }
  }
  l.expect(worst_a <= 1e-10, "A 1 = 1 off by " + fmt(worst_a, 3));
  l.expect(worst_mn <= 1e-12, "M + N = Q off by " + fmt(worst_mn, 3));
  l.expect(worst_harm <= 1e-10, "harmonicity residual " + fmt(worst_harm, 3));
  l.expect(worst_u <= 1e-12, "return matrix row sum exceeds 1 by " + fmt(worst_u, 3));

  const auto [cp, ecp] = prepare("game-cprime");
  std::size_t broken = 0;
  for (std::size_t r = 0; r < 4; ++r) {
    const auto traj = run(cp.model, ecp, {r % 2, static_cast<long>(r)}, 10'000, derive_seed(opts.seed, r));
    const long cls0 = (static_cast<long>(traj.states.front().g) + traj.states.front().x) & 1;
    for (const auto& s : traj.states) broken += ((static_cast<long>(s.g) + s.x) & 1) != cls0;
  }
  l.expect(broken == 0, "parity class changed " + std::to_string(broken) + " times");
  l.note("max|max gamma| " + fmt(worst_gamma, 3) + ", A1 " + fmt(worst_a, 3) + ", M+N " + fmt(worst_mn, 3) +
         ", harmonicity " + fmt(worst_harm, 3) + ", parity breaks " + std::to_string(broken));
  return l.finish(8, "invariant suites on every preset");
}

CriterionResult criterion9(const AcceptanceOptions& opts) {
  Ledger l;
  constexpr long kStart = 100;
  for (const auto& [name, winning] : {std::pair{"game-a", false}, std::pair{"game-b", false},
                                      std::pair{"game-c", true}, std::pair{"game-d", true}}) {
    const auto [c, e] = prepare(name);
    const auto est = mc_drift(c.model, e, {0, kStart}, 10'000, 200, opts.seed);
    const double z = est.std_error > 0 ? est.value / est.std_error : 0.0;
    l.expect(winning ? z > 3 : z < -3, std::string(name) + ": mean change " + fmt(est.value) + " (" + fmt(z, 3) + " SE)");
    l.note(std::string(name) + " " + fmt(est.value, 4) + " +- " + fmt(est.std_error, 3));
  }
  return l.finish(9, "Monte Carlo paradox");
}

CriterionResult criterion10(const AcceptanceOptions& opts) {
  Ledger l;
  const auto [c, e] = prepare("weird-rank2");
  const auto rk = rank_decompose(c.model.Q());
  l.expect(rk.r == 2, "rank " + std::to_string(rk.r));
  if (rk.theta.rows() == 1 && rk.theta.cols() == 2) {
    const double err = std::max(std::abs(rk.theta(0, 0) - 0.5), std::abs(rk.theta(0, 1) - 0.5));
    l.expect(err <= 1e-9, "theta off by " + fmt(err, 3));
  } else {
    l.expect(false, "theta has shape " + std::to_string(rk.theta.rows()) + "x" + std::to_string(rk.theta.cols()));
  }

  std::mt19937_64 gen(opts.seed);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  double worst_det = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const RegimeModel model = RegimeModel::with_specs(
        c.model.Q(), {EnvSpec::periodic({u(gen)}), EnvSpec::periodic({u(gen)}), EnvSpec::periodic({u(gen)})});
    const auto re = model.realize({0, 0}, 0);
    const TransferBuilder b(model);
    const double closed = re.p(2, 0) / 24 * (re.p(0, 0) - re.p(1, 0));
    worst_det = std::max(worst_det, std::abs(determinant(b.reduced(re, 0).first) - closed));
  }
  l.expect(worst_det <= 1e-10, "det closed form off by " + fmt(worst_det, 3));

  const auto [dc, de] = prepare("weird-rank2-degenerate");
  const TransferBuilder db(dc.model);
  const Window w{-20, 20};
  const auto red = rank1_reduce_degenerate(db, de, w);
  l.expect(red.has_value(), "no degenerate reduction");
  if (red) {
    const auto full = solve_window(dc.model, de, 0, w, BoundaryMode::Killed);
    auto pf = [&](long j) { return red->p.at(static_cast<std::size_t>(j - w.lo)); };
    const auto& order = db.rank().order;
    double worst = 0;
    for (long i = w.lo; i <= w.hi; ++i) {
      const auto f = full.f(i);
      double g = 0;
      for (std::size_t a = 0; a < red->w.size(); ++a) g += red->w[a] * f[order[a]];
      worst = std::max(worst, std::abs(g - birth_death_hit(pf, w.lo, w.hi, 0, i)));
    }
    l.expect(worst <= 1e-8, "effective chain off by " + fmt(worst, 3));
    l.note("theta = (1/2, 1/2), det error " + fmt(worst_det, 3) + ", effective chain error " + fmt(worst, 3));
  }
  return l.finish(10, "rank-deficient switching");
}

CriterionResult criterion11(const AcceptanceOptions& opts) {
  Ledger l;
  std::mt19937_64 gen(derive_seed(opts.seed, 11));
  std::uniform_real_distribution<double> u(0.2, 0.8);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t m = 2 + static_cast<std::size_t>(trial % 2);
    std::vector<double> pi(m);
    double total = 0;
    for (auto& x : pi) total += (x = u(gen));
    for (auto& x : pi) x /= total;
    std::vector<double> q(m * m);
    for (std::size_t a = 0; a < m; ++a) std::copy(pi.begin(), pi.end(), q.begin() + static_cast<long>(a * m));
    std::vector<EnvSpec> specs;
    for (std::size_t a = 0; a < m; ++a) {
      std::vector<double> vals(1 + a + static_cast<std::size_t>(trial % 3));
      for (auto& v : vals) v = u(gen);
      specs.push_back(EnvSpec::periodic(vals));
    }
    const RegimeModel model = RegimeModel::with_specs(Mat(m, m, q), specs);
    const auto e = model.realize({0, 60}, 0);
    const TransferBuilder b(model);
    Mat product = Mat::identity(2);
    double U = 0, prev = 0, run = 1;
    for (long n = 1; n <= 50; ++n) {
      double p = 0;
      for (std::size_t a = 0; a < m; ++a) p += pi[a] * e.p(a, n);
      run *= (1 - p) / p;
      prev = U;
      U += run;
      product = b.A(e, n) * product;
      const Mat closed(2, 2, {1 + U, -U, 1 + prev, -prev});
      double scale = 0;
      for (std::size_t r = 0; r < 2; ++r)
        for (std::size_t s = 0; s < 2; ++s) scale = std::max(scale, std::abs(closed(r, s)));
      worst = std::max(worst, max_abs_diff(product, closed) / scale);
    }
  }
  l.expect(worst <= 1e-8, "relative error " + fmt(worst, 3));
  l.note("worst relative error " + fmt(worst, 3) + " over 20 models, n <= 50");
  return l.finish(11, "rank-one product structure");
}

const char* const kTitles[kCriterionCount] = {
    "two-valued game ratio",       "mixed game effective chain",
    "spectral dimensions of the switched games", "reducible alternating counterexample",
    "psi recursion limits",        "Gauss map ergodic mean",
    "solver, closed form and Monte Carlo agree", "invariant suites on every preset",
    "Monte Carlo paradox",         "rank-deficient switching",
    "rank-one product structure"};

}  // namespace

CriterionResult run_criterion(int number, const AcceptanceOptions& opts) {
  if (number < 1 || number > kCriterionCount) {
    throw ConfigError("no acceptance criterion " + std::to_string(number));
  }
  try {
    switch (number) {
      case 1: return criterion1();
      case 2: return criterion2();
      case 3: return criterion3();
      case 4: return criterion4();
      case 5: return criterion5();
      case 6: return criterion6(opts);
      case 7: return criterion7(opts);
      case 8: return criterion8(opts);
      case 9: return criterion9(opts);
      case 10: return criterion10(opts);
      default: return criterion11(opts);
    }
  } catch (const std::exception& ex) {
    return {number, kTitles[number - 1], false, std::string("error: ") + ex.what()};
  }
}

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts) {
  std::vector<CriterionResult> out;
  for (int k = 1; k <= kCriterionCount; ++k) out.push_back(run_criterion(k, opts));
  return out;
}

std::string format_result(const CriterionResult& r) {
  std::string s = (r.pass ? "PASS" : "FAIL") + std::string(" criterion ") + std::to_string(r.number) + ": " + r.title;
  if (!r.detail.empty()) s += " (" + r.detail + ")";
  return s;
}

}  // namespace rswalk
