#include "rswalk/hitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rswalk/error.hpp"

namespace rswalk {

std::string to_string(BoundaryMode mode) {
  return mode == BoundaryMode::Killed ? "killed" : "absorbed";
}

std::string to_string(Limit limit) {
  switch (limit) {
    case Limit::PlusInfinity: return "+inf";
    case Limit::MinusInfinity: return "-inf";
    case Limit::Boundary: return "boundary";
  }
  return "unknown";
}

std::vector<double> HittingTable::f(long i) const {
  const Mat& r = resolved(i);
  std::vector<double> out(m, 0.0);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) out[a] += r(a, b);
  return out;
}

double HittingTable::norm(long i) const {
  const auto v = f(i);
  return *std::max_element(v.begin(), v.end());
}

namespace {

// M_i = Q diag(p_i), N_i = Q diag(q_i)
void site_matrices(const RegimeModel& model, const EnvRealization& e, long i, Mat& M, Mat& N) {
  const std::size_t m = model.m();
  const Mat& Q = model.Q();
  for (std::size_t b = 0; b < m; ++b) {
    const double p = e.p(b, i);
    for (std::size_t a = 0; a < m; ++a) {
      M(a, b) = Q(a, b) * p;
      N(a, b) = Q(a, b) * (1.0 - p);
    }
  }
}

}  // namespace

std::vector<Mat> solve_segment(const RegimeModel& model, const EnvRealization& e, long a, long b,
                               const Mat& Fa, const Mat& Fb, double* residual) {
  if (b <= a) throw ConfigError("solve_segment: need a < b");
  const std::size_t m = model.m();
  const std::size_t k = Fa.cols();
  const std::size_t len = static_cast<std::size_t>(b - a + 1);
  std::vector<Mat> F(len, Mat(m, k));
  F.front() = Fa;
  F.back() = Fb;
  if (len == 2) {
    if (residual) *residual = 0.0;
    return F;
  }
  std::vector<Mat> C(len, Mat(m, m));
  std::vector<Mat> D(len, Mat(m, k));
  D[0] = Fa;
  Mat M(m, m), N(m, m);
  const Mat I = Mat::identity(m);
  for (std::size_t j = 1; j + 1 < len; ++j) {
    site_matrices(model, e, a + static_cast<long>(j), M, N);
    const Mat S = I - N * C[j - 1];
    C[j] = solve(S, M);
    D[j] = solve(S, N * D[j - 1]);
  }
  for (std::size_t j = len - 2; j >= 1; --j) F[j] = C[j] * F[j + 1] + D[j];
  if (residual) {
    double res = 0.0;
    for (std::size_t j = 1; j + 1 < len; ++j) {
      site_matrices(model, e, a + static_cast<long>(j), M, N);
      res = std::max(res, max_abs_diff(F[j], M * F[j + 1] + N * F[j - 1]));
    }
    *residual = res;
  }
  return F;
}

HittingTable solve_window(const RegimeModel& model, const EnvRealization& e, long target,
                          Window window, BoundaryMode mode) {
  if (!(window.lo < target && target < window.hi)) {
    throw ConfigError("hitting window must contain the target with a margin of one site");
  }
  if (!e.window().contains(window)) {
    throw WindowError("hitting window extends past the realized environment");
  }
  const std::size_t m = model.m();
  HittingTable t;
  t.target = target;
  t.window = window;
  t.mode = mode;
  t.m = m;
  const Mat edge = mode == BoundaryMode::Killed ? Mat(m, m)
                                                : Mat(m, m, 1.0 / static_cast<double>(m));
  const Mat I = Mat::identity(m);
  double r1 = 0.0, r2 = 0.0;
  auto left = solve_segment(model, e, window.lo, target, edge, I, &r1);
  auto right = solve_segment(model, e, target, window.hi, I, edge, &r2);
  t.residual = std::max(r1, r2);
  if (t.residual > 1e-10) {
    std::ostringstream os;
    os << "hitting solve residual " << t.residual << " exceeds 1e-10";
    throw NumericError(NumericError::Kind::NoConvergence, os.str());
  }
  t.F = std::move(left);
  t.F.insert(t.F.end(), std::make_move_iterator(right.begin() + 1),
             std::make_move_iterator(right.end()));
  Mat M(m, m), N(m, m);
  site_matrices(model, e, target, M, N);
  t.U = M * t.resolved(target + 1) + N * t.resolved(target - 1);
  return t;
}

Bracket solve_bracketed(const RegimeModel& model, const EnvRealization& e, long target,
                        Window eval, double gap_tol) {
  const long base = 40 * std::max<long>(1, static_cast<long>(e.period()));
  const long lo_need = std::min(eval.lo, target - 1);
  const long hi_need = std::max(eval.hi, target + 1);
  long left = target - lo_need + base;
  long right = hi_need - target + base;
  constexpr std::size_t cap = std::size_t{1} << 14;
  const Window avail = e.window();
  Bracket br;
  for (;;) {
    const Window w{target - left, target + right};
    br.killed = solve_window(model, e, target, w, BoundaryMode::Killed);
    br.absorbed = solve_window(model, e, target, w, BoundaryMode::Absorbed);
    br.gap = 0.0;
    for (long i = eval.lo; i <= eval.hi; ++i) {
      const auto k = br.killed.f(i);
      const auto a = br.absorbed.f(i);
      for (std::size_t b = 0; b < k.size(); ++b) br.gap = std::max(br.gap, a[b] - k[b]);
    }
    br.converged = br.gap < gap_tol;
    const Window next{target - 2 * left, target + 2 * right};
    if (br.converged || next.size() > cap || !avail.contains(next)) break;
    left *= 2;
    right *= 2;
  }
  return br;
}

ExitProbabilities solve_exit(const RegimeModel& model, const EnvRealization& e, long lo, long hi) {
  if (hi - lo < 2) throw ConfigError("exit levels need at least one site between them");
  const std::size_t m = model.m();
  ExitProbabilities out;
  out.lo = lo;
  out.hi = hi;
  const auto up = solve_segment(model, e, lo, hi, Mat(m, 1), Mat::ones(m, 1));
  const auto down = solve_segment(model, e, lo, hi, Mat::ones(m, 1), Mat(m, 1));
  for (std::size_t j = 0; j < up.size(); ++j) {
    out.hit_hi_first.push_back(up[j].col(0));
    out.hit_lo_first.push_back(down[j].col(0));
  }
  return out;
}

double kth_visit(const HittingTable& table, std::size_t alpha, long i, std::size_t k) {
  if (k == 0) throw ConfigError("kth_visit: k must be at least 1");
  const std::size_t m = table.m;
  const Mat& start = i == table.target ? table.U : table.resolved(i);
  Mat row = start.block(alpha, 0, 1, m);
  for (std::size_t j = 1; j < k; ++j) row = row * table.U;
  double s = 0.0;
  for (std::size_t b = 0; b < m; ++b) s += row(0, b);
  return s;
}

namespace {

// f at distance n = 1..n_max from the target 0, on the side given by dir,
// with the far edge at distance n_max + margin.
std::vector<double> side_norms(const RegimeModel& model, const EnvRealization& e, Direction dir,
                               std::size_t n_max, std::size_t margin, BoundaryMode mode) {
  const std::size_t m = model.m();
  const long far = static_cast<long>(n_max + margin);
  const Mat edge = mode == BoundaryMode::Killed ? Mat(m, 1) : Mat::ones(m, 1);
  std::vector<Mat> F;
  if (dir == Direction::Plus) {
    F = solve_segment(model, e, 0, far, Mat::ones(m, 1), edge);
  } else {
    F = solve_segment(model, e, -far, 0, edge, Mat::ones(m, 1));
    std::reverse(F.begin(), F.end());
  }
  std::vector<double> out(n_max);
  for (std::size_t n = 1; n <= n_max; ++n) out[n - 1] = F[n].max_abs();
  return out;
}

double ls_slope(const std::vector<double>& log_norm, std::size_t from, std::size_t to) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t n = from; n <= to; ++n) {
    const double y = log_norm[n - 1];
    if (!std::isfinite(y)) continue;
    const double x = static_cast<double>(n);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return -INFINITY;
  const double c = static_cast<double>(cnt);
  return (c * sxy - sx * sy) / (c * sxx - sx * sx);
}

}  // namespace

GammaEstimate estimate_gamma(const RegimeModel& model, const EnvRealization& e, Direction dir,
                             std::size_t n_max, std::size_t margin) {
  if (n_max < 4) throw ConfigError("estimate_gamma: n_max must be at least 4");
  GammaEstimate g;
  g.direction = dir;
  g.n_max = n_max;
  g.margin = margin;
  const auto killed = side_norms(model, e, dir, n_max, margin, BoundaryMode::Killed);
  const auto absorbed = side_norms(model, e, dir, n_max, margin, BoundaryMode::Absorbed);
  for (std::size_t k = 0; k < n_max; ++k) g.bracket_gap = std::max(g.bracket_gap, absorbed[k] - killed[k]);
  std::vector<double> chosen(n_max);
  if (g.bracket_gap < 1e-4) {
    g.used_midpoint = true;
    for (std::size_t k = 0; k < n_max; ++k) chosen[k] = 0.5 * (killed[k] + absorbed[k]);
  } else {
    chosen = side_norms(model, e, dir, n_max, 2 * margin, BoundaryMode::Killed);
    g.margin_change = std::abs(std::log(chosen.back()) - std::log(killed.back()));
    if (!std::isfinite(g.margin_change)) g.margin_change = INFINITY;
    g.flagged = g.margin_change > 1e-3;
  }
  g.log_norm.resize(n_max);
  for (std::size_t k = 0; k < n_max; ++k) g.log_norm[k] = std::log(chosen[k]);
  g.gamma = std::min(0.0, ls_slope(g.log_norm, n_max / 2, n_max));
  return g;
}

SubadditivityReport subadditivity_check(const RegimeModel& model, const EnvRealization& e,
                                        long target, std::size_t n, std::size_t margin) {
  if (n == 0) throw ConfigError("subadditivity_check: n must be positive");
  const long reach = static_cast<long>(n + margin);
  const Window w{target - reach, target + reach};
  SubadditivityReport rep;
  rep.n = n;
  const long sn = static_cast<long>(n);
  const auto base = solve_window(model, e, target, w, BoundaryMode::Killed);
  rep.lhs_minus = base.norm(target - sn);
  rep.lhs_plus = base.norm(target + sn);
  rep.rhs_minus = 1.0;
  rep.rhs_plus = 1.0;
  for (long k = 1; k <= sn; ++k) {
    const auto lower = solve_window(model, e, target - k + 1, w, BoundaryMode::Killed);
    rep.rhs_minus *= lower.norm(target - k);
    const auto upper = solve_window(model, e, target + k - 1, w, BoundaryMode::Killed);
    rep.rhs_plus *= upper.norm(target + k);
  }
  const double slack = 1e-12;
  rep.holds = rep.lhs_minus <= rep.rhs_minus * (1 + slack) + 1e-300 &&
              rep.lhs_plus <= rep.rhs_plus * (1 + slack) + 1e-300;
  return rep;
}

Rank1Hitting rank1_hitting(const RegimeModel& model, const EnvRealization& e, long target,
                           Window sites) {
  const auto rank = rank_decompose(model.Q());
  if (rank.r != 1) throw ConfigError("rank1_hitting needs Q of rank one");
  const std::size_t m = model.m();
  Rank1Hitting out;
  out.sites = sites;
  out.pi = model.Q().row(0);
  for (long i = sites.lo; i <= sites.hi; ++i) {
    double p = 0.0;
    for (std::size_t b = 0; b < m; ++b) p += out.pi[b] * e.p(b, i);
    out.effective_p.push_back(p);
  }
  double qa = 0.0, pb = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    qa += out.pi[b] * e.q(b, target + 1);
    pb += out.pi[b] * e.p(b, target - 1);
  }
  for (std::size_t b = 0; b < m; ++b) {
    out.regime_from_above.push_back(out.pi[b] * e.q(b, target + 1) / qa);
    out.regime_from_below.push_back(out.pi[b] * e.p(b, target - 1) / pb);
  }
  return out;
}

namespace {

// sum_{n>=0} prod_{t=1..n} r(t) for a periodic positive sequence r with
// period P and per-period product lambda < 1.
SeriesSum geometric_series(const std::vector<double>& r_period, std::size_t P, double lambda) {
  SeriesSum s;
  s.finite = true;
  // C = sum_{k=1..P} prod_{t=1..k} r(t) bounds the contribution of one period
  double partial = 1.0, C = 0.0;
  for (std::size_t t = 1; t <= P; ++t) {
    partial *= r_period[t % P];
    C += partial;
  }
  double term = 1.0;
  double sum = 1.0;
  std::size_t n = 0;
  constexpr std::size_t cap = 1'000'000;
  for (;;) {
    if (n % P == 0) {
      s.tail_bound = term * C / (1.0 - lambda);
      if (s.tail_bound < 1e-12 || n >= cap) break;
    }
    ++n;
    term *= r_period[n % P];
    sum += term;
  }
  s.value = sum;
  s.terms = n + 1;
  return s;
}

}  // namespace

CounterexampleResult counterexample_series(const RegimeModel& model, const EnvRealization& e,
                                           std::size_t first_regime, double boundary_tol) {
  const Mat swap(2, 2, {0, 1, 1, 0});
  if (model.m() != 2 || model.Q() != swap) {
    throw ConfigError("counterexample analysis needs two regimes that alternate deterministically");
  }
  if (first_regime > 1) throw ConfigError("first regime must be 0 or 1");
  const std::size_t period = e.period();
  if (period == 0) throw ConfigError("counterexample analysis needs periodic environments");
  CounterexampleResult out;
  out.first_regime = first_regime;
  out.start_state = 1 - first_regime;
  out.shift = e.origin_shift();
  out.period = std::lcm<std::size_t>(2, period);
  const std::size_t P = out.period;
  out.rho.resize(P);
  out.lambda = 1.0;
  for (std::size_t k = 0; k < P; ++k) {
    const std::size_t regime = k % 2 == 0 ? first_regime : 1 - first_regime;
    out.rho[k] = e.sigma(regime, static_cast<long>(k));
    out.lambda *= out.rho[k];
  }
  if (std::abs(out.lambda - 1.0) <= boundary_tol) {
    out.verdict = Limit::Boundary;
    return out;
  }
  if (out.lambda < 1.0) {
    // S: terms prod_{t=1..n} rho_t
    out.S = geometric_series(out.rho, P, out.lambda);
    out.verdict = Limit::PlusInfinity;
  } else {
    // F: terms prod_{t=1..n} 1/rho_{-t}; index -t mod P
    std::vector<double> inv(P);
    for (std::size_t t = 0; t < P; ++t) inv[t] = 1.0 / out.rho[(P - t % P) % P];
    out.F = geometric_series(inv, P, 1.0 / out.lambda);
    out.verdict = Limit::MinusInfinity;
  }
  return out;
}

}  // namespace rswalk
