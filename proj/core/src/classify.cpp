#include "rswalk/classify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "rswalk/error.hpp"

namespace rswalk {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::TransientPlus: return "TransientPlus";
    case Verdict::TransientMinus: return "TransientMinus";
    case Verdict::Recurrent: return "Recurrent";
    case Verdict::EnvironmentDependent: return "EnvironmentDependent";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

std::string to_string(Confidence c) { return c == Confidence::Exact ? "exact" : "numerical"; }

bool Classification::has(std::string_view criterion) const {
  return std::any_of(evidence.begin(), evidence.end(),
                     [&](const Evidence& ev) { return ev.criterion == criterion; });
}

namespace {

void check_probability(double p, const char* what) {
  if (!(p > 0.0 && p < 1.0)) throw ConfigError(std::string(what) + " must lie in (0, 1)");
}

double odds(double p) { return (1.0 - p) / p; }

}  // namespace

double mu_game_b(double p1, double p2) {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  return (1 - p1) * (1 - p2) * (1 - p2) / (p1 * p2 * p2);
}

Verdict mu_verdict(double mu) {
  if (std::abs(mu - 1.0) <= 1e-12) return Verdict::Recurrent;
  return mu < 1.0 ? Verdict::TransientPlus : Verdict::TransientMinus;
}

double mu_game_d(double pi1, double p_a, double p1, double p2) {
  if (!(pi1 >= 0.0 && pi1 <= 1.0)) throw ConfigError("pi1 must lie in [0, 1]");
  return mu_game_b(pi1 * p_a + (1 - pi1) * p1, pi1 * p_a + (1 - pi1) * p2);
}

std::vector<MuPoint> mu_game_d_curve(std::size_t points, double p_a, double p1, double p2) {
  if (points < 2) throw ConfigError("the mu curve needs at least two grid points");
  std::vector<MuPoint> out;
  for (std::size_t k = 0; k < points; ++k) {
    const double pi1 = static_cast<double>(k) / static_cast<double>(points - 1);
    out.push_back({pi1, mu_game_d(pi1, p_a, p1, p2)});
  }
  return out;
}

namespace {

struct ScalarMean {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
  std::size_t samples = 0;
};

// Average of log sigma for a scalar chain p(i): exact over one period when
// period > 0, otherwise over sites [lo, lo + n) with batch-mean errors.
ScalarMean scalar_log_sigma_mean(const std::function<double(long)>& p, std::size_t period, long lo,
                                 std::size_t n) {
  ScalarMean out;
  if (period > 0) {
    double s = 0.0;
    for (std::size_t k = 0; k < period; ++k) s += std::log(odds(p(static_cast<long>(k))));
    out.value = s / static_cast<double>(period);
    out.exact = true;
    out.samples = period;
    return out;
  }
  if (n < 2) throw ConfigError("ergodic average needs at least two sites");
  const std::size_t batches = std::min<std::size_t>(100, n);
  const std::size_t per = n / batches;
  std::vector<double> sum(batches, 0.0);
  std::vector<std::size_t> len(batches, 0);
  double total = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double v = std::log(odds(p(lo + static_cast<long>(k))));
    total += v;
    const std::size_t b = std::min(k / per, batches - 1);
    sum[b] += v;
    len[b] += 1;
  }
  out.value = total / static_cast<double>(n);
  out.samples = n;
  double mean = 0.0, ss = 0.0;
  for (std::size_t b = 0; b < batches; ++b) mean += sum[b] / static_cast<double>(len[b]);
  mean /= static_cast<double>(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const double d = sum[b] / static_cast<double>(len[b]) - mean;
    ss += d * d;
  }
  if (batches > 1) {
    out.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  }
  return out;
}

// Sign rule for u = E log sigma. Exact zeros only for periodic chains.
Verdict u_verdict(const ScalarMean& u, Confidence& conf, Evidence& ev) {
  ev.criterion = "u sign";
  ev.values = {{"u", u.value}, {"std_error", u.std_error}, {"samples", static_cast<double>(u.samples)}};
  if (u.exact) {
    conf = Confidence::Exact;
    if (std::abs(u.value) <= 1e-12) {
      ev.detail = "u = 0 over one period";
      return Verdict::Recurrent;
    }
    ev.detail = u.value > 0 ? "u > 0" : "u < 0";
    return u.value > 0 ? Verdict::TransientMinus : Verdict::TransientPlus;
  }
  conf = Confidence::Numerical;
  const double half = 3.0 * u.std_error;
  std::ostringstream os;
  os << "u in [" << u.value - half << ", " << u.value + half << "]";
  ev.detail = os.str();
  if (u.value - half > 0) return Verdict::TransientMinus;
  if (u.value + half < 0) return Verdict::TransientPlus;
  ev.detail += " straddles 0";
  return Verdict::Indeterminate;
}

}  // namespace

Classification classify_single_regime(const EnvSpec& spec, std::size_t samples, std::uint64_t seed) {
  const auto m = ergodic_log_sigma_mean(spec, samples, seed);
  ScalarMean u{m.value, m.std_error, m.exact, m.samples};
  Classification c;
  c.rank = 1;
  c.u = u.value;
  Evidence ev;
  c.verdict = u_verdict(u, c.confidence, ev);
  c.evidence.push_back(std::move(ev));
  if (spec.kind() == EnvSpec::Kind::Periodic) {
    c.mu = std::exp(u.value * static_cast<double>(spec.period()));
  }
  return c;
}

namespace {

std::size_t lcm_with_two(std::size_t period) { return std::lcm<std::size_t>(2, period); }

bool is_swap(const Mat& q) { return q.rows() == 2 && q == Mat(2, 2, {0, 1, 1, 0}); }

// Sites on which an effective scalar chain is averaged for aperiodic e.
std::pair<long, std::size_t> ergodic_sites(const EnvRealization& e, std::size_t want) {
  const Window w = e.window();
  if (w.contains(Window{0, static_cast<long>(want) - 1})) return {0, want};
  return {w.lo, std::min(want, w.size())};
}

void record_gammas(Classification& c, const RegimeModel& model, const EnvRealization& e,
                   const ClassifyOptions& opt) {
  if (!opt.estimate_gammas) return;
  try {
    const auto gp = estimate_gamma(model, e, Direction::Plus, opt.gamma_n_max, opt.gamma_margin);
    const auto gm = estimate_gamma(model, e, Direction::Minus, opt.gamma_n_max, opt.gamma_margin);
    c.gamma_plus = gp.gamma;
    c.gamma_minus = gm.gamma;
    Evidence ev{"gamma",
                {{"gamma_plus", gp.gamma},
                 {"gamma_minus", gm.gamma},
                 {"bracket_gap_plus", gp.bracket_gap},
                 {"bracket_gap_minus", gm.bracket_gap},
                 {"margin_change_plus", gp.margin_change},
                 {"margin_change_minus", gm.margin_change}},
                "norm: max over start regimes"};
    if (gp.flagged || gm.flagged) ev.detail += "; bracket too wide on one side";
    c.evidence.push_back(std::move(ev));
  } catch (const Error& ex) {
    c.evidence.push_back({"gamma", {}, std::string("estimation failed: ") + ex.what()});
  }
}

// Effective scalar chain of a rank-one model or a degenerate reduction.
void classify_scalar(Classification& c, const std::function<double(long)>& p,
                     const EnvRealization& e, const ClassifyOptions& opt, const std::string& label) {
  const std::size_t period = e.period();
  ScalarMean u;
  if (period > 0) {
    u = scalar_log_sigma_mean(p, period, 0, 0);
  } else {
    const auto [lo, n] = ergodic_sites(e, opt.ergodic_samples);
    u = scalar_log_sigma_mean(p, 0, lo, n);
  }
  c.u = u.value;
  if (period > 0) c.mu = std::exp(u.value * static_cast<double>(period));
  Evidence ev;
  c.verdict = u_verdict(u, c.confidence, ev);
  ev.detail = label + ": " + ev.detail;
  c.evidence.push_back(std::move(ev));

  // Rank-one products: (d0, d0-) of the 2x2 recursion follow from U_n.
  std::vector<double> sigma;
  const std::size_t n = period > 0 ? std::max<std::size_t>(period * 400, 2000) : std::min<std::size_t>(u.samples, 20000);
  const long lo = period > 0 ? 1 : ergodic_sites(e, n).first;
  for (std::size_t k = 0; k < n; ++k) sigma.push_back(odds(p(lo + static_cast<long>(k))));
  const auto s = rank1_product_structure(sigma, 50);
  c.evidence.push_back({"rank-one products",
                        {{"rate_U", s.rate_U}, {"rate_escape", s.rate_escape},
                         {"closed_form_rel_error", s.max_rel_error}},
                        "d0- = 1 iff u < 0"});

  if (c.verdict == Verdict::Recurrent) {
    // recurrence needs irreducibility on top of u = 0
    c.verdict = Verdict::Indeterminate;
  }
}

void apply_dimension_rules(Classification& c, const DimensionCounts& d) {
  const bool plus = d.d0_minus >= d.k;        // gamma_+ < 0
  const bool minus = d.dual_d0_minus >= d.k;  // gamma_- < 0
  c.evidence.push_back({"dimensions",
                        {{"k", static_cast<double>(d.k)},
                         {"d0", static_cast<double>(d.d0)},
                         {"d0_minus", static_cast<double>(d.d0_minus)},
                         {"dual_d0", static_cast<double>(d.dual_d0)},
                         {"dual_d0_minus", static_cast<double>(d.dual_d0_minus)}},
                        d.reduced ? "reduced recursion" : "full recursion"});
  if (plus && minus) {
    c.exclusivity_violated = true;
    c.evidence.push_back({"exclusivity violated", {}, "forward and inverse minus-dimensions both >= k"});
    c.verdict = Verdict::Indeterminate;
    return;
  }
  if (plus) {
    c.evidence.push_back({"d0_minus >= k", {{"d0_minus", static_cast<double>(d.d0_minus)}}, "gamma_+ < 0"});
    if (d.dual_d0 == d.k) c.evidence.push_back({"dual_d0 = k", {}, "gamma_- = 0"});
    c.verdict = Verdict::TransientPlus;
  } else if (minus) {
    c.evidence.push_back(
        {"dual_d0_minus >= k", {{"dual_d0_minus", static_cast<double>(d.dual_d0_minus)}}, "gamma_- < 0"});
    if (d.d0 == d.k) c.evidence.push_back({"d0 = k", {}, "gamma_+ = 0"});
    c.verdict = Verdict::TransientMinus;
  }
}

void resolve_inconclusive(Classification& c, const RegimeModel& model, const EnvRealization& e,
                          const ClassifyOptions& opt) {
  const std::size_t period = e.period();
  if (period == 0) {
    c.evidence.push_back({"irreducibility", {}, "unknown: environment is not periodic"});
    c.verdict = Verdict::Indeterminate;
    return;
  }
  const auto probe = irreducibility_probe(model, e, lcm_with_two(period));
  c.evidence.push_back({"irreducibility",
                        {{"classes", static_cast<double>(probe.classes.size())},
                         {"quotient_period", static_cast<double>(probe.quotient_period)}},
                        to_string(probe.verdict)});
  if (probe.verdict == IrreducibilityResult::Verdict::Irreducible) {
    if (c.gamma_plus && c.gamma_minus && std::abs(*c.gamma_plus) <= opt.tol.gamma_zero &&
        std::abs(*c.gamma_minus) <= opt.tol.gamma_zero) {
      c.evidence.push_back({"gamma_+ = gamma_- = 0",
                            {{"gamma_plus", *c.gamma_plus}, {"gamma_minus", *c.gamma_minus}},
                            "irreducible with both rates zero"});
      c.verdict = Verdict::Recurrent;
    } else {
      c.verdict = Verdict::Indeterminate;
    }
    return;
  }
  if (probe.verdict == IrreducibilityResult::Verdict::Reducible && is_swap(model.Q())) {
    std::vector<Limit> seen;
    for (std::size_t k = 0; k < period; ++k) {
      const EnvRealization shifted = e.shift(static_cast<long>(k));
      for (std::size_t first = 0; first < 2; ++first) {
        auto r = counterexample_series(model, shifted, first);
        r.shift = static_cast<long>(k);
        seen.push_back(r.verdict);
        c.environment_table.push_back(std::move(r));
      }
    }
    const bool all_plus = std::all_of(seen.begin(), seen.end(), [](Limit l) { return l == Limit::PlusInfinity; });
    const bool all_minus = std::all_of(seen.begin(), seen.end(), [](Limit l) { return l == Limit::MinusInfinity; });
    const bool any_boundary = std::any_of(seen.begin(), seen.end(), [](Limit l) { return l == Limit::Boundary; });
    c.evidence.push_back({"per-environment analysis",
                          {{"cases", static_cast<double>(seen.size())}},
                          "birth-death chain per (shift, first regime)"});
    if (all_plus) {
      c.verdict = Verdict::TransientPlus;
    } else if (all_minus) {
      c.verdict = Verdict::TransientMinus;
    } else if (!any_boundary) {
      c.verdict = Verdict::EnvironmentDependent;
    } else {
      c.verdict = Verdict::Indeterminate;
    }
    return;
  }
  c.verdict = Verdict::Indeterminate;
}

}  // namespace

Classification classify_full(const RegimeModel& model, const EnvRealization& e,
                             const ClassifyOptions& opt) {
  Classification c;
  const auto rank = rank_decompose(model.Q(), opt.tol.rank);
  c.rank = rank.r;
  const std::size_t m = model.m();
  c.evidence.push_back({"rank", {{"r", static_cast<double>(rank.r)}, {"m", static_cast<double>(m)}}, ""});
  c.confidence = e.period() > 0 && !opt.spectrum.force_iterative ? Confidence::Exact : Confidence::Numerical;
  record_gammas(c, model, e, opt);

  if (rank.r == 1) {
    const std::vector<double> pi = model.Q().row(0);
    classify_scalar(c, [&](long i) {
      double p = 0.0;
      for (std::size_t b = 0; b < m; ++b) p += pi[b] * e.p(b, i);
      return p;
    }, e, opt, "effective chain");
    if (c.u && std::abs(*c.u) <= 1e-12 && e.period() > 0) resolve_inconclusive(c, model, e, opt);
    return c;
  }

  TransferBuilder builder(model, opt.tol.rank);
  if (rank.r < m) {
    const std::size_t period = e.period();
    Window sites{1, static_cast<long>(period > 0 ? period : std::min<std::size_t>(opt.spectrum.qr.n_steps, e.window().hi))};
    const auto hyp = check_hypothesis_inv(builder, e, sites, opt.tol.hypothesis);
    c.evidence.push_back({"invertibility hypothesis", {}, hyp.holds ? "holds" : "fails"});
    if (!hyp.holds) {
      const auto deg = rank1_reduce_degenerate(builder, e, period > 0 ? Window{0, static_cast<long>(period) - 1} : sites);
      if (!deg) {
        c.evidence.push_back({"degenerate reduction", {}, "not available"});
        c.verdict = Verdict::Indeterminate;
        return c;
      }
      c.evidence.push_back({"degenerate reduction", {}, "collapsed to a scalar chain"});
      const DegenerateReduction d = *deg;
      if (period > 0) {
        classify_scalar(c, [&](long i) {
          const long P = static_cast<long>(period);
          return d.p[static_cast<std::size_t>(((i % P) + P) % P)];
        }, e, opt, "degenerate chain");
      } else {
        classify_scalar(c, [&](long i) { return d.p.at(static_cast<std::size_t>(i - d.sites.lo)); }, e, opt,
                        "degenerate chain");
      }
      return c;
    }
  }

  DimensionCounts d;
  d.k = rank.r;
  d.reduced = rank.r < m;
  try {
    const auto fwd = forward_spectrum(builder, e, opt.spectrum);
    d.method = fwd.method;
    d.d0 = fwd.d0;
    d.d0_minus = fwd.d0_minus;
    const auto inv = inverse_spectrum(builder, e, opt.spectrum);
    d.dual_d0 = inv.d0;
    d.dual_d0_minus = inv.d0_minus;
    if (e.invertible_shift() && fwd.method == SpectrumMethod::ExactPeriodic) {
      const auto [r0, r0m] = ruelle_dual_dims(fwd, true);
      c.evidence.push_back({"duality",
                            {{"dual_d0", static_cast<double>(r0)}, {"dual_d0_minus", static_cast<double>(r0m)}},
                            r0 == inv.d0 && r0m == inv.d0_minus ? "consistent" : "inconsistent"});
    }
    if (inv.low_confidence) c.evidence.push_back({"inverse spectrum", {}, "low confidence: shift not invertible"});
  } catch (const Error& ex) {
    c.evidence.push_back({"spectral failure", {}, ex.what()});
    c.verdict = Verdict::Indeterminate;
    return c;
  }
  c.dims = d;
  c.verdict = Verdict::Indeterminate;
  apply_dimension_rules(c, d);
  if (c.verdict == Verdict::Indeterminate && !c.exclusivity_violated) resolve_inconclusive(c, model, e, opt);
  return c;
}

ParrondoReport parrondo_check(const RegimeModel& model, const EnvRealization& e,
                              const ClassifyOptions& opt) {
  ParrondoReport r;
  bool losing = true;
  for (std::size_t a = 0; a < model.m(); ++a) {
    const auto um = ergodic_log_sigma_mean(model.spec(a), opt.ergodic_samples, 12345);
    r.u.push_back(um.value);
    losing = losing && um.value > 0.0;
  }
  r.every_game_losing = losing;
  TransferBuilder builder(model, opt.tol.rank);
  r.k = builder.reduced_dim();
  try {
    const auto fwd = forward_spectrum(builder, e, opt.spectrum);
    const auto inv = inverse_spectrum(builder, e, opt.spectrum);
    r.d0_minus = fwd.d0_minus;
    r.dual_d0 = inv.d0;
  } catch (const Error&) {
    return r;
  }
  r.dual_d0_is_k = r.dual_d0 == r.k;
  r.d0_minus_at_least_k = r.d0_minus >= r.k;
  r.certified = r.every_game_losing && r.dual_d0_is_k && r.d0_minus_at_least_k;
  return r;
}

std::vector<PsiState> psi_iterate(const RegimeModel& model, const EnvRealization& e, long a,
                                  long n_end, double x_a, double y_a) {
  if (!is_swap(model.Q())) throw ConfigError("the psi recursion needs two alternating regimes");
  if (n_end < a) throw ConfigError("psi_iterate: n_end must be at least a");
  std::vector<PsiState> out;
  out.reserve(static_cast<std::size_t>(n_end - a + 1));
  PsiState s{x_a, y_a, 1.0};
  out.push_back(s);
  for (long n = a; n < n_end; ++n) {
    const double p1 = e.p(0, n + 1), p2 = e.p(1, n + 1);
    const double q1 = 1 - p1, q2 = 1 - p2;
    const double z = p1 * p2 + p2 * q1 * s.x + p1 * q2 * s.y;
    if (!(z > 0.0)) throw NumericError(NumericError::Kind::Singular, "psi recursion: z <= 0");
    s = {p1 * q2 * s.y / z, p2 * q1 * s.x / z, z};
    out.push_back(s);
  }
  return out;
}

Mat psi_matrix(const PsiState& s) { return Mat(2, 2, {s.x, 1 - s.x, 1 - s.y, s.y}); }

PsiLimits psi_recursion(const RegimeModel& model, const EnvRealization& e, long site, double x0,
                        double y0, std::size_t n_max, double tol) {
  PsiLimits out;
  out.site = site;
  out.series.push_back({x0, y0, 1.0});
  for (std::size_t N = 1; N <= n_max; ++N) {
    const auto run = psi_iterate(model, e, site - static_cast<long>(N), site, x0, y0);
    out.series.push_back(run.back());
  }
  const std::size_t tail_from = n_max - n_max / 5;
  auto spread_for = [&](std::size_t period) {
    double spread = 0.0;
    for (std::size_t N = tail_from; N <= n_max; ++N) {
      const std::size_t ref = n_max - ((n_max - N) % period);
      spread = std::max({spread, std::abs(out.series[N].x - out.series[ref].x),
                         std::abs(out.series[N].y - out.series[ref].y)});
    }
    return spread;
  };
  for (std::size_t period : {1u, 2u, 6u}) {
    const double spread = spread_for(period);
    if (spread <= tol) {
      out.period = period;
      out.tail_spread = spread;
      for (std::size_t r = 0; r < period; ++r) {
        // last N in the residue class r modulo period
        std::size_t N = n_max - ((n_max % period + period - r) % period);
        out.limits.push_back(psi_matrix(out.series[N]));
      }
      return out;
    }
    out.tail_spread = spread;
  }
  return out;
}

}  // namespace rswalk
