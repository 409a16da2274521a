#include "rswalk/report.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace rswalk {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json report_header(const std::string& kind) {
  return {{"schema_version", kReportSchemaVersion}, {"kind", kind}};
}

namespace {

// JSON has no infinities; they are written as strings.
json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

}  // namespace

json to_json(const CounterexampleResult& r) {
  json j;
  j["first_regime"] = r.first_regime + 1;
  j["start_state"] = r.start_state + 1;
  j["shift"] = r.shift;
  j["period"] = r.period;
  j["rho"] = r.rho;
  j["lambda"] = r.lambda;
  auto series = [](const SeriesSum& s) {
    json o{{"finite", s.finite}};
    if (s.finite) {
      o["value"] = s.value;
      o["tail_bound"] = s.tail_bound;
      o["terms"] = s.terms;
    }
    return o;
  };
  j["S"] = series(r.S);
  j["F"] = series(r.F);
  j["verdict"] = to_string(r.verdict);
  return j;
}

json to_json(const Classification& c) {
  json j = report_header("classification");
  j["verdict"] = to_string(c.verdict);
  j["confidence"] = to_string(c.confidence);
  j["rank"] = c.rank;
  j["norm"] = "max over start regimes";
  if (c.dims) {
    j["dimensions"] = {{"k", c.dims->k},
                       {"d0", c.dims->d0},
                       {"d0_minus", c.dims->d0_minus},
                       {"dual_d0", c.dims->dual_d0},
                       {"dual_d0_minus", c.dims->dual_d0_minus},
                       {"method", to_string(c.dims->method)},
                       {"reduced", c.dims->reduced}};
  }
  if (c.u) j["u"] = number(*c.u);
  if (c.mu) j["mu"] = number(*c.mu);
  if (c.gamma_plus) j["gamma_plus"] = number(*c.gamma_plus);
  if (c.gamma_minus) j["gamma_minus"] = number(*c.gamma_minus);
  json ev = json::array();
  for (const auto& e : c.evidence) {
    json o{{"criterion", e.criterion}};
    json vals = json::object();
    for (const auto& [k, v] : e.values) vals[k] = number(v);
    o["values"] = std::move(vals);
    if (!e.detail.empty()) o["detail"] = e.detail;
    ev.push_back(std::move(o));
  }
  j["evidence"] = std::move(ev);
  if (!c.environment_table.empty()) {
    json t = json::array();
    for (const auto& r : c.environment_table) t.push_back(to_json(r));
    j["environment_table"] = std::move(t);
  }
  return j;
}

json to_json(const SpectrumResult& s) {
  json j = report_header("spectrum");
  j["side"] = to_string(s.side);
  j["method"] = to_string(s.method);
  j["dim"] = s.dim;
  j["reduced"] = s.reduced;
  j["d0"] = s.d0;
  j["d0_minus"] = s.d0_minus;
  j["tol_zero"] = s.tol_zero;
  json ex = json::array();
  for (double x : s.exponents) ex.push_back(number(x));
  j["exponents"] = std::move(ex);
  if (!s.std_errors.empty()) j["std_errors"] = s.std_errors;
  if (!s.eigenvalues.empty()) {
    json ev = json::array();
    for (const auto& z : s.eigenvalues) ev.push_back({z.real(), z.imag()});
    j["eigenvalues"] = std::move(ev);
  }
  j["n_steps"] = s.n_steps;
  j["period"] = s.period;
  j["low_confidence"] = s.low_confidence;
  return j;
}

json to_json(const GammaEstimate& g) {
  json j;
  j["direction"] = g.direction == Direction::Plus ? "plus" : "minus";
  j["gamma"] = number(g.gamma);
  j["bracket_gap"] = g.bracket_gap;
  j["margin_change"] = number(g.margin_change);
  j["used_midpoint"] = g.used_midpoint;
  j["flagged"] = g.flagged;
  j["n_max"] = g.n_max;
  j["margin"] = g.margin;
  return j;
}

void write_hitting_csv(std::ostream& out, const HittingTable& t) {
  out << "alpha,i,f";
  for (std::size_t b = 1; b <= t.m; ++b) out << ",f_beta_" << b;
  out << ",boundary_mode\n";
  const std::string mode = to_string(t.mode);
  for (long i = t.window.lo; i <= t.window.hi; ++i) {
    const Mat& r = t.resolved(i);
    const auto f = t.f(i);
    for (std::size_t a = 0; a < t.m; ++a) {
      out << a + 1 << ',' << i << ',' << format_double(f[a]);
      for (std::size_t b = 0; b < t.m; ++b) out << ',' << format_double(r(a, b));
      out << ',' << mode << '\n';
    }
  }
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "n,G,X\n";
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    out << t.n[k] << ',' << t.states[k].g + 1 << ',' << t.states[k].x << '\n';
  }
}

void write_fortune_csv(std::ostream& out, const std::vector<FortuneCurve>& curves) {
  out << "game,n,fortune\n";
  for (const auto& c : curves) {
    for (std::size_t n = 0; n < c.fortune.size(); ++n) {
      out << c.game << ',' << n + 1 << ',' << c.fortune[n] << '\n';
    }
  }
}

void write_mu_curve_csv(std::ostream& out, const std::vector<MuPoint>& curve) {
  out << "pi1,mu\n";
  for (const auto& p : curve) out << format_double(p.pi1) << ',' << format_double(p.mu) << '\n';
}

}  // namespace rswalk
