// rswalk: command-line front end for the regime-switching walk library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rswalk/acceptance.hpp"
#include "rswalk/classify.hpp"
#include "rswalk/config.hpp"
#include "rswalk/error.hpp"
#include "rswalk/hitting.hpp"
#include "rswalk/report.hpp"
#include "rswalk/simulate.hpp"
#include "rswalk/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rswalk;

namespace {

enum ExitCode { kOk = 0, kCheckFailed = 1, kConfigError = 2, kRuntimeError = 3 };

constexpr const char* kPaperGames = "paper-games";

struct Common {
  std::string config_path;
  std::string preset_name;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string format;
};

void add_common(CLI::App* app, Common& c, const std::string& default_format) {
  app->add_option("--config", c.config_path, "JSON run configuration");
  app->add_option("--preset", c.preset_name, "built-in configuration name");
  app->add_option("--seed", c.seed, "override the configured seed");
  app->add_option("--out", c.out_dir, "write output files to this directory instead of stdout");
  c.format = default_format;
  app->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

RunConfig load(const Common& c) {
  if (!c.config_path.empty() && !c.preset_name.empty()) throw ConfigError("give --config or --preset, not both");
  if (c.config_path.empty() && c.preset_name.empty()) throw ConfigError("one of --config or --preset is required");
  RunConfig cfg = c.config_path.empty() ? preset(c.preset_name) : load_config(c.config_path);
  if (c.seed) cfg.seed = *c.seed;
  return cfg;
}

// Writes to out_dir/file when an output directory was given, else stdout.
void emit(const Common& c, const std::string& file, const std::string& text) {
  if (c.out_dir.empty()) {
    std::cout << text;
    return;
  }
  fs::create_directories(c.out_dir);
  const fs::path path = fs::path(c.out_dir) / file;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  std::cerr << "wrote " << path.string() << '\n';
}

std::vector<FortuneCurve> fortune_curves(std::uint64_t seed, std::size_t n_steps, long start) {
  std::vector<FortuneCurve> curves;
  for (const auto& [label, name] : {std::pair{"A", "game-a"}, std::pair{"B", "game-b"}, std::pair{"C", "game-c"},
                                    std::pair{"D", "game-d"}}) {
    const auto cfg = preset(name);
    const auto e = cfg.model.realize(cfg.window, cfg.seed);
    const auto traj = run(cfg.model, e, {0, start}, n_steps, seed);
    FortuneCurve curve{label, {}};
    for (std::size_t k = 1; k < traj.states.size(); ++k) curve.fortune.push_back(traj.states[k].x);
    curves.push_back(std::move(curve));
  }
  return curves;
}

struct SimulateArgs {
  std::optional<std::size_t> steps;
  std::optional<long> start_site;
  std::size_t stride = 1;
};

int cmd_simulate(const Common& c, const SimulateArgs& a) {
  if (c.preset_name == kPaperGames) {
    const std::uint64_t seed = c.seed.value_or(12345);
    const auto curves = fortune_curves(seed, a.steps.value_or(10'000), a.start_site.value_or(100));
    std::ostringstream s;
    write_fortune_csv(s, curves);
    emit(c, "fortune.csv", s.str());
    return kOk;
  }
  const auto cfg = load(c);
  const auto e = cfg.model.realize(cfg.window, cfg.seed);
  const WalkState start{cfg.start_regime, a.start_site.value_or(cfg.start_site)};
  const auto traj = run(cfg.model, e, start, a.steps.value_or(cfg.n_steps), cfg.seed, a.stride);
  std::ostringstream s;
  if (c.format == "json") {
    json j = report_header("trajectory");
    j["seed"] = traj.seed;
    j["stride"] = traj.stride;
    j["n"] = traj.n;
    json g = json::array(), x = json::array();
    for (const auto& st : traj.states) {
      g.push_back(st.g + 1);
      x.push_back(st.x);
    }
    j["G"] = std::move(g);
    j["X"] = std::move(x);
    s << j.dump(2) << '\n';
    emit(c, "trajectory.json", s.str());
  } else {
    write_trajectory_csv(s, traj);
    emit(c, "trajectory.csv", s.str());
  }
  return kOk;
}

int cmd_classify(const Common& c) {
  const auto cfg = load(c);
  const auto e = cfg.model.realize(cfg.window, cfg.seed);
  ClassifyOptions opts;
  opts.tol.gamma_zero = cfg.tolerances.gamma_zero;
  json j = to_json(classify_full(cfg.model, e, opts));
  j["name"] = cfg.name;
  emit(c, "classification.json", j.dump(2) + "\n");
  return kOk;
}

json spectrum_report(const RunConfig& cfg) {
  const auto e = cfg.model.realize(cfg.window, cfg.seed);
  const TransferBuilder b(cfg.model);
  SpectrumOptions opts;
  opts.qr.frame_seed = cfg.seed;
  const auto fwd = forward_spectrum(b, e, opts);
  const auto inv = inverse_spectrum(b, e, opts);
  json j = report_header("spectrum");
  j["name"] = cfg.name;
  j["forward"] = to_json(fwd);
  j["inverse"] = to_json(inv);
  j["dimensions"] = {{"k", fwd.dim / 2}, {"d0", fwd.d0}, {"d0_minus", fwd.d0_minus},
                     {"dual_d0", inv.d0}, {"dual_d0_minus", inv.d0_minus}};
  return j;
}

int cmd_spectrum(const Common& c) {
  emit(c, "spectrum.json", spectrum_report(load(c)).dump(2) + "\n");
  return kOk;
}

struct HittingArgs {
  std::optional<long> target;
  std::optional<long> lo;
  std::optional<long> hi;
  std::string mode = "killed";
};

int cmd_hitting(const Common& c, const HittingArgs& a) {
  const auto cfg = load(c);
  const auto e = cfg.model.realize(cfg.window, cfg.seed);
  const long target = a.target.value_or(cfg.target);
  const Window w{a.lo.value_or(target - 50), a.hi.value_or(target + 50)};
  const auto mode = a.mode == "absorbed" ? BoundaryMode::Absorbed : BoundaryMode::Killed;
  const auto t = solve_window(cfg.model, e, target, w, mode);
  std::ostringstream s;
  if (c.format == "json") {
    json j = report_header("hitting");
    j["target"] = t.target;
    j["window"] = {t.window.lo, t.window.hi};
    j["boundary_mode"] = to_string(t.mode);
    j["residual"] = t.residual;
    json u = json::array();
    for (std::size_t r = 0; r < t.m; ++r) {
      json row = json::array();
      for (std::size_t k = 0; k < t.m; ++k) row.push_back(t.U(r, k));
      u.push_back(std::move(row));
    }
    j["return_matrix"] = std::move(u);
    json f = json::array();
    for (long i = w.lo; i <= w.hi; ++i) f.push_back({{"i", i}, {"f", t.f(i)}});
    j["f"] = std::move(f);
    s << j.dump(2) << '\n';
    emit(c, "hitting.json", s.str());
  } else {
    write_hitting_csv(s, t);
    emit(c, "hitting.csv", s.str());
  }
  return kOk;
}

struct MuArgs {
  std::optional<double> p1;
  std::optional<double> p2;
  bool curve = false;
  std::size_t points = 101;
};

int cmd_mu(const Common& c, const MuArgs& a) {
  std::ostringstream s;
  if (a.curve) {
    const auto curve = mu_game_d_curve(a.points);
    if (c.format == "json") {
      json j = report_header("mu_curve");
      json pts = json::array();
      for (const auto& p : curve) pts.push_back({{"pi1", p.pi1}, {"mu", p.mu}});
      j["points"] = std::move(pts);
      s << j.dump(2) << '\n';
      emit(c, "mu_curve.json", s.str());
    } else {
      write_mu_curve_csv(s, curve);
      emit(c, "mu_curve.csv", s.str());
    }
    return kOk;
  }
  const double p1 = a.p1.value_or(0.099);
  const double p2 = a.p2.value_or(0.749);
  const double mu = mu_game_b(p1, p2);
  const auto verdict = to_string(mu_verdict(mu));
  if (c.format == "json") {
    json j = report_header("mu");
    j["p1"] = p1;
    j["p2"] = p2;
    j["mu"] = mu;
    j["verdict"] = verdict;
    s << j.dump(2) << '\n';
    emit(c, "mu.json", s.str());
  } else {
    s << "p1,p2,mu,verdict\n"
      << format_double(p1) << ',' << format_double(p2) << ',' << format_double(mu) << ',' << verdict << '\n';
    emit(c, "mu.csv", s.str());
  }
  return kOk;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

int cmd_reproduce(const Common& c) {
  const std::uint64_t seed = c.seed.value_or(12345);
  const fs::path dir = c.out_dir.empty() ? fs::path("reproduce") : fs::path(c.out_dir);
  fs::create_directories(dir);

  {
    std::ostringstream s;
    write_fortune_csv(s, fortune_curves(seed, 10'000, 100));
    write_file(dir / "fortune.csv", s.str());
  }
  {
    std::ostringstream s;
    write_mu_curve_csv(s, mu_game_d_curve());
    write_file(dir / "mu_curve.csv", s.str());
  }
  for (const auto& name : preset_names()) {
    const auto cfg = preset(name);
    const auto e = cfg.model.realize(cfg.window, cfg.seed);
    json j = to_json(classify_full(cfg.model, e));
    j["name"] = name;
    write_file(dir / ("classify_" + name + ".json"), j.dump(2) + "\n");
  }
  for (const char* name : {"game-c", "game-cprime", "counterexample"}) {
    write_file(dir / ("spectrum_" + std::string(name) + ".json"), spectrum_report(preset(name)).dump(2) + "\n");
  }
  {
    const auto cfg = preset("game-cprime");
    const auto e = cfg.model.realize({-10, 10}, cfg.seed);
    const auto lim = psi_recursion(cfg.model, e, 2, 0.0, 1.0);
    json j = report_header("psi_limits");
    j["site"] = lim.site;
    j["period"] = lim.period;
    j["tail_spread"] = lim.tail_spread;
    json ls = json::array();
    for (const auto& m : lim.limits) ls.push_back({{m(0, 0), m(0, 1)}, {m(1, 0), m(1, 1)}});
    j["limits"] = std::move(ls);
    write_file(dir / "psi_limits.json", j.dump(2) + "\n");
  }

  std::ostringstream summary;
  int failed = 0;
  for (int k = 1; k <= kCriterionCount; ++k) {
    const auto r = run_criterion(k, {seed});
    const auto line = format_result(r);
    std::cout << line << std::endl;
    summary << line << '\n';
    failed += r.pass ? 0 : 1;
  }
  write_file(dir / "acceptance.txt", summary.str());
  std::cerr << "artifacts in " << dir.string() << '\n';
  return failed == 0 ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Regime-switching random walks in random environments"};
  app.require_subcommand(1);

  Common common;
  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "simulate a trajectory, or the four fortune curves with --preset paper-games");
  add_common(simulate, common, "csv");
  simulate->add_option("--steps", sim.steps, "number of steps");
  simulate->add_option("--start-site", sim.start_site, "starting site");
  simulate->add_option("--stride", sim.stride, "record every stride-th state")->check(CLI::PositiveNumber);

  auto* classify = app.add_subcommand("classify", "classify recurrence and transience");
  add_common(classify, common, "json");

  auto* spectrum = app.add_subcommand("spectrum", "Lyapunov spectra and Oseledec dimensions");
  add_common(spectrum, common, "json");

  HittingArgs hit;
  auto* hitting = app.add_subcommand("hitting", "hitting probability table on a window");
  add_common(hitting, common, "csv");
  hitting->add_option("--target", hit.target, "target level");
  hitting->add_option("--lo", hit.lo, "left edge of the window");
  hitting->add_option("--hi", hit.hi, "right edge of the window");
  hitting->add_option("--mode", hit.mode, "boundary mode")->check(CLI::IsMember({"killed", "absorbed"}));

  MuArgs mu;
  auto* mu_cmd = app.add_subcommand("mu", "recurrence ratio of the two-valued game, or the mixed-game curve");
  add_common(mu_cmd, common, "csv");
  mu_cmd->add_option("--p1", mu.p1, "probability at sites divisible by 3");
  mu_cmd->add_option("--p2", mu.p2, "probability at the other sites");
  mu_cmd->add_flag("--curve", mu.curve, "mu as a function of the mixing weight");
  mu_cmd->add_option("--points", mu.points, "grid points of the curve")->check(CLI::Range(2, 100000));

  auto* reproduce = app.add_subcommand("reproduce-paper", "write every reference artifact and run the acceptance checks");
  add_common(reproduce, common, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*simulate) return cmd_simulate(common, sim);
    if (*classify) return cmd_classify(common);
    if (*spectrum) return cmd_spectrum(common);
    if (*hitting) return cmd_hitting(common, hit);
    if (*mu_cmd) return cmd_mu(common, mu);
    if (*reproduce) return cmd_reproduce(common);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}
