#include "rswalk/config.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "rswalk/error.hpp"

namespace rswalk {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("field '") + key + "': " + ex.what());
  }
}

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
  return j.at(key);
}

RegimeModel model_from_json(const json& j) {
  const auto m = require(j, "m").get<std::size_t>();
  const auto flat = require(j, "Q").get<std::vector<double>>();
  if (m == 0 || flat.size() != m * m) {
    throw ConfigError("Q must list m*m entries in row-major order");
  }
  const json& procs = require(j, "processes");
  if (!procs.is_array() || procs.empty()) throw ConfigError("processes must be a non-empty array");
  std::vector<EnvSpec> specs;
  std::vector<std::string> names;
  std::map<std::string, std::size_t> index;
  for (const auto& p : procs) {
    const auto name = require(p, "name").get<std::string>();
    if (!index.emplace(name, specs.size()).second) throw ConfigError("duplicate process name " + name);
    names.push_back(name);
    specs.push_back(env_spec_from_json(p));
  }
  const auto regimes = require(j, "regimes").get<std::vector<std::string>>();
  if (regimes.size() != m) throw ConfigError("regimes must name one process per regime");
  std::vector<std::size_t> map;
  for (const auto& r : regimes) {
    auto it = index.find(r);
    if (it == index.end()) throw ConfigError("regime refers to unknown process " + r);
    map.push_back(it->second);
  }
  return RegimeModel(Mat(m, m, flat), std::move(specs), std::move(map), std::move(names));
}

json model_to_json(const RegimeModel& model) {
  json j;
  j["m"] = model.m();
  j["Q"] = std::vector<double>(model.Q().data().begin(), model.Q().data().end());
  json procs = json::array();
  for (std::size_t t = 0; t < model.processes().size(); ++t) {
    json p = to_json(model.processes()[t]);
    p["name"] = model.process_names()[t];
    procs.push_back(std::move(p));
  }
  j["processes"] = std::move(procs);
  std::vector<std::string> regimes;
  for (std::size_t a = 0; a < model.m(); ++a) regimes.push_back(model.process_names()[model.process_of(a)]);
  j["regimes"] = regimes;
  return j;
}

}  // namespace

EnvSpec env_spec_from_json(const json& j) {
  const auto kind = require(j, "kind").get<std::string>();
  EnvSpec spec;
  if (kind == "periodic") {
    spec = EnvSpec::periodic(require(j, "values").get<std::vector<double>>());
  } else if (kind == "iid") {
    spec = EnvSpec::iid(require(j, "values").get<std::vector<double>>(),
                        require(j, "weights").get<std::vector<double>>());
  } else if (kind == "gauss_map") {
    spec = EnvSpec::gauss_map();
  } else {
    throw ConfigError("unknown environment kind " + kind);
  }
  spec.validate();
  return spec;
}

json to_json(const EnvSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind());
  if (spec.kind() != EnvSpec::Kind::GaussMap) j["values"] = spec.values();
  if (spec.kind() == EnvSpec::Kind::IID) j["weights"] = spec.weights();
  return j;
}

RunConfig parse_config(const json& j) {
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const int version = get_or(j, "schema_version", kSchemaVersion);
    if (version != kSchemaVersion) throw ConfigError("unsupported schema_version " + std::to_string(version));
    RunConfig c;
    c.name = get_or<std::string>(j, "name", "");
    c.model = model_from_json(require(j, "model"));
    c.seed = get_or(j, "seed", c.seed);
    if (j.contains("window")) {
      const auto w = j.at("window").get<std::vector<long>>();
      if (w.size() != 2 || w[0] >= w[1]) throw ConfigError("window must be [lo, hi] with lo < hi");
      c.window = {w[0], w[1]};
    }
    c.n_steps = get_or(j, "n_steps", c.n_steps);
    c.replicates = get_or(j, "replicates", c.replicates);
    if (j.contains("start")) {
      const json& s = j.at("start");
      const auto regime = get_or<std::size_t>(s, "regime", 1);
      if (regime < 1 || regime > c.model.m()) throw ConfigError("start regime must be in 1..m");
      c.start_regime = regime - 1;
      c.start_site = get_or(s, "site", c.start_site);
    }
    c.target = get_or(j, "target", c.target);
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      c.tolerances.rank = get_or(t, "rank", c.tolerances.rank);
      c.tolerances.zero_exact = get_or(t, "zero_exact", c.tolerances.zero_exact);
      c.tolerances.bracket_gap = get_or(t, "bracket_gap", c.tolerances.bracket_gap);
      c.tolerances.gamma_zero = get_or(t, "gamma_zero", c.tolerances.gamma_zero);
      c.tolerances.hypothesis = get_or(t, "hypothesis", c.tolerances.hypothesis);
    }
    if (j.contains("output")) c.output_dir = get_or(j.at("output"), "dir", c.output_dir);
    return c;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("malformed config: ") + ex.what());
  }
}

RunConfig parse_config_text(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = c.name;
  j["model"] = model_to_json(c.model);
  j["seed"] = c.seed;
  j["window"] = {c.window.lo, c.window.hi};
  j["n_steps"] = c.n_steps;
  j["replicates"] = c.replicates;
  j["start"] = {{"regime", c.start_regime + 1}, {"site", c.start_site}};
  j["target"] = c.target;
  j["tolerances"] = {{"rank", c.tolerances.rank},
                     {"zero_exact", c.tolerances.zero_exact},
                     {"bracket_gap", c.tolerances.bracket_gap},
                     {"gamma_zero", c.tolerances.gamma_zero},
                     {"hypothesis", c.tolerances.hypothesis}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

namespace {

const EnvSpec kGameA = EnvSpec::periodic({0.499});
const EnvSpec kGameB = EnvSpec::periodic({0.099, 0.749, 0.749});

RunConfig make(std::string name, Mat q, std::vector<EnvSpec> specs, std::vector<std::size_t> map,
               std::vector<std::string> names) {
  RunConfig c;
  c.name = std::move(name);
  c.model = RegimeModel(std::move(q), std::move(specs), std::move(map), std::move(names));
  return c;
}

Mat weird_q() {
  Mat q(3, 3, {8, 8, 8, 6, 6, 12, 7, 7, 10});
  q *= 1.0 / 24.0;
  return q;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{
      "game-a",      "game-b",         "game-c",      "game-cprime",
      "game-d",      "counterexample", "weird-rank2", "weird-rank2-degenerate",
      "recurrent",   "gauss-map"};
  return names;
}

RunConfig preset(std::string_view name) {
  const Mat swap(2, 2, {0, 1, 1, 0});
  if (name == "game-a") return make("game-a", Mat::identity(1), {kGameA}, {0}, {"A"});
  if (name == "game-b") return make("game-b", Mat::identity(1), {kGameB}, {0}, {"B"});
  if (name == "game-c") {
    Mat cyc(4, 4, {0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0});
    return make("game-c", cyc, {kGameA, kGameB}, {0, 0, 1, 1}, {"A", "B"});
  }
  if (name == "game-cprime") return make("game-cprime", swap, {kGameA, kGameB}, {0, 1}, {"A", "B"});
  if (name == "game-d") {
    return make("game-d", Mat(2, 2, {0.5, 0.5, 0.5, 0.5}), {kGameA, kGameB}, {0, 1}, {"A", "B"});
  }
  if (name == "counterexample") {
    return make("counterexample", swap,
                {EnvSpec::periodic({0.49}), EnvSpec::periodic({0.48, 1.0 / 1.95})}, {0, 1},
                {"one", "two"});
  }
  if (name == "weird-rank2") {
    return make("weird-rank2", weird_q(),
                {EnvSpec::periodic({0.3, 0.6}), EnvSpec::periodic({0.55, 0.45}),
                 EnvSpec::periodic({0.5})},
                {0, 1, 2}, {"g1", "g2", "g3"});
  }
  if (name == "weird-rank2-degenerate") {
    return make("weird-rank2-degenerate", weird_q(),
                {EnvSpec::periodic({0.3, 0.6}), EnvSpec::periodic({0.5})}, {0, 0, 1},
                {"g1", "g3"});
  }
  if (name == "recurrent") {
    return make("recurrent", Mat(2, 2, {0.7, 0.3, 0.3, 0.7}),
                {EnvSpec::periodic({0.6}), EnvSpec::periodic({0.4})}, {0, 1}, {"up", "down"});
  }
  if (name == "gauss-map") {
    RunConfig c = make("gauss-map", Mat::identity(1), {EnvSpec::gauss_map()}, {0}, {"gauss"});
    c.window = {-2000, 2000};
    return c;
  }
  throw ConfigError("unknown preset " + std::string(name));
}

}  // namespace rswalk
