#include "rswalk/envgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rswalk/error.hpp"
#include "rswalk/rng.hpp"

namespace rswalk {

namespace {

constexpr double kEdge = 1e-12;

bool interior(double v) { return std::isfinite(v) && v > kEdge && v < 1.0 - kEdge; }

long floor_mod(long i, long d) {
  const long r = i % d;
  return r < 0 ? r + d : r;
}

double gauss_step(double x) {
  const double inv = 1.0 / x;
  return inv - std::floor(inv);
}

double gauss_draw(Rng& rng) {
  // inverse CDF of the density 1/(log 2 (1+x))
  for (;;) {
    const double x = std::exp2(rng.uniform()) - 1.0;
    if (interior(x)) return x;
  }
}

double iid_value(const EnvSpec& spec, std::uint64_t seed, long i) {
  const double u = to_unit(derive_seed(seed, static_cast<std::uint64_t>(i)));
  const auto& w = spec.weights();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < w.size(); ++k) {
    acc += w[k];
    if (u < acc) return spec.values()[k];
  }
  return spec.values().back();
}

}  // namespace

EnvSpec EnvSpec::periodic(std::vector<double> values) {
  EnvSpec s;
  s.kind_ = Kind::Periodic;
  s.values_ = std::move(values);
  s.validate();
  return s;
}

EnvSpec EnvSpec::iid(std::vector<double> values, std::vector<double> weights) {
  EnvSpec s;
  s.kind_ = Kind::IID;
  s.values_ = std::move(values);
  s.weights_ = std::move(weights);
  s.validate();
  return s;
}

EnvSpec EnvSpec::gauss_map() {
  EnvSpec s;
  s.kind_ = Kind::GaussMap;
  return s;
}

void EnvSpec::validate() const {
  switch (kind_) {
    case Kind::Periodic:
      if (values_.empty()) throw ConfigError("periodic environment needs at least one value");
      break;
    case Kind::IID: {
      if (values_.empty()) throw ConfigError("iid environment needs at least one value");
      if (weights_.size() != values_.size()) {
        throw ConfigError("iid environment: values and weights differ in length");
      }
      double sum = 0.0;
      for (double w : weights_) {
        if (!(w > 0.0)) throw ConfigError("iid environment: weights must be positive");
        sum += w;
      }
      if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("iid environment: weights must sum to 1");
      break;
    }
    case Kind::GaussMap:
      return;
  }
  for (double v : values_) {
    if (!interior(v)) {
      std::ostringstream os;
      os << "environment probability " << v << " is not inside (0,1)";
      throw ConfigError(os.str());
    }
  }
}

std::string to_string(EnvSpec::Kind kind) {
  switch (kind) {
    case EnvSpec::Kind::Periodic: return "periodic";
    case EnvSpec::Kind::IID: return "iid";
    case EnvSpec::Kind::GaussMap: return "gauss_map";
  }
  return "unknown";
}

std::string EnvSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind_);
  if (!values_.empty()) {
    os << '{';
    for (std::size_t k = 0; k < values_.size(); ++k) {
      os << (k ? "," : "") << values_[k];
      if (kind_ == Kind::IID) os << '@' << weights_[k];
    }
    os << '}';
  }
  return os.str();
}

EnvTrack::EnvTrack(EnvSpec spec, Window realized, std::uint64_t seed, std::vector<double> table,
                   std::vector<long> restarts)
    : spec_(std::move(spec)),
      realized_(realized),
      seed_(seed),
      table_(std::move(table)),
      restarts_(std::move(restarts)) {}

double EnvTrack::at(long i) const {
  const long j = i + offset_;
  switch (spec_.kind()) {
    case EnvSpec::Kind::Periodic:
      return spec_.values()[static_cast<std::size_t>(
          floor_mod(j, static_cast<long>(spec_.values().size())))];
    case EnvSpec::Kind::IID:
      return iid_value(spec_, seed_, j);
    case EnvSpec::Kind::GaussMap:
      if (!realized_.contains(j)) {
        std::ostringstream os;
        os << "site " << i << " is outside the realized Gauss-map window";
        throw WindowError(os.str());
      }
      return table_[static_cast<std::size_t>(j - realized_.lo)];
  }
  return 0.0;
}

Window EnvTrack::window() const noexcept {
  if (spec_.regenerable()) return Window::unbounded();
  return realized_.shifted(-offset_);
}

EnvTrack EnvTrack::shifted(long k) const {
  EnvTrack t = *this;
  t.offset_ += k;
  const Window w = t.window();
  const Window before = window();
  if (!spec_.regenerable() && (w.hi < before.lo || w.lo > before.hi)) {
    throw WindowError("shift moves the environment past its realized window");
  }
  return t;
}

EnvTrack realize(const EnvSpec& spec, Window window, std::uint64_t seed) {
  spec.validate();
  if (window.empty()) throw ConfigError("environment window is empty");
  std::vector<double> table;
  std::vector<long> restarts;
  if (spec.kind() == EnvSpec::Kind::GaussMap) {
    Rng rng(seed);
    table.resize(window.size());
    double x = gauss_draw(rng);
    for (std::size_t k = 0; k < table.size(); ++k) {
      if (k > 0) {
        x = gauss_step(x);
        if (!interior(x)) {
          restarts.push_back(window.lo + static_cast<long>(k));
          x = gauss_draw(rng);
        }
      }
      table[k] = x;
    }
  }
  return EnvTrack(spec, window, seed, std::move(table), std::move(restarts));
}

EnvRealization::EnvRealization(std::vector<EnvTrack> tracks, std::vector<std::size_t> regime_track)
    : tracks_(std::move(tracks)), regime_track_(std::move(regime_track)) {
  for (std::size_t t : regime_track_) {
    if (t >= tracks_.size()) throw ConfigError("regime refers to an unknown environment process");
  }
}

double EnvRealization::sigma(std::size_t regime, long i) const {
  const double v = p(regime, i);
  return (1.0 - v) / v;
}

Window EnvRealization::window() const noexcept {
  Window w = Window::unbounded();
  for (const auto& t : tracks_) {
    const Window tw = t.window();
    w.lo = std::max(w.lo, tw.lo);
    w.hi = std::min(w.hi, tw.hi);
  }
  return w;
}

bool EnvRealization::regenerable() const noexcept {
  return std::all_of(tracks_.begin(), tracks_.end(),
                     [](const EnvTrack& t) { return t.spec().regenerable(); });
}

bool EnvRealization::invertible_shift() const noexcept {
  return std::all_of(tracks_.begin(), tracks_.end(),
                     [](const EnvTrack& t) { return t.spec().invertible_shift(); });
}

std::size_t EnvRealization::period() const noexcept {
  std::size_t p = 1;
  for (const auto& t : tracks_) {
    const std::size_t d = t.spec().period();
    if (d == 0) return 0;
    p = std::lcm(p, d);
  }
  return p;
}

long EnvRealization::origin_shift() const noexcept {
  return tracks_.empty() ? 0 : tracks_.front().offset();
}

EnvRealization EnvRealization::shift(long k) const {
  EnvRealization e = *this;
  for (auto& t : e.tracks_) t = t.shifted(k);
  return e;
}

ErgodicMean ergodic_log_sigma_mean(const EnvSpec& spec, std::size_t n_samples, std::uint64_t seed) {
  spec.validate();
  auto log_sigma = [](double p) { return std::log((1.0 - p) / p); };
  ErgodicMean out;
  if (spec.kind() == EnvSpec::Kind::Periodic) {
    double s = 0.0;
    for (double v : spec.values()) s += log_sigma(v);
    out.value = s / static_cast<double>(spec.values().size());
    out.exact = true;
    out.samples = spec.values().size();
    return out;
  }
  if (n_samples == 0) throw ConfigError("ergodic mean needs at least one sample");
  const EnvTrack track = realize(spec, {0, static_cast<long>(n_samples) - 1}, seed);
  const std::size_t batches = std::min<std::size_t>(100, n_samples);
  const std::size_t per = n_samples / batches;
  std::vector<double> batch(batches, 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    const double v = log_sigma(track.at(static_cast<long>(k)));
    total += v;
    const std::size_t b = std::min(k / per, batches - 1);
    batch[b] += v;
  }
  out.value = total / static_cast<double>(n_samples);
  out.samples = n_samples;
  if (batches > 1) {
    double mean = 0.0, ss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const std::size_t len = (b + 1 == batches) ? n_samples - per * (batches - 1) : per;
      batch[b] /= static_cast<double>(len);
      mean += batch[b];
    }
    mean /= static_cast<double>(batches);
    for (double v : batch) ss += (v - mean) * (v - mean);
    out.std_error = std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
  }
  return out;
}

}  // namespace rswalk
