#pragma once

// Environment processes p_i: periodic sequences, i.i.d. draws from a finite
// law, and Gauss-map orbits, realized on finite integer windows.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace rswalk {

/// Closed integer interval [lo, hi].
struct Window {
  long lo = 0;
  long hi = 0;

  bool empty() const noexcept { return hi < lo; }
  std::size_t size() const noexcept { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
  bool contains(long i) const noexcept { return lo <= i && i <= hi; }
  bool contains(const Window& w) const noexcept { return w.empty() || (lo <= w.lo && w.hi <= hi); }
  Window shifted(long k) const noexcept { return {lo + k, hi + k}; }
  friend bool operator==(const Window&, const Window&) = default;

  static Window unbounded() noexcept {
    return {std::numeric_limits<long>::min() / 4, std::numeric_limits<long>::max() / 4};
  }
};

class EnvSpec {
 public:
  enum class Kind { Periodic, IID, GaussMap };

  static EnvSpec periodic(std::vector<double> values);
  static EnvSpec iid(std::vector<double> values, std::vector<double> weights);
  static EnvSpec gauss_map();

  Kind kind() const noexcept { return kind_; }
  /// Periodic values, or the support of an i.i.d. law.
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Spatial period for periodic specs, 0 otherwise.
  std::size_t period() const noexcept { return kind_ == Kind::Periodic ? values_.size() : 0; }

  /// Periodic and i.i.d. values can be recomputed at any site; a Gauss-map
  /// orbit only exists where it was realized.
  bool regenerable() const noexcept { return kind_ != Kind::GaussMap; }

  /// Whether the shift map is invertible on the environment space.
  bool invertible_shift() const noexcept { return kind_ != Kind::GaussMap; }

  /// Throws ConfigError on empty lists, values within 1e-12 of 0 or 1, or
  /// weights that are not positive or do not sum to 1 within 1e-12.
  void validate() const;

  std::string describe() const;

  friend bool operator==(const EnvSpec&, const EnvSpec&) = default;

 private:
  Kind kind_ = Kind::Periodic;
  std::vector<double> values_;
  std::vector<double> weights_;
};

std::string to_string(EnvSpec::Kind kind);

/// One realized process p_i, readable through a shift offset: reading index
/// i returns the underlying value at i + offset.
class EnvTrack {
 public:
  EnvTrack() = default;
  EnvTrack(EnvSpec spec, Window realized, std::uint64_t seed, std::vector<double> table,
           std::vector<long> restarts);

  const EnvSpec& spec() const noexcept { return spec_; }
  double at(long i) const;

  /// Readable sites in shifted coordinates; unbounded for regenerable specs.
  Window window() const noexcept;
  long offset() const noexcept { return offset_; }

  /// Reading index i of the result equals reading index i+k of this track.
  EnvTrack shifted(long k) const;

  /// Gauss-map sites (in unshifted coordinates) where the orbit was re-drawn
  /// because it came within 1e-12 of 0 or 1.
  const std::vector<long>& restarts() const noexcept { return restarts_; }

 private:
  EnvSpec spec_;
  Window realized_;
  std::uint64_t seed_ = 0;
  std::vector<double> table_;
  std::vector<long> restarts_;
  long offset_ = 0;
};

/// Realizes one process on a window. Periodic specs put values[0] at every
/// multiple of the period and ignore the seed. I.i.d. values are derived
/// per site from (seed, i), so any site can be regenerated. Gauss-map values
/// are the forward orbit of a point drawn from the invariant density for
/// index window.lo.
EnvTrack realize(const EnvSpec& spec, Window window, std::uint64_t seed);

/// A full environment e: one track per distinct process and a map from
/// regime to process, so regimes sharing a process share one realization.
class EnvRealization {
 public:
  EnvRealization() = default;
  EnvRealization(std::vector<EnvTrack> tracks, std::vector<std::size_t> regime_track);

  std::size_t regimes() const noexcept { return regime_track_.size(); }
  std::size_t tracks() const noexcept { return tracks_.size(); }
  const EnvTrack& track(std::size_t t) const { return tracks_.at(t); }
  std::size_t track_of(std::size_t regime) const { return regime_track_.at(regime); }

  /// p_i for a 0-based regime index.
  double p(std::size_t regime, long i) const { return tracks_[regime_track_[regime]].at(i); }
  double q(std::size_t regime, long i) const { return 1.0 - p(regime, i); }
  double sigma(std::size_t regime, long i) const;

  /// Sites readable by every regime.
  Window window() const noexcept;
  bool regenerable() const noexcept;
  bool invertible_shift() const noexcept;
  /// lcm of the periods, 0 when some process is not periodic.
  std::size_t period() const noexcept;
  long origin_shift() const noexcept;

  /// T^k e. Throws WindowError when a non-regenerable track cannot be read
  /// anywhere after the shift.
  EnvRealization shift(long k) const;

 private:
  std::vector<EnvTrack> tracks_;
  std::vector<std::size_t> regime_track_;
};

struct ErgodicMean {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
  std::size_t samples = 0;
};

/// E(log sigma_0) with sigma = (1-p)/p. Exact for periodic specs; otherwise
/// a Monte Carlo (i.i.d.) or Birkhoff (Gauss map) average over n_samples
/// values with a batch-means standard error.
ErgodicMean ergodic_log_sigma_mean(const EnvSpec& spec, std::size_t n_samples, std::uint64_t seed);

}  // namespace rswalk
