#include "rswalk/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "rswalk/error.hpp"

namespace rswalk {

WalkState step(const RegimeModel& model, const EnvRealization& e, WalkState s, Rng& rng) {
  const Mat& Q = model.Q();
  const std::size_t m = model.m();
  const double u = rng.uniform();
  std::size_t next = m - 1;
  double acc = 0.0;
  for (std::size_t b = 0; b < m; ++b) {
    acc += Q(s.g, b);
    if (u < acc && Q(s.g, b) > 0.0) {
      next = b;
      break;
    }
  }
  // rounding in the cumulative sum can leave u past the last positive entry
  while (Q(s.g, next) == 0.0) --next;
  const double v = rng.uniform();
  return {next, v < e.p(next, s.x) ? s.x + 1 : s.x - 1};
}

Trajectory run(const RegimeModel& model, const EnvRealization& e, WalkState start,
               std::size_t n_steps, std::uint64_t seed, std::size_t stride) {
  if (stride == 0) throw ConfigError("stride must be positive");
  if (start.g >= model.m()) throw ConfigError("start regime out of range");
  Trajectory t;
  t.start = start;
  t.seed = seed;
  t.stride = stride;
  Rng rng(seed);
  WalkState s = start;
  t.n.push_back(0);
  t.states.push_back(s);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    s = step(model, e, s, rng);
    if (n % stride == 0 || n == n_steps) {
      t.n.push_back(n);
      t.states.push_back(s);
    }
  }
  return t;
}

McEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  McEstimate est;
  est.seed = seed;
  est.replicates = values.size();
  if (values.empty()) return est;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  est.value = mean;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double n = static_cast<double>(values.size());
    est.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return est;
}

void parallel_replicates(std::size_t replicates, const std::function<void(std::size_t)>& body) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min(hw, replicates);
  if (workers <= 1) {
    for (std::size_t r = 0; r < replicates; ++r) body(r);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  std::mutex mu;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t r = next.fetch_add(1);
        if (r >= replicates || failed.load()) return;
        try {
          body(r);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!failure) failure = std::current_exception();
          failed = true;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<double> final_displacements(const RegimeModel& model, const EnvRealization& e,
                                        WalkState start, std::size_t n_steps,
                                        std::size_t replicates, std::uint64_t seed) {
  if (start.g >= model.m()) throw ConfigError("start regime out of range");
  std::vector<double> out(replicates);
  parallel_replicates(replicates, [&](std::size_t r) {
    Rng rng(derive_seed(seed, r));
    WalkState s = start;
    for (std::size_t n = 0; n < n_steps; ++n) s = step(model, e, s, rng);
    out[r] = static_cast<double>(s.x - start.x);
  });
  return out;
}

McEstimate mc_drift(const RegimeModel& model, const EnvRealization& e, WalkState start,
                    std::size_t n_steps, std::size_t replicates, std::uint64_t seed) {
  return summarize(final_displacements(model, e, start, n_steps, replicates, seed), seed);
}

namespace {

HitRecord first_passage(const RegimeModel& model, const EnvRealization& e, WalkState start,
                        long target, std::size_t horizon, std::uint64_t seed,
                        const std::optional<Window>& window) {
  HitRecord rec;
  Rng rng(seed);
  WalkState s = start;
  for (std::size_t n = 1; n <= horizon; ++n) {
    s = step(model, e, s, rng);
    if (s.x == target) {
      rec.hit = true;
      rec.regime = s.g;
      rec.time = n;
      return rec;
    }
    if (window && (s.x <= window->lo || s.x >= window->hi)) {
      rec.time = n;
      return rec;
    }
  }
  rec.censored = true;
  rec.time = horizon;
  return rec;
}

}  // namespace

McHitting mc_hitting(const RegimeModel& model, const EnvRealization& e, WalkState start,
                     long target, std::size_t horizon, std::size_t replicates, std::uint64_t seed,
                     std::optional<Window> window) {
  if (start.g >= model.m()) throw ConfigError("start regime out of range");
  if (start.x == target) throw ConfigError("mc_hitting: start must differ from the target");
  McHitting out;
  out.records.resize(replicates);
  parallel_replicates(replicates, [&](std::size_t r) {
    out.records[r] = first_passage(model, e, start, target, horizon, derive_seed(seed, r), window);
  });
  std::vector<double> values;
  std::size_t censored = 0;
  for (const auto& rec : out.records) {
    if (rec.censored) {
      ++censored;
      continue;
    }
    values.push_back(rec.hit ? 1.0 : 0.0);
    if (rec.hit) ++out.hits;
  }
  out.estimate = summarize(values, seed);
  out.estimate.censored = censored;
  return out;
}

RegimeAtHit regime_at_hit(const RegimeModel& model, const EnvRealization& e, WalkState start,
                          long target, std::size_t horizon, std::size_t replicates,
                          std::uint64_t seed, std::optional<Window> window) {
  const auto h = mc_hitting(model, e, start, target, horizon, replicates, seed, window);
  RegimeAtHit out;
  out.hits = h.hits;
  out.censored = h.estimate.censored;
  const std::size_t m = model.m();
  out.frequency.assign(m, 0.0);
  out.std_error.assign(m, 0.0);
  if (h.hits == 0) return out;
  for (const auto& rec : h.records) {
    if (rec.hit) out.frequency[rec.regime] += 1.0;
  }
  const double n = static_cast<double>(h.hits);
  for (std::size_t b = 0; b < m; ++b) {
    out.frequency[b] /= n;
    if (h.hits > 1) {
      const double f = out.frequency[b];
      out.std_error[b] = std::sqrt(f * (1 - f) * n / (n - 1.0)) / std::sqrt(n);
    }
  }
  return out;
}

}  // namespace rswalk
