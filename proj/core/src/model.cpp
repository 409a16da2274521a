#include "rswalk/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rswalk/error.hpp"
#include "rswalk/rng.hpp"

namespace rswalk {

RegimeModel::RegimeModel(Mat q, std::vector<EnvSpec> processes,
                         std::vector<std::size_t> regime_process,
                         std::vector<std::string> process_names)
    : q_(std::move(q)),
      processes_(std::move(processes)),
      regime_process_(std::move(regime_process)),
      names_(std::move(process_names)) {
  if (q_.empty() || !q_.square()) throw ConfigError("Q must be a non-empty square matrix");
  const std::size_t m = q_.rows();
  for (std::size_t a = 0; a < m; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < m; ++b) {
      const double v = q_(a, b);
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw ConfigError("Q entries must lie in [0,1]");
      }
      s += v;
    }
    if (std::abs(s - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "row " << a + 1 << " of Q sums to " << s << ", not 1";
      throw ConfigError(os.str());
    }
  }
  if (regime_process_.size() != m) {
    throw ConfigError("every regime needs exactly one environment process");
  }
  if (processes_.empty()) throw ConfigError("at least one environment process is required");
  for (std::size_t t : regime_process_) {
    if (t >= processes_.size()) throw ConfigError("regime refers to an unknown environment process");
  }
  for (const auto& s : processes_) s.validate();
  if (names_.empty()) {
    for (std::size_t t = 0; t < processes_.size(); ++t) names_.push_back("p" + std::to_string(t + 1));
  }
  if (names_.size() != processes_.size()) {
    throw ConfigError("process names and processes differ in length");
  }
}

RegimeModel RegimeModel::with_specs(Mat q, const std::vector<EnvSpec>& specs) {
  std::vector<std::size_t> map(specs.size());
  std::iota(map.begin(), map.end(), std::size_t{0});
  return RegimeModel(std::move(q), specs, std::move(map));
}

std::size_t RegimeModel::period() const noexcept {
  std::size_t p = 1;
  for (const auto& s : processes_) {
    if (s.period() == 0) return 0;
    p = std::lcm(p, s.period());
  }
  return p;
}

bool RegimeModel::invertible_shift() const noexcept {
  return std::all_of(processes_.begin(), processes_.end(),
                     [](const EnvSpec& s) { return s.invertible_shift(); });
}

EnvRealization RegimeModel::realize(Window window, std::uint64_t seed) const {
  std::vector<EnvTrack> tracks;
  tracks.reserve(processes_.size());
  for (std::size_t t = 0; t < processes_.size(); ++t) {
    tracks.push_back(rswalk::realize(processes_[t], window, derive_seed(seed, t)));
  }
  return EnvRealization(std::move(tracks), regime_process_);
}

Mat RankDecomposition::reconstruct() const {
  const std::size_t m = order.size();
  Mat stacked(m, m);
  stacked.set_block(0, 0, pi);
  if (r < m) stacked.set_block(r, 0, theta * pi);
  Mat q(m, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l) q(order[k], order[l]) = stacked(k, l);
  return q;
}

RankDecomposition rank_decompose(const Mat& q, double tol) {
  if (!q.square() || q.empty()) throw ConfigError("rank_decompose: Q must be square");
  const std::size_t m = q.rows();
  std::vector<std::size_t> indep, dep;
  for (std::size_t a = 0; a < m; ++a) {
    Mat rows(indep.size() + 1, m);
    for (std::size_t k = 0; k < indep.size(); ++k)
      for (std::size_t c = 0; c < m; ++c) rows(k, c) = q(indep[k], c);
    for (std::size_t c = 0; c < m; ++c) rows(indep.size(), c) = q(a, c);
    if (numerical_rank(rows, tol) > indep.size()) {
      indep.push_back(a);
    } else {
      dep.push_back(a);
    }
  }
  RankDecomposition d;
  d.r = indep.size();
  d.order = indep;
  d.order.insert(d.order.end(), dep.begin(), dep.end());
  d.permuted_q = Mat(m, m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t l = 0; l < m; ++l) d.permuted_q(k, l) = q(d.order[k], d.order[l]);
  d.pi = d.permuted_q.block(0, 0, d.r, m);
  if (d.r < m) {
    const Mat dependent = d.permuted_q.block(d.r, 0, m - d.r, m);
    d.theta = least_squares(d.pi.transpose(), dependent.transpose()).transpose();
  } else {
    d.theta = Mat(0, d.r);
  }
  return d;
}

std::string to_string(TransferPath path) {
  switch (path) {
    case TransferPath::Full: return "full";
    case TransferPath::RankR: return "rank_r";
    case TransferPath::RankOne: return "rank_1";
  }
  return "unknown";
}

Mat block_swap(std::size_t k) {
  Mat g(2 * k, 2 * k);
  for (std::size_t i = 0; i < k; ++i) {
    g(i, k + i) = 1.0;
    g(k + i, i) = 1.0;
  }
  return g;
}

Mat transfer_from(const Mat& M, const Mat& N) {
  const std::size_t k = M.rows();
  const Mat minv = inverse(M);
  Mat a(2 * k, 2 * k);
  a.set_block(0, 0, minv);
  a.set_block(0, k, -1.0 * (minv * N));
  a.set_block(k, 0, Mat::identity(k));
  return a;
}

namespace {

Mat transfer_inverse_from(const Mat& M, const Mat& N) {
  const std::size_t k = M.rows();
  const Mat ninv = inverse(N);
  Mat a(2 * k, 2 * k);
  a.set_block(0, k, Mat::identity(k));
  a.set_block(k, 0, -1.0 * (ninv * M));
  a.set_block(k, k, ninv);
  return a;
}

Mat dual_from(const Mat& M, const Mat& N) {
  const std::size_t k = M.rows();
  const Mat ninv = inverse(N);
  Mat b(2 * k, 2 * k);
  b.set_block(0, 0, ninv);
  b.set_block(0, k, -1.0 * (ninv * M));
  b.set_block(k, 0, Mat::identity(k));
  return b;
}

constexpr double kDetTol = 1e-12;

}  // namespace

TransferBuilder::TransferBuilder(const RegimeModel& model, double rank_tol)
    : model_(&model), rank_(rank_decompose(model.Q(), rank_tol)) {
  if (rank_.r == model.m()) {
    path_ = TransferPath::Full;
  } else if (rank_.r == 1) {
    path_ = TransferPath::RankOne;
  } else {
    path_ = TransferPath::RankR;
  }
}

Mat TransferBuilder::delta(const EnvRealization& e, long i) const {
  const std::size_t m = model_->m();
  Mat d(m, m);
  for (std::size_t a = 0; a < m; ++a) d(a, a) = e.p(a, i);
  return d;
}

Mat TransferBuilder::M(const EnvRealization& e, long i) const { return model_->Q() * delta(e, i); }

Mat TransferBuilder::N(const EnvRealization& e, long i) const {
  return model_->Q() * (Mat::identity(model_->m()) - delta(e, i));
}

std::pair<Mat, Mat> TransferBuilder::reduced(const EnvRealization& e, long i) const {
  const std::size_t m = model_->m();
  const std::size_t r = rank_.r;
  std::vector<double> p(m);
  for (std::size_t k = 0; k < m; ++k) p[k] = e.p(rank_.order[k], i);
  Mat mr(r, r), nr(r, r);
  // pi1 Delta1 part
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t b = 0; b < r; ++b) {
      mr(a, b) = rank_.pi(a, b) * p[b];
      nr(a, b) = rank_.pi(a, b) * (1.0 - p[b]);
    }
  }
  // pi2 Delta2 Theta part
  for (std::size_t a = 0; a < r; ++a) {
    for (std::size_t k = r; k < m; ++k) {
      const double w = rank_.pi(a, k);
      if (w == 0.0) continue;
      for (std::size_t b = 0; b < r; ++b) {
        mr(a, b) += w * p[k] * rank_.theta(k - r, b);
        nr(a, b) += w * (1.0 - p[k]) * rank_.theta(k - r, b);
      }
    }
  }
  return {mr, nr};
}

Mat TransferBuilder::A(const EnvRealization& e, long i) const {
  const auto [mr, nr] = reduced(e, i);
  if (std::abs(determinant(mr)) <= kDetTol) {
    std::ostringstream os;
    os << "transfer matrix undefined: M is singular at site " << i;
    throw NumericError(NumericError::Kind::Singular, os.str());
  }
  return transfer_from(mr, nr);
}

Mat TransferBuilder::A_inverse(const EnvRealization& e, long i) const {
  const auto [mr, nr] = reduced(e, i);
  if (std::abs(determinant(nr)) <= kDetTol) {
    std::ostringstream os;
    os << "inverse transfer matrix undefined: N is singular at site " << i;
    throw NumericError(NumericError::Kind::Singular, os.str());
  }
  return transfer_inverse_from(mr, nr);
}

TransferMatrices TransferBuilder::at(const EnvRealization& e, long i) const {
  TransferMatrices t;
  t.site = i;
  t.path = path_;
  t.delta = delta(e, i);
  t.M = model_->Q() * t.delta;
  t.N = model_->Q() * (Mat::identity(model_->m()) - t.delta);
  t.det_M = determinant(t.M);
  t.det_N = determinant(t.N);
  if (std::abs(t.det_M) > kDetTol) {
    t.sigma = solve(t.M, t.N);
    t.A = transfer_from(t.M, t.N);
  }
  if (std::abs(t.det_N) > kDetTol) t.B = dual_from(t.M, t.N);
  auto [mr, nr] = reduced(e, i);
  t.M_red = std::move(mr);
  t.N_red = std::move(nr);
  t.det_M_red = determinant(t.M_red);
  t.det_N_red = determinant(t.N_red);
  if (std::abs(t.det_M_red) > kDetTol) {
    t.sigma_red = solve(t.M_red, t.N_red);
    t.A_red = transfer_from(t.M_red, t.N_red);
  }
  if (std::abs(t.det_N_red) > kDetTol) t.B_red = dual_from(t.M_red, t.N_red);
  return t;
}

HypothesisReport check_hypothesis_inv(const TransferBuilder& builder, const EnvRealization& e,
                                      Window sites, double tol) {
  HypothesisReport rep;
  rep.tol = tol;
  for (long i = sites.lo; i <= sites.hi; ++i) {
    const auto [mr, nr] = builder.reduced(e, i);
    HypothesisSite s{i, determinant(mr), determinant(nr)};
    if (std::abs(s.det_M) <= tol || std::abs(s.det_N) <= tol) rep.holds = false;
    rep.sites.push_back(s);
  }
  return rep;
}

namespace {

std::optional<std::vector<double>> common_row(const Mat& a, double tol) {
  const std::size_t r = a.rows();
  std::size_t best = 0;
  double best_sum = 0.0;
  std::vector<double> sums(r, 0.0);
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t c = 0; c < a.cols(); ++c) sums[k] += a(k, c);
    if (std::abs(sums[k]) > std::abs(best_sum)) {
      best_sum = sums[k];
      best = k;
    }
  }
  if (std::abs(best_sum) <= tol) return std::nullopt;
  std::vector<double> w(a.cols());
  for (std::size_t c = 0; c < a.cols(); ++c) w[c] = a(best, c) / best_sum;
  for (std::size_t k = 0; k < r; ++k)
    for (std::size_t c = 0; c < a.cols(); ++c)
      if (std::abs(a(k, c) - sums[k] * w[c]) > tol) return std::nullopt;
  return w;
}

}  // namespace

std::optional<DegenerateReduction> rank1_reduce_degenerate(const TransferBuilder& builder,
                                                           const EnvRealization& e, Window sites,
                                                           double tol) {
  if (sites.empty()) return std::nullopt;
  const std::size_t r = builder.reduced_dim();
  DegenerateReduction out;
  out.sites = sites;
  for (long i = sites.lo; i <= sites.hi; ++i) {
    const auto [mr, nr] = builder.reduced(e, i);
    const auto wm = common_row(mr, tol);
    const auto wn = common_row(nr, tol);
    if (!wm || !wn) return std::nullopt;
    for (std::size_t c = 0; c < r; ++c)
      if (std::abs((*wm)[c] - (*wn)[c]) > tol) return std::nullopt;
    if (out.w.empty()) {
      out.w = *wm;
    } else {
      for (std::size_t c = 0; c < r; ++c)
        if (std::abs(out.w[c] - (*wm)[c]) > tol) return std::nullopt;
    }
    std::vector<double> a(r, 0.0), b(r, 0.0);
    double p = 0.0;
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t c = 0; c < r; ++c) {
        a[k] += mr(k, c);
        b[k] += nr(k, c);
      }
    }
    for (std::size_t k = 0; k < r; ++k) p += out.w[k] * a[k];
    out.a.push_back(std::move(a));
    out.b.push_back(std::move(b));
    out.p.push_back(p);
  }
  // The collapse must come from regimes that share one environment process.
  const auto& model = builder.model();
  const auto& order = builder.rank().order;
  std::optional<EnvSpec> shared;
  std::size_t support = 0;
  for (std::size_t k = 0; k < r; ++k) {
    if (std::abs(out.w[k]) <= tol) continue;
    ++support;
    const EnvSpec& s = model.spec(order[k]);
    if (!shared) {
      shared = s;
    } else if (!(*shared == s)) {
      return std::nullopt;
    }
  }
  if (r > 1 && support < 2) return std::nullopt;
  return out;
}

std::string to_string(IrreducibilityResult::Verdict v) {
  switch (v) {
    case IrreducibilityResult::Verdict::Irreducible: return "irreducible";
    case IrreducibilityResult::Verdict::Reducible: return "reducible";
    case IrreducibilityResult::Verdict::Unknown: return "unknown";
  }
  return "unknown";
}

IrreducibilityResult irreducibility_probe(const RegimeModel& model, const EnvRealization& e,
                                          std::size_t quotient_period) {
  IrreducibilityResult res;
  res.quotient_period = quotient_period;
  const std::size_t period = e.period();
  if (period == 0) return res;
  if (quotient_period < 2 || quotient_period % 2 != 0 || quotient_period % period != 0) {
    throw ConfigError("quotient period must be a multiple of 2 and of the environment period");
  }
  const std::size_t m = model.m();
  const std::size_t P = quotient_period;
  const std::size_t n = m * P;
  auto node = [P](std::size_t a, std::size_t s) { return a * P + s; };
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t s = 0; s < P; ++s) {
      for (std::size_t b = 0; b < m; ++b) {
        if (model.Q()(a, b) <= 0.0) continue;
        const long site = static_cast<long>(s);
        if (e.p(b, site) > 0.0) adj[node(a, s)].push_back(node(b, (s + 1) % P));
        if (e.q(b, site) > 0.0) adj[node(a, s)].push_back(node(b, (s + P - 1) % P));
      }
    }
  }
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> stack{v};
    reach[v][v] = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t w : adj[u]) {
        if (!reach[v][w]) {
          reach[v][w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  std::vector<long> comp(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (comp[v] >= 0) continue;
    const long id = static_cast<long>(res.classes.size());
    res.classes.emplace_back();
    for (std::size_t w = v; w < n; ++w) {
      if (comp[w] < 0 && reach[v][w] && reach[w][v]) {
        comp[w] = id;
        res.classes.back().emplace_back(w / P, static_cast<long>(w % P));
      }
    }
  }
  res.verdict = res.classes.size() == 1 ? IrreducibilityResult::Verdict::Irreducible
                                        : IrreducibilityResult::Verdict::Reducible;
  return res;
}

}  // namespace rswalk
