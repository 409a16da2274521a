#include "rswalk/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rswalk/error.hpp"
#include "rswalk/rng.hpp"

namespace rswalk {

std::string to_string(ProductSide side) {
  return side == ProductSide::Forward ? "forward" : "inverse";
}

std::string to_string(SpectrumMethod method) {
  return method == SpectrumMethod::ExactPeriodic ? "exact_periodic" : "qr_iteration";
}

void count_dimensions(SpectrumResult& s, double tol_zero) {
  s.tol_zero = tol_zero;
  s.d0 = static_cast<std::size_t>(std::count_if(
      s.exponents.begin(), s.exponents.end(), [&](double x) { return x <= tol_zero; }));
  s.d0_minus = static_cast<std::size_t>(std::count_if(
      s.exponents.begin(), s.exponents.end(), [&](double x) { return x < -tol_zero; }));
}

namespace {

Mat random_orthogonal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd;
  Mat a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = nd(gen);
  return qr(a).q;
}

void sort_with_errors(std::vector<double>& x, std::vector<double>& err) {
  std::vector<std::size_t> idx(x.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  std::vector<double> xs, es;
  for (std::size_t k : idx) {
    xs.push_back(x[k]);
    es.push_back(err[k]);
  }
  x = std::move(xs);
  err = std::move(es);
}

}  // namespace

SpectrumResult lyapunov_qr(const MatrixStream& stream, std::size_t dim, const QrOptions& opt) {
  if (opt.reorth_every == 0 || opt.n_steps < opt.reorth_every) {
    throw ConfigError("lyapunov_qr: need n_steps >= reorth_every >= 1");
  }
  const std::size_t n = opt.n_steps;
  const std::size_t blocks = std::clamp<std::size_t>(opt.blocks, 1, n);
  std::vector<std::vector<double>> block_sum(blocks, std::vector<double>(dim, 0.0));
  std::vector<std::size_t> block_len(blocks, 0);
  std::vector<double> total(dim, 0.0);

  Mat frame = random_orthogonal(dim, opt.frame_seed);
  std::size_t since = 0;
  for (std::size_t step = 1; step <= n; ++step) {
    const Mat a = stream(step);
    if (a.rows() != dim || a.cols() != dim) {
      throw ConfigError("lyapunov_qr: stream matrix has the wrong dimension");
    }
    frame = a * frame;
    ++since;
    const std::size_t blk = std::min((step - 1) * blocks / n, blocks - 1);
    block_len[blk] += 1;
    if (since == opt.reorth_every || step == n) {
      since = 0;
      const auto f = qr(frame);
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = f.r(k, k);
        if (!(d > 0.0) || !std::isfinite(d)) {
          std::ostringstream os;
          os << "lyapunov_qr: product lost rank at step " << step;
          throw NumericError(NumericError::Kind::Singular, os.str());
        }
        const double l = std::log(d);
        total[k] += l;
        block_sum[blk][k] += l;
      }
      frame = f.q;
    }
  }

  SpectrumResult s;
  s.dim = dim;
  s.method = SpectrumMethod::QRIteration;
  s.n_steps = n;
  s.exponents.resize(dim);
  s.std_errors.assign(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) s.exponents[k] = total[k] / static_cast<double>(n);
  if (blocks > 1) {
    for (std::size_t k = 0; k < dim; ++k) {
      double mean = 0.0, ss = 0.0;
      std::vector<double> b(blocks);
      for (std::size_t j = 0; j < blocks; ++j) {
        b[j] = block_sum[j][k] / static_cast<double>(block_len[j]);
        mean += b[j];
      }
      mean /= static_cast<double>(blocks);
      for (double v : b) ss += (v - mean) * (v - mean);
      s.std_errors[k] = std::sqrt(ss / static_cast<double>(blocks - 1) / static_cast<double>(blocks));
    }
  }
  sort_with_errors(s.exponents, s.std_errors);
  double tol = opt.tol_zero;
  if (tol < 0.0) {
    const double max_se = *std::max_element(s.std_errors.begin(), s.std_errors.end());
    tol = std::max(1e-3, 3.0 * max_se);
  }
  count_dimensions(s, tol);
  return s;
}

Mat monodromy(const TransferBuilder& b, const EnvRealization& e, long first_site,
              std::size_t length) {
  const std::size_t dim = 2 * b.reduced_dim();
  Mat prod = Mat::identity(dim);
  for (std::size_t k = 0; k < length; ++k) prod = b.A(e, first_site + static_cast<long>(k)) * prod;
  return prod;
}

SpectrumResult exact_periodic_spectrum(const TransferBuilder& b, const EnvRealization& e,
                                       double tol_zero) {
  const std::size_t period = e.period();
  if (period == 0) throw ConfigError("exact spectrum needs periodic environments");
  const Mat prod = monodromy(b, e, 1, period);
  SpectrumResult s;
  s.eigenvalues = eigenvalues(prod).values;
  s.dim = prod.rows();
  s.period = period;
  s.n_steps = period;
  s.reduced = b.reduced_dim() < b.model().m();
  s.method = SpectrumMethod::ExactPeriodic;
  s.tol_zero = tol_zero;
  const double p = static_cast<double>(period);
  for (const auto& z : s.eigenvalues) s.exponents.push_back(std::log(std::abs(z)) / p);
  std::sort(s.exponents.begin(), s.exponents.end(), std::greater<>());
  // The band applies to log|lambda| of the monodromy itself.
  s.d0 = 0;
  s.d0_minus = 0;
  for (const auto& z : s.eigenvalues) {
    const double l = std::log(std::abs(z));
    if (l <= tol_zero) ++s.d0;
    if (l < -tol_zero) ++s.d0_minus;
  }
  return s;
}

SpectrumResult forward_spectrum(const TransferBuilder& b, const EnvRealization& e,
                                const SpectrumOptions& opt) {
  if (e.period() != 0 && !opt.force_iterative) return exact_periodic_spectrum(b, e, opt.tol_exact);
  const std::size_t dim = 2 * b.reduced_dim();
  auto s = lyapunov_qr([&](std::size_t step) { return b.A(e, static_cast<long>(step)); }, dim,
                       opt.qr);
  s.reduced = b.reduced_dim() < b.model().m();
  s.period = e.period();
  return s;
}

SpectrumResult inverse_spectrum(const TransferBuilder& b, const EnvRealization& e,
                                const SpectrumOptions& opt) {
  if (e.period() != 0 && !opt.force_iterative) {
    SpectrumResult s = exact_periodic_spectrum(b, e, opt.tol_exact);
    s.side = ProductSide::Inverse;
    for (auto& z : s.eigenvalues) z = 1.0 / z;
    sort_eigenvalues(s.eigenvalues);
    for (auto& x : s.exponents) x = -x;
    std::sort(s.exponents.begin(), s.exponents.end(), std::greater<>());
    s.d0 = 0;
    s.d0_minus = 0;
    for (const auto& z : s.eigenvalues) {
      const double l = std::log(std::abs(z));
      if (l <= opt.tol_exact) ++s.d0;
      if (l < -opt.tol_exact) ++s.d0_minus;
    }
    return s;
  }
  const std::size_t dim = 2 * b.reduced_dim();
  auto s = lyapunov_qr(
      [&](std::size_t step) { return b.A_inverse(e, static_cast<long>(step)).transpose(); }, dim,
      opt.qr);
  s.side = ProductSide::Inverse;
  s.reduced = b.reduced_dim() < b.model().m();
  s.period = e.period();
  s.low_confidence = !e.invertible_shift();
  return s;
}

std::pair<std::size_t, std::size_t> ruelle_dual_dims(const SpectrumResult& forward,
                                                     bool invertible_shift) {
  if (!invertible_shift) {
    throw ConfigError("dual dimensions need an invertible shift map");
  }
  if (forward.side != ProductSide::Forward) {
    throw ConfigError("dual dimensions are derived from a forward spectrum");
  }
  return {forward.dim - forward.d0_minus, forward.dim - forward.d0};
}

Rank1Structure rank1_product_structure(std::span<const double> sigma, std::size_t verify_limit) {
  Rank1Structure out;
  out.n = sigma.size();
  Mat prod = Mat::identity(2);
  double U_prev = 0.0;
  double U = 0.0;
  double s_lin = 1.0;
  double log_s = 0.0;
  double log_U = -INFINITY;
  for (std::size_t k = 0; k < sigma.size(); ++k) {
    const double sg = sigma[k];
    if (!(sg > 0.0) || !std::isfinite(sg)) throw ConfigError("sigma values must be positive");
    log_s += std::log(sg);
    // log U_k = logsumexp(log U_{k-1}, log s_k)
    if (std::isinf(log_U)) {
      log_U = log_s;
    } else {
      const double hi = std::max(log_U, log_s), lo = std::min(log_U, log_s);
      log_U = hi + std::log1p(std::exp(lo - hi));
    }
    if (k < verify_limit) {
      s_lin *= sg;
      U_prev = U;
      U += s_lin;
      prod = Mat(2, 2, {1.0 + sg, -sg, 1.0, 0.0}) * prod;
      const Mat closed(2, 2, {1.0 + U, -U, 1.0 + U_prev, -U_prev});
      out.max_rel_error = std::max(out.max_rel_error, max_abs_diff(prod, closed) / closed.max_abs());
      out.verified_up_to = k + 1;
    }
  }
  out.log_s = log_s;
  out.log_U = log_U;
  if (out.n > 0) {
    const double n = static_cast<double>(out.n);
    out.rate_U = log_U / n;
    // log(1 + U_n) - log s_n
    const double log1U = log_U > 0 ? log_U + std::log1p(std::exp(-log_U)) : std::log1p(std::exp(log_U));
    out.rate_escape = (log1U - log_s) / n;
  }
  return out;
}

}  // namespace rswalk
