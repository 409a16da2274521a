#pragma once

// Hitting probabilities of a level on a finite window, solved exactly as a
// block-tridiagonal linear system, and the quantities derived from them.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rswalk/envgen.hpp"
#include "rswalk/model.hpp"
#include "rswalk/smallmat.hpp"

namespace rswalk {

/// Killed: leaving the window counts as never hitting (lower bound).
/// Absorbed: leaving the window counts as hitting (upper bound).
enum class BoundaryMode { Killed, Absorbed };
std::string to_string(BoundaryMode mode);

struct HittingTable {
  long target = 0;
  Window window;
  BoundaryMode mode = BoundaryMode::Killed;
  std::size_t m = 0;
  /// Per site of the window, an m x m matrix whose (alpha, beta) entry is
  /// P_{alpha,i}(hit target, regime beta at the hit). At the target itself
  /// it is the identity (the walk is already there).
  std::vector<Mat> F;
  /// Return matrix: (U)_{alpha beta} = P_{alpha,target}(return, regime beta).
  Mat U;
  /// Largest residual of the recursion at interior sites.
  double residual = 0.0;

  const Mat& resolved(long i) const { return F.at(static_cast<std::size_t>(i - window.lo)); }
  /// f_i as a vector over start regimes.
  std::vector<double> f(long i) const;
  /// max over start regimes of f_i; this is the norm used throughout.
  double norm(long i) const;
};

/// Solves for the hitting table of target on window; the window must
/// contain target with at least one site of margin on each side. In
/// Absorbed mode each regime-resolved edge value is 1/m so the total is 1.
HittingTable solve_window(const RegimeModel& model, const EnvRealization& e, long target,
                          Window window, BoundaryMode mode);

struct Bracket {
  HittingTable killed;
  HittingTable absorbed;
  /// Largest Absorbed - Killed difference of f over the evaluation sites.
  double gap = 0.0;
  bool converged = false;
};

/// Killed and Absorbed tables on a common window. The window starts at
/// target +- 40 max(1, period), is widened to cover eval with that margin,
/// and doubles until the gap over eval drops below gap_tol, the window
/// reaches 2^14 sites, or it would leave the realized environment.
Bracket solve_bracketed(const RegimeModel& model, const EnvRealization& e, long target,
                        Window eval, double gap_tol = 1e-4);

/// Solution of F_i = M_i F_{i+1} + N_i F_{i-1} on a < i < b with F_a and
/// F_b given; returns F_a..F_b.
std::vector<Mat> solve_segment(const RegimeModel& model, const EnvRealization& e, long a, long b,
                               const Mat& Fa, const Mat& Fb, double* residual = nullptr);

struct ExitProbabilities {
  long lo = 0;
  long hi = 0;
  /// Per site lo..hi, per start regime.
  std::vector<std::vector<double>> hit_hi_first;
  std::vector<std::vector<double>> hit_lo_first;
};

/// Two absorbing levels lo < hi: probabilities of reaching each one first.
ExitProbabilities solve_exit(const RegimeModel& model, const EnvRealization& e, long lo, long hi);

/// P_{alpha,i}(number of visits to the target >= k), k >= 1. For i equal to
/// the target, visits at times n >= 1 are counted.
double kth_visit(const HittingTable& table, std::size_t alpha, long i, std::size_t k);

enum class Direction { Plus, Minus };

struct GammaEstimate {
  Direction direction = Direction::Plus;
  double gamma = 0.0;
  /// log ||f_{+-n,0}|| for n = 1..n_max (the series the slope is fitted to).
  std::vector<double> log_norm;
  /// Largest Absorbed - Killed gap over n = 1..n_max at the base margin.
  double bracket_gap = 0.0;
  /// Largest |log f| change at n_max when the margin doubles (Killed mode).
  double margin_change = 0.0;
  bool used_midpoint = false;
  bool flagged = false;
  std::size_t n_max = 0;
  std::size_t margin = 0;
};

/// gamma_+ (start right of the target) or gamma_- (start left) as the
/// least-squares slope of log ||f|| over n in [n_max/2, n_max].
GammaEstimate estimate_gamma(const RegimeModel& model, const EnvRealization& e, Direction dir,
                             std::size_t n_max = 200, std::size_t margin = 400);

struct SubadditivityReport {
  std::size_t n = 0;
  double lhs_minus = 0.0;  ///< ||f_{l-n,l}||
  double rhs_minus = 0.0;  ///< prod ||f_{l-k,l-k+1}||
  double lhs_plus = 0.0;   ///< ||f_{l+n,l}||
  double rhs_plus = 0.0;   ///< prod ||f_{l+k,l+k-1}||
  bool holds = false;
};

/// Product bounds on a shared Killed window [l-n-margin, l+n+margin].
SubadditivityReport subadditivity_check(const RegimeModel& model, const EnvRealization& e,
                                        long target, std::size_t n, std::size_t margin = 200);

struct Rank1Hitting {
  std::vector<double> pi;
  Window sites;
  std::vector<double> effective_p;  ///< sum_beta pi_beta p_i^(beta) over sites
  /// Regime at the hit given a hit, from starts above and below the target.
  std::vector<double> regime_from_above;
  std::vector<double> regime_from_below;
};

/// Closed forms when Q has rank one. Throws ConfigError otherwise.
Rank1Hitting rank1_hitting(const RegimeModel& model, const EnvRealization& e, long target,
                           Window sites);

enum class Limit { PlusInfinity, MinusInfinity, Boundary };
std::string to_string(Limit limit);

struct SeriesSum {
  bool finite = false;
  double value = 0.0;       ///< partial sum (finite series only)
  double tail_bound = 0.0;  ///< bound on the omitted tail
  std::size_t terms = 0;
};

/// The alternating two-regime walk seen as a birth-death chain on the
/// integers, for one environment shift and one first regime.
struct CounterexampleResult {
  std::size_t first_regime = 0;  ///< 0-based regime of the first move
  std::size_t start_state = 0;   ///< 0-based G_0 giving that first move
  long shift = 0;
  std::size_t period = 0;        ///< lcm(2, environment period)
  std::vector<double> rho;       ///< rho_0 .. rho_{period-1}
  double lambda = 0.0;           ///< product of rho over one period
  SeriesSum S;                   ///< sum_n rho_1 ... rho_n
  SeriesSum F;                   ///< sum_n 1/(rho_-1 ... rho_-n)
  Limit verdict = Limit::Boundary;
};

/// Requires m = 2, Q = (0 1; 1 0) and periodic environments. The walk from
/// site 0 moves with regime first_regime at even sites and the other regime
/// at odd sites; rho_k = q_k/p_k for the regime used at k.
CounterexampleResult counterexample_series(const RegimeModel& model, const EnvRealization& e,
                                           std::size_t first_regime, double boundary_tol = 1e-12);

}  // namespace rswalk
