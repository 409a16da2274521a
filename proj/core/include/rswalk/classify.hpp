#pragma once

// Transience/recurrence classification of regime-switching walks, built
// from Oseledec dimensions, hitting-rate estimates and structural checks.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rswalk/config.hpp"
#include "rswalk/envgen.hpp"
#include "rswalk/hitting.hpp"
#include "rswalk/model.hpp"
#include "rswalk/spectral.hpp"

namespace rswalk {

enum class Verdict { TransientPlus, TransientMinus, Recurrent, EnvironmentDependent, Indeterminate };
enum class Confidence { Exact, Numerical };

std::string to_string(Verdict v);
std::string to_string(Confidence c);

struct Evidence {
  std::string criterion;
  std::vector<std::pair<std::string, double>> values;
  std::string detail;
};

struct DimensionCounts {
  std::size_t k = 0;  ///< m on the full path, r on the reduced path
  std::size_t d0 = 0;
  std::size_t d0_minus = 0;
  std::size_t dual_d0 = 0;
  std::size_t dual_d0_minus = 0;
  SpectrumMethod method = SpectrumMethod::ExactPeriodic;
  bool reduced = false;
};

struct Classification {
  Verdict verdict = Verdict::Indeterminate;
  Confidence confidence = Confidence::Numerical;
  std::vector<Evidence> evidence;
  std::size_t rank = 0;
  std::optional<DimensionCounts> dims;
  std::optional<double> u;  ///< E log sigma of the effective scalar chain
  std::optional<double> mu;
  std::optional<double> gamma_plus;
  std::optional<double> gamma_minus;
  std::vector<CounterexampleResult> environment_table;
  bool exclusivity_violated = false;

  bool has(std::string_view criterion) const;
};

/// (1-p1)(1-p2)^2 / (p1 p2^2). Throws ConfigError outside (0,1).
double mu_game_b(double p1, double p2);
/// mu_game_b verdict: mu < 1 plus, mu > 1 minus, |mu - 1| <= 1e-12 recurrent.
Verdict mu_verdict(double mu);

struct MuPoint {
  double pi1 = 0.0;
  double mu = 0.0;
};

/// mu of the rank-one mixture that plays p_a with probability pi1 and the
/// two-valued game (p1, p2) otherwise, on an evenly spaced grid.
double mu_game_d(double pi1, double p_a = 0.499, double p1 = 0.099, double p2 = 0.749);
std::vector<MuPoint> mu_game_d_curve(std::size_t points = 101, double p_a = 0.499,
                                     double p1 = 0.099, double p2 = 0.749);

/// Sign of u = E log sigma_0 for one environment process.
Classification classify_single_regime(const EnvSpec& spec, std::size_t samples = 1'000'000,
                                      std::uint64_t seed = 12345);

struct ClassifyOptions {
  Tolerances tol;
  SpectrumOptions spectrum;
  bool estimate_gammas = true;
  std::size_t gamma_n_max = 200;
  std::size_t gamma_margin = 400;
  /// Sites used for u on aperiodic environments.
  std::size_t ergodic_samples = 1'000'000;
};

Classification classify_full(const RegimeModel& model, const EnvRealization& e,
                             const ClassifyOptions& opt = {});

struct ParrondoReport {
  std::vector<double> u;  ///< per regime
  bool every_game_losing = false;
  std::size_t k = 0;
  std::size_t dual_d0 = 0;
  std::size_t d0_minus = 0;
  bool dual_d0_is_k = false;
  bool d0_minus_at_least_k = false;
  bool certified = false;
};

ParrondoReport parrondo_check(const RegimeModel& model, const EnvRealization& e,
                              const ClassifyOptions& opt = {});

struct PsiState {
  double x = 0.0;
  double y = 0.0;
  double z = 1.0;
};

/// Iterates the two-regime psi recursion from psi_a = (x, 1-x; 1-y, y) at
/// site a up to site n_end; returns the states at a..n_end.
std::vector<PsiState> psi_iterate(const RegimeModel& model, const EnvRealization& e, long a,
                                  long n_end, double x_a, double y_a);

struct PsiLimits {
  long site = 0;
  /// psi_{site, site-N} for N = 0..n_max.
  std::vector<PsiState> series;
  /// Smallest period among {1, 2, 6} along which the tail is constant.
  std::size_t period = 0;
  /// Limit per residue class of N modulo period.
  std::vector<Mat> limits;
  double tail_spread = 0.0;
};

/// psi at a fixed site as the start a = site - N recedes. Requires m = 2
/// and Q = (0 1; 1 0).
PsiLimits psi_recursion(const RegimeModel& model, const EnvRealization& e, long site, double x0,
                        double y0, std::size_t n_max = 4000, double tol = 1e-6);

Mat psi_matrix(const PsiState& s);

}  // namespace rswalk
