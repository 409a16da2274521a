#pragma once

// The regime-switching walk: switching matrix Q, per-regime environment
// processes, the rank decomposition of Q and the transfer matrices that
// propagate hitting probabilities from site to site.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rswalk/envgen.hpp"
#include "rswalk/smallmat.hpp"

namespace rswalk {

class RegimeModel {
 public:
  RegimeModel() = default;
  /// Regime a uses processes[regime_process[a]]. Throws ConfigError when Q is
  /// not square and row-stochastic within 1e-12 or the mapping is invalid.
  RegimeModel(Mat q, std::vector<EnvSpec> processes, std::vector<std::size_t> regime_process,
              std::vector<std::string> process_names = {});

  /// One process per regime.
  static RegimeModel with_specs(Mat q, const std::vector<EnvSpec>& specs);

  std::size_t m() const noexcept { return q_.rows(); }
  const Mat& Q() const noexcept { return q_; }
  const std::vector<EnvSpec>& processes() const noexcept { return processes_; }
  const std::vector<std::string>& process_names() const noexcept { return names_; }
  const std::vector<std::size_t>& regime_process() const noexcept { return regime_process_; }
  std::size_t process_of(std::size_t regime) const { return regime_process_.at(regime); }
  const EnvSpec& spec(std::size_t regime) const { return processes_.at(process_of(regime)); }

  /// lcm of the periods, 0 unless every process is periodic.
  std::size_t period() const noexcept;
  bool periodic() const noexcept { return period() != 0; }
  bool invertible_shift() const noexcept;

  /// Process t is realized with seed derive_seed(seed, t).
  EnvRealization realize(Window window, std::uint64_t seed) const;

  friend bool operator==(const RegimeModel&, const RegimeModel&) = default;

 private:
  Mat q_;
  std::vector<EnvSpec> processes_;
  std::vector<std::size_t> regime_process_;
  std::vector<std::string> names_;
};

/// Q written as (pi; Theta pi) after moving r independent rows first.
struct RankDecomposition {
  std::size_t r = 0;
  /// order[k] is the original index of the k-th regime in the permuted
  /// labelling; the first r entries are the independent rows.
  std::vector<std::size_t> order;
  Mat pi;     ///< r x m, columns in permuted order
  Mat theta;  ///< (m-r) x r

  /// P Q P^T in permuted order.
  Mat permuted_q;

  /// Rebuilds Q in the original labelling.
  Mat reconstruct() const;
};

/// Greedy row selection in index order; a row joins pi when it raises the
/// numerical rank (singular values below tol times the largest count as 0).
RankDecomposition rank_decompose(const Mat& q, double tol = 1e-9);

enum class TransferPath { Full, RankR, RankOne };
std::string to_string(TransferPath path);

struct TransferMatrices {
  long site = 0;
  TransferPath path = TransferPath::Full;
  Mat delta;  ///< m x m diag(p_i^(1..m)), original labelling
  Mat M;      ///< Q Delta_i
  Mat N;      ///< Q (I - Delta_i)
  double det_M = 0.0;
  double det_N = 0.0;
  std::optional<Mat> sigma;  ///< M^-1 N
  std::optional<Mat> A;      ///< (M^-1, -sigma; I, 0)
  std::optional<Mat> B;      ///< (N^-1, -N^-1 M; I, 0) = G A^-1 G
  // Reduced r-dimensional recursion, in permuted labelling.
  Mat M_red;
  Mat N_red;
  double det_M_red = 0.0;
  double det_N_red = 0.0;
  std::optional<Mat> sigma_red;
  std::optional<Mat> A_red;
  std::optional<Mat> B_red;
};

/// Builds transfer matrices for one model; caches the rank decomposition.
class TransferBuilder {
 public:
  explicit TransferBuilder(const RegimeModel& model, double rank_tol = 1e-9);

  const RegimeModel& model() const noexcept { return *model_; }
  const RankDecomposition& rank() const noexcept { return rank_; }
  TransferPath path() const noexcept { return path_; }
  /// Dimension r of the reduced recursion (m on the full path).
  std::size_t reduced_dim() const noexcept { return rank_.r; }

  TransferMatrices at(const EnvRealization& e, long i) const;

  Mat delta(const EnvRealization& e, long i) const;
  Mat M(const EnvRealization& e, long i) const;
  Mat N(const EnvRealization& e, long i) const;

  /// Reduced (M_red, N_red) pair at site i.
  std::pair<Mat, Mat> reduced(const EnvRealization& e, long i) const;

  /// A_i of the reduced recursion (full A_i when r = m). Throws
  /// NumericError(Singular) when |det M_red| <= 1e-12.
  Mat A(const EnvRealization& e, long i) const;
  /// Inverse of A(e, i). Requires N_red invertible.
  Mat A_inverse(const EnvRealization& e, long i) const;

 private:
  const RegimeModel* model_;
  RankDecomposition rank_;
  TransferPath path_;
};

/// Block swap G = (0, I; I, 0) of size 2k.
Mat block_swap(std::size_t k);

/// (M^-1, -M^-1 N; I, 0).
Mat transfer_from(const Mat& M, const Mat& N);

struct HypothesisSite {
  long site = 0;
  double det_M = 0.0;
  double det_N = 0.0;
};

struct HypothesisReport {
  bool holds = true;
  double tol = 1e-12;
  std::vector<HypothesisSite> sites;
};

/// Invertibility of the reduced M and N at every site of the window.
HypothesisReport check_hypothesis_inv(const TransferBuilder& builder, const EnvRealization& e,
                                      Window sites, double tol = 1e-12);

/// Collapse of a rank-deficient reduced recursion to a scalar chain:
/// M_red_i = a_i w^T and N_red_i = b_i w^T with w^T 1 = 1, so g_i = w^T f_i
/// obeys g_i = p_i g_{i+1} + (1 - p_i) g_{i-1} with p_i = w^T a_i.
struct DegenerateReduction {
  std::vector<double> w;  ///< length r, permuted labelling
  Window sites;
  std::vector<double> p;                ///< effective p_i over sites
  std::vector<std::vector<double>> a;   ///< a_i, length r
  std::vector<std::vector<double>> b;   ///< b_i, length r
};

/// Detects the collapse on a window. Returns nullopt when the reduced
/// matrices are not rank one with a common row vector, or when the regimes
/// carrying w do not share one environment process.
std::optional<DegenerateReduction> rank1_reduce_degenerate(const TransferBuilder& builder,
                                                           const EnvRealization& e, Window sites,
                                                           double tol = 1e-10);

struct IrreducibilityResult {
  enum class Verdict { Irreducible, Reducible, Unknown };
  Verdict verdict = Verdict::Unknown;
  std::size_t quotient_period = 0;
  /// States (regime 0-based, site mod quotient_period) of each strongly
  /// connected class.
  std::vector<std::vector<std::pair<std::size_t, long>>> classes;
};

std::string to_string(IrreducibilityResult::Verdict v);

/// Strongly connected components of the transition graph on
/// {regimes} x Z_quotient_period. Conclusive only for periodic environments.
IrreducibilityResult irreducibility_probe(const RegimeModel& model, const EnvRealization& e,
                                          std::size_t quotient_period);

}  // namespace rswalk
