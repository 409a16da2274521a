#pragma once

// Lyapunov spectra of transfer-matrix products and the dimension counts
// d0 (exponents <= 0) and d0_minus (exponents < 0) used for classification.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rswalk/envgen.hpp"
#include "rswalk/model.hpp"
#include "rswalk/smallmat.hpp"

namespace rswalk {

enum class ProductSide { Forward, Inverse };
enum class SpectrumMethod { ExactPeriodic, QRIteration };

std::string to_string(ProductSide side);
std::string to_string(SpectrumMethod method);

struct SpectrumResult {
  std::vector<double> exponents;   ///< descending
  std::vector<double> std_errors;  ///< per exponent; empty on the exact path
  std::vector<Complex> eigenvalues;  ///< monodromy eigenvalues on the exact path
  std::size_t dim = 0;
  std::size_t d0 = 0;
  std::size_t d0_minus = 0;
  ProductSide side = ProductSide::Forward;
  SpectrumMethod method = SpectrumMethod::ExactPeriodic;
  bool reduced = false;  ///< computed from the rank-r recursion
  std::size_t n_steps = 0;
  std::size_t period = 0;
  double tol_zero = 0.0;
  bool low_confidence = false;
};

/// Recounts d0 and d0_minus from exponents with the given zero band.
void count_dimensions(SpectrumResult& s, double tol_zero);

/// step -> matrix, for steps 1..n_steps.
using MatrixStream = std::function<Mat(std::size_t step)>;

struct QrOptions {
  std::size_t n_steps = 100000;
  std::size_t reorth_every = 1;
  /// Negative selects max(1e-3, 3 * largest standard error).
  double tol_zero = -1.0;
  std::size_t blocks = 100;
  std::uint64_t frame_seed = 0x5eedf00dULL;
};

/// Exponents of stream(n) ... stream(1) from averaged log diag(R) of
/// re-orthonormalized products, with block-mean standard errors. Throws
/// NumericError(Singular) naming the step when the frame collapses.
SpectrumResult lyapunov_qr(const MatrixStream& stream, std::size_t dim, const QrOptions& opt);

/// Exponents log|eig(A_p ... A_1)| / p of the reduced transfer matrices over
/// one period; eigenvalue moduli within tol_zero of 1 in log scale count
/// as modulus one.
SpectrumResult exact_periodic_spectrum(const TransferBuilder& b, const EnvRealization& e,
                                       double tol_zero = 1e-6);

/// Product monodromy A_p ... A_1.
Mat monodromy(const TransferBuilder& b, const EnvRealization& e, long first_site, std::size_t length);

struct SpectrumOptions {
  double tol_exact = 1e-6;
  QrOptions qr;
  bool force_iterative = false;
};

/// Forward products A_n ... A_1 (sites 1..n). Exact for periodic
/// environments unless force_iterative.
SpectrumResult forward_spectrum(const TransferBuilder& b, const EnvRealization& e,
                                const SpectrumOptions& opt = {});

/// Inverse products (A_n ... A_1)^-1. The exact path inverts the monodromy
/// eigenvalues; the iterative path streams A_i^-T, whose products have the
/// same singular values. Marked low_confidence when the shift is not
/// invertible.
SpectrumResult inverse_spectrum(const TransferBuilder& b, const EnvRealization& e,
                                const SpectrumOptions& opt = {});

/// (d~0, d~0-) = (2k - d0-, 2k - d0) from a forward spectrum. Throws
/// ConfigError when the shift map is not invertible.
std::pair<std::size_t, std::size_t> ruelle_dual_dims(const SpectrumResult& forward,
                                                     bool invertible_shift);

struct Rank1Structure {
  std::size_t n = 0;
  /// max over k <= min(n, verify_limit) of the relative distance between the
  /// product A_k ... A_1 and (1+U_k, -U_k; 1+U_{k-1}, -U_{k-1}).
  double max_rel_error = 0.0;
  std::size_t verified_up_to = 0;
  double log_U = 0.0;        ///< log U_n
  double log_s = 0.0;        ///< log(sigma_1 ... sigma_n)
  double rate_U = 0.0;       ///< log(U_n) / n
  double rate_escape = 0.0;  ///< log((1+U_n)/s_n) / n
};

/// Checks the closed form of rank-one products with U_n = sigma_1 +
/// sigma_1 sigma_2 + ... + sigma_1...sigma_n, accumulating logs to avoid
/// overflow.
Rank1Structure rank1_product_structure(std::span<const double> sigma,
                                       std::size_t verify_limit = 200);

}  // namespace rswalk
