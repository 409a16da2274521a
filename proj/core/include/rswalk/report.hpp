#pragma once

// JSON reports and CSV tables. Regimes are labelled 1..m in every output.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "rswalk/classify.hpp"
#include "rswalk/hitting.hpp"
#include "rswalk/simulate.hpp"
#include "rswalk/spectral.hpp"

namespace rswalk {

inline constexpr int kReportSchemaVersion = 1;

/// {"schema_version": 1, "kind": kind}
nlohmann::json report_header(const std::string& kind);

nlohmann::json to_json(const Classification& c);
nlohmann::json to_json(const SpectrumResult& s);
nlohmann::json to_json(const CounterexampleResult& r);
nlohmann::json to_json(const GammaEstimate& g);

/// Columns: alpha,i,f,f_beta_1..f_beta_m,boundary_mode
void write_hitting_csv(std::ostream& out, const HittingTable& t);
/// Columns: n,G,X
void write_trajectory_csv(std::ostream& out, const Trajectory& t);

struct FortuneCurve {
  std::string game;
  std::vector<long> fortune;  ///< fortune after games 1..N
};

/// Long format, one row per game and step. Columns: game,n,fortune
void write_fortune_csv(std::ostream& out, const std::vector<FortuneCurve>& curves);
/// Columns: pi1,mu
void write_mu_curve_csv(std::ostream& out, const std::vector<MuPoint>& curve);

/// Shortest decimal that reads back to the same double.
std::string format_double(double v);

}  // namespace rswalk
