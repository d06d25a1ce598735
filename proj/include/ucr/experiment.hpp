#pragma once

// JSON experiment configuration, SNR sweeps to CSV and the
// validation report.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ucr/model.hpp"
#include "ucr/selection.hpp"

namespace ucr {

enum class Mode { Outage, Throughput, Pk, Validate };

std::string_view to_string(Mode mode);
/// Throws ConfigError for anything but outage|throughput|pk|validate.
Mode parse_mode(std::string_view name);

struct SweepSpec {
  std::string variable = "lambda_all";  ///< lambda_all or lambda2
  double start_db = 0.0;
  double stop_db = 40.0;
  double step_db = 5.0;

  /// start, start + step, ... up to stop (inclusive, to rounding).
  std::vector<double> points() const;
  bool operator==(const SweepSpec&) const = default;
};

/// Omega_e / Omega per hop.
struct CsiRatios {
  double h1 = 0.0;
  double h2 = 0.0;
  double f = 0.0;
  bool operator==(const CsiRatios&) const = default;
};

struct ExperimentConfig {
  int users = 1;
  int relays = 1;
  int m = 1;
  double omega_h1 = 1.0;
  double omega_h2 = 1.0;
  double omega_f = 1.0;
  double d1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;
  double beta = 2.0;
  double lambda1_db = 0.0;  ///< fixed values; the swept one(s) are overridden per point
  double lambda2_db = 0.0;
  double lambda3_db = 0.0;
  double gamma_th_db = 5.0;
  Scheme scheme = Scheme::MaxMin;
  Mode mode = Mode::Outage;
  SweepSpec sweep;
  std::uint64_t trials = 100'000;
  std::uint64_t seed = 1;
  std::optional<CsiRatios> csi;
  std::uint64_t pk_trials = 1'000'000;  ///< rank-placement MC when M*N > 10
  unsigned workers = 0;
  std::string output;  ///< empty = stdout

  /// Throws ConfigError naming the field and the violated constraint.
  void validate() const;

  NetworkTopology topology() const;
  LinkBudget budget_at(double sweep_db) const;
  std::optional<CsiErrorModel> csi_model() const;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses and validates a JSON object; unknown keys are rejected by name.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Pretty JSON that parse_config reads back to an equal config.
std::string dump_config(const ExperimentConfig& cfg);

inline constexpr std::string_view kSweepHeader =
    "sweep_db,user,outage_exact,outage_asym1,outage_asym2,outage_mc,mc_ci_low,mc_ci_high,throughput_exact,"
    "throughput_mc";

/// Seed used for sweep point `index`, derived from the master seed.
std::uint64_t point_seed(std::uint64_t seed, std::size_t index);

/// Rank distribution for each user as used by the sweep: exact for M*N <= 10,
/// otherwise Monte Carlo; pooled across users for exchangeable schemes.
std::vector<RankPlacementDistribution> sweep_rank_distributions(const ExperimentConfig& cfg);

/// One CSV row per (sweep point, user) for mode outage or throughput.
void run_sweep(const ExperimentConfig& cfg, std::ostream& csv);

/// user,k,probability for every user and rank.
void run_pk(const ExperimentConfig& cfg, std::ostream& csv);

enum class Verdict { Pass, Fail, Inconclusive };

struct CheckResult {
  std::string name;
  Verdict verdict = Verdict::Pass;
  std::string detail;
};

/// Checks that apply to the configuration: analytic against MC, slope,
/// array gain, floors, rank enumeration and fairness.
std::vector<CheckResult> run_validate(const ExperimentConfig& cfg);

/// Prints one line per check; returns false if any check failed.
bool print_report(const std::vector<CheckResult>& checks, std::ostream& out);

/// Formats a double with the shortest round-trip representation.
std::string format_number(double v);

}  // namespace ucr
