#pragma once

// Closed-form performance of max-min relay selection: exact outage, high-SNR
// asymptotics, the imperfect-CSI outage and the Rayleigh average throughput.
//
// Every outage/throughput entry point takes the rank-placement distribution
// explicitly, so results are reproducible for a fixed distribution and the
// (possibly expensive) distribution can be computed once per shape.

#include <optional>
#include <span>
#include <vector>

#include "ucr/model.hpp"

namespace ucr::analytic {

struct OutageResult {
  double exact = 0.0;
  std::optional<double> asymptotic_case1;  ///< A * Lambda^{-mN}, when Lambda1 = Lambda2 = Lambda3
  std::optional<double> asymptotic_case2;  ///< floor for Lambda2 -> inf
  int diversity_order = 0;                 ///< m * N
  double array_gain = 0.0;
};

struct ThroughputResult {
  double average_bpcu = 0.0;
};

/// CDF of a single end-to-end SNR gamma_ij (integer m, any Lambdas).
double cdf_min_snr(double x, const NetworkTopology& topo, const LinkBudget& budget);

/// CDF of gamma_ij in the Lambda2 -> inf limit (fixed Lambda1, Lambda3).
double cdf_min_snr_floor(double x, const NetworkTopology& topo, const LinkBudget& budget);

/// CDF of the k-th largest of M*N i.i.d. entries whose common CDF value is
/// `cdf_point`, via the alternating order-statistic sum. Throws NumericError
/// when cancellation pushes the sum outside [-1e-9, 1 + 1e-9].
double cdf_kth_order(int k, int users, int relays, double cdf_point);

/// sum_k pk[k] * F_{gamma^(k)}, given the single-entry CDF value.
double outage_from_cdf(double cdf_point, int users, int relays, std::span<const double> pk);

/// Exact per-user outage for the rank distribution `pk`.
double outage_probability(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                          std::span<const double> pk);

/// The constant G(m) of the small-x expansion F(x) ~ G(m) (x / Lambda)^m.
double g_of_m(const NetworkTopology& topo);

/// P(gamma_(u) = gamma^((M-1)N+1)) for N >= M.
double worst_case_rank_prob(int users, int relays);

/// Array gain A such that P_o ~ A * Lambda^{-mN}.
double array_gain(double gamma_th, const NetworkTopology& topo);

/// A * Lambda^{-mN} for Lambda1 = Lambda2 = Lambda3 = lambda.
double asymptotic_outage_case1(double gamma_th, double lambda, const NetworkTopology& topo);

/// Outage floor reached as Lambda2 -> inf with Lambda1, Lambda3 fixed.
double asymptotic_outage_case2(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                               std::span<const double> pk);

/// Exact outage plus both asymptotic forms where they apply.
OutageResult outage_report(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                           std::span<const double> pk);

/// Rayleigh CDF of gamma_ij built from channel estimates (m = 1 only).
double cdf_min_snr_imperfect(double x, const NetworkTopology& topo, const LinkBudget& budget,
                             const CsiErrorModel& csi);

/// Imperfect-CSI outage from the estimate-based CDF.
double outage_probability_imperfect(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                                    const CsiErrorModel& csi, std::span<const double> pk);

/// Outage floor under imperfect CSI as all Lambdas grow together.
double outage_floor_imperfect(double gamma_th, const CsiErrorModel& csi, int users, int relays,
                              std::span<const double> pk);

/// int_0^inf e^{-at x} / ((x + 1) (x + d)^j) dx.
double h_integral(int j, double at, double d);

/// h_integral for j = 0..jmax in one pass.
std::vector<double> h_integrals(int jmax, double at, double d);

/// Per-user average throughput (bits per channel use, 1/(2M) time share)
/// under Rayleigh fading, weighted by `pk`.
ThroughputResult average_throughput(const NetworkTopology& topo, const LinkBudget& budget,
                                    std::span<const double> pk);

}  // namespace ucr::analytic
