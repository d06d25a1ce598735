#pragma once

// Seeded Monte-Carlo estimates of outage, throughput and the single-entry CDF.
// Trial t always draws from RandomStream::for_trial(seed, t), and partial sums
// are merged in fixed block order, so results are bit-identical for any
// worker count.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "ucr/model.hpp"
#include "ucr/selection.hpp"

namespace ucr::mc {

struct McEstimate {
  double mean = 0.0;
  double ci_low = 0.0;   ///< 95% interval
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t successes = 0;  ///< indicator count for proportions, 0 otherwise
  double std_error = 0.0;       ///< sample standard error (throughput) or sqrt(p(1-p)/n)
};

struct McOptions {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  ///< 0 = hardware concurrency
};

inline constexpr std::uint64_t kMinTrials = 1000;
inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `n` at normal quantile z.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double z = kZ95);

/// Proportion estimate with its Wilson interval at quantile z.
McEstimate proportion(std::uint64_t successes, std::uint64_t n, std::uint64_t seed, double z = kZ95);

struct LinkEstimates {
  std::vector<McEstimate> outage;      ///< per user
  std::vector<McEstimate> throughput;  ///< per user, bits per channel use
};

/// One pass producing both per-user outage and throughput. With `csi` the
/// selection and the SNRs use channel estimates.
LinkEstimates simulate(const NetworkTopology& topo, const LinkBudget& budget, Scheme scheme, double gamma_th,
                       const McOptions& opts, const std::optional<CsiErrorModel>& csi = std::nullopt);

std::vector<McEstimate> estimate_outage(const NetworkTopology& topo, const LinkBudget& budget, Scheme scheme,
                                        double gamma_th, const McOptions& opts,
                                        const std::optional<CsiErrorModel>& csi = std::nullopt);

std::vector<McEstimate> estimate_throughput(const NetworkTopology& topo, const LinkBudget& budget, Scheme scheme,
                                            const McOptions& opts);

/// Empirical CDF of one gamma_ij entry on an ascending grid.
std::vector<McEstimate> estimate_cdf(const NetworkTopology& topo, const LinkBudget& budget,
                                     std::span<const double> grid, const McOptions& opts);

}  // namespace ucr::mc
