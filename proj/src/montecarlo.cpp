#include "ucr/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ucr/parallel.hpp"

namespace ucr::mc {
namespace {

void check_trials(const McOptions& opts) {
  if (opts.trials < kMinTrials) throw std::invalid_argument("Monte-Carlo trials must be >= 1000");
}

// Neumaier sum; blocks are small, so one compensated accumulator per block
// and an in-order merge keep the totals independent of sharding.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    const double t = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

struct LinkAcc {
  std::vector<std::uint64_t> outages;
  std::vector<Kahan> rate;
  std::vector<Kahan> rate_sq;
  std::uint64_t trials = 0;

  explicit LinkAcc(std::size_t users) : outages(users, 0), rate(users), rate_sq(users) {}

  void merge(const LinkAcc& o) {
    for (std::size_t u = 0; u < outages.size(); ++u) {
      outages[u] += o.outages[u];
      rate[u].add(o.rate[u].value());
      rate_sq[u].add(o.rate_sq[u].value());
    }
    trials += o.trials;
  }
};

McEstimate mean_estimate(double sum, double sum_sq, std::uint64_t n, std::uint64_t seed) {
  McEstimate e;
  e.trials = n;
  e.seed = seed;
  const double dn = static_cast<double>(n);
  e.mean = sum / dn;
  const double var = std::max(0.0, (sum_sq - dn * e.mean * e.mean) / (dn - 1.0));
  e.std_error = std::sqrt(var / dn);
  e.ci_low = e.mean - kZ95 * e.std_error;
  e.ci_high = e.mean + kZ95 * e.std_error;
  return e;
}

}  // namespace

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t n, double z) {
  if (n == 0) throw std::invalid_argument("wilson_interval: n must be > 0");
  if (successes > n) throw std::invalid_argument("wilson_interval: successes exceed trials");
  const double dn = static_cast<double>(n);
  const double p = static_cast<double>(successes) / dn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / dn;
  const double centre = (p + z2 / (2.0 * dn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / dn + z2 / (4.0 * dn * dn)) / denom;
  double lo = std::max(0.0, centre - half);
  double hi = std::min(1.0, centre + half);
  // the endpoints are exact at 0 and n; keep them from drifting by rounding
  if (successes == 0) lo = 0.0;
  if (successes == n) hi = 1.0;
  return {lo, hi};
}

McEstimate proportion(std::uint64_t successes, std::uint64_t n, std::uint64_t seed, double z) {
  McEstimate e;
  e.trials = n;
  e.seed = seed;
  e.successes = successes;
  e.mean = static_cast<double>(successes) / static_cast<double>(n);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(n));
  std::tie(e.ci_low, e.ci_high) = wilson_interval(successes, n, z);
  return e;
}

LinkEstimates simulate(const NetworkTopology& topo, const LinkBudget& budget, Scheme scheme, double gamma_th,
                       const McOptions& opts, const std::optional<CsiErrorModel>& csi) {
  check_trials(opts);
  topo.validate();
  budget.validate();
  if (csi) csi->validate(topo);
  if (!(gamma_th >= 0.0)) throw std::invalid_argument("gamma_th must be >= 0");

  const auto users = static_cast<std::size_t>(topo.users);
  const double share = 1.0 / (2.0 * topo.users);
  const double om1 = csi ? csi->omega_h1_est : topo.omega_h1;
  const double om2 = csi ? csi->omega_h2_est : topo.omega_h2;
  const double om3 = csi ? csi->omega_f_est : topo.omega_f;

  const LinkAcc total = run_blocks(opts.trials, opts.workers, LinkAcc(users),
                                   [&](std::uint64_t begin, std::uint64_t end, LinkAcc& acc) {
    ChannelRealization real;
    SnrMatrix snr;
    MaxMinSolver solver;
    Assignment a;
    for (std::uint64_t t = begin; t < end; ++t) {
      RandomStream rng = RandomStream::for_trial(opts.seed, t);
      fill_realization(topo, om1, om2, om3, rng, real);
      if (csi)
        fill_snr_matrix_imperfect(real, *csi, topo, budget, snr);
      else
        fill_snr_matrix(real, topo, budget, snr);
      assign(scheme, snr, rng, solver, a);
      for (std::size_t u = 0; u < users; ++u) {
        const double g = a.effective_snr[u];
        if (g <= gamma_th) ++acc.outages[u];
        const double r = share * std::log2(1.0 + g);
        acc.rate[u].add(r);
        acc.rate_sq[u].add(r * r);
      }
    }
    acc.trials += end - begin;
  });

  LinkEstimates out;
  for (std::size_t u = 0; u < users; ++u) {
    out.outage.push_back(proportion(total.outages[u], total.trials, opts.seed));
    out.throughput.push_back(mean_estimate(total.rate[u].value(), total.rate_sq[u].value(), total.trials, opts.seed));
  }
  return out;
}

std::vector<McEstimate> estimate_outage(const NetworkTopology& topo, const LinkBudget& budget, Scheme scheme,
                                        double gamma_th, const McOptions& opts,
                                        const std::optional<CsiErrorModel>& csi) {
  return simulate(topo, budget, scheme, gamma_th, opts, csi).outage;
}

std::vector<McEstimate> estimate_throughput(const NetworkTopology& topo, const LinkBudget& budget, Scheme scheme,
                                            const McOptions& opts) {
  return simulate(topo, budget, scheme, budget.gamma_th, opts).throughput;
}

std::vector<McEstimate> estimate_cdf(const NetworkTopology& topo, const LinkBudget& budget,
                                     std::span<const double> grid, const McOptions& opts) {
  check_trials(opts);
  topo.validate();
  budget.validate();
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("estimate_cdf: grid must be ascending");

  NetworkTopology single = topo;
  single.users = 1;
  single.relays = 1;

  struct Counts {
    std::vector<std::uint64_t> below;
    std::uint64_t trials = 0;
    void merge(const Counts& o) {
      for (std::size_t i = 0; i < below.size(); ++i) below[i] += o.below[i];
      trials += o.trials;
    }
  };
  const Counts total = run_blocks(opts.trials, opts.workers, Counts{std::vector<std::uint64_t>(grid.size(), 0), 0},
                                  [&](std::uint64_t begin, std::uint64_t end, Counts& acc) {
    ChannelRealization real;
    SnrMatrix snr;
    for (std::uint64_t t = begin; t < end; ++t) {
      RandomStream rng = RandomStream::for_trial(opts.seed, t);
      fill_realization(single, single.omega_h1, single.omega_h2, single.omega_f, rng, real);
      fill_snr_matrix(real, single, budget, snr);
      const double g = snr(0, 0);
      // first grid point >= g; every point from there on counts the trial
      const auto first = std::lower_bound(grid.begin(), grid.end(), g);
      for (auto it = first; it != grid.end(); ++it) ++acc.below[static_cast<std::size_t>(it - grid.begin())];
    }
    acc.trials += end - begin;
  });

  std::vector<McEstimate> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out.push_back(proportion(total.below[i], total.trials, opts.seed));
  return out;
}

}  // namespace ucr::mc
