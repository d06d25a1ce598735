// Acceptance run: one PASS/FAIL line per criterion, at the configurations
// shipped in configs/.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracle.hpp"
#include "ucr/analytic.hpp"
#include "ucr/experiment.hpp"
#include "ucr/montecarlo.hpp"
#include "ucr/selection.hpp"

using namespace ucr;

namespace {

constexpr std::uint64_t kTrials = 1'000'000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double rel(double got, double want) { return std::fabs(got - want) / std::fabs(want); }

ExperimentConfig config(const char* name) {
  return load_config(std::filesystem::path(UCR_CONFIG_DIR) / (std::string(name) + ".json"));
}

std::vector<double> probs(const RankPlacementDistribution& d) { return d.probs; }

/// Least-squares slope of log10 P against Lambda_dB / 10.
double ls_slope(const std::function<double(double)>& outage, double from_db, double to_db) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (double db = from_db; db <= to_db + 1e-9; db += 1.0) {
    xs.push_back(db / 10.0);
    ys.push_back(std::log10(outage(db)));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Analytic outage must sit inside the 3-sigma Wilson interval at every point and user.
struct McSweep {
  int checked = 0;
  int outside = 0;
  double worst_z = 0.0;  // largest |analytic - mc| / sigma
  std::vector<mc::LinkEstimates> estimates;
  double seconds = 0.0;
};

McSweep outage_sweep(const ExperimentConfig& cfg, const std::vector<double>& points,
                     const std::vector<RankPlacementDistribution>& pk) {
  McSweep s;
  const auto topo = cfg.topology();
  const double gth = db_to_linear(cfg.gamma_th_db);
  const auto csi = cfg.csi_model();
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto budget = cfg.budget_at(points[i]);
    auto est = mc::simulate(topo, budget, cfg.scheme, gth, {kTrials, point_seed(cfg.seed, i), cfg.workers}, csi);
    for (int u = 0; u < cfg.users; ++u) {
      const auto p = probs(pk[static_cast<std::size_t>(u)]);
      const double exact = csi ? analytic::outage_probability_imperfect(gth, topo, budget, *csi, p)
                               : analytic::outage_probability(gth, topo, budget, p);
      const auto& e = est.outage[static_cast<std::size_t>(u)];
      const auto [lo, hi] = mc::wilson_interval(e.successes, e.trials, 3.0);
      ++s.checked;
      if (exact < lo || exact > hi) ++s.outside;
      const double sigma = std::sqrt(std::max(exact * (1 - exact), 1e-300) / static_cast<double>(e.trials));
      s.worst_z = std::max(s.worst_z, std::fabs(exact - e.mean) / sigma);
    }
    s.estimates.push_back(std::move(est));
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// fig1 MC results are reused by criterion 8.
McSweep g_fig1;

Outcome criterion1() {
  const auto cfg = config("fig1");
  const auto pk = sweep_rank_distributions(cfg);
  g_fig1 = outage_sweep(cfg, cfg.sweep.points(), pk);
  Outcome o;
  o.pass = g_fig1.outside == 0 && g_fig1.seconds <= 180.0;
  std::ostringstream d;
  d << "fig1: " << g_fig1.checked << " (point,user) cells, " << g_fig1.outside
    << " outside 3-sigma Wilson, max |z| " << fmt("%.2f", g_fig1.worst_z) << ", MC time "
    << fmt("%.1f", g_fig1.seconds) << " s (limit 180)";
  o.detail = d.str();
  return o;
}

Outcome criterion2() {
  const auto cfg = config("fig1");
  const auto topo = cfg.topology();
  const double gth = db_to_linear(cfg.gamma_th_db);
  auto slope_for = [&](Scheme scheme, int user) {
    const auto pk = probs(rank_placement_probs(cfg.users, cfg.relays, scheme, RankMethod::ExactEnumeration)
                              [static_cast<std::size_t>(user)]);
    return ls_slope(
        [&](double db) {
          const double l = db_to_linear(db);
          return analytic::outage_probability(gth, topo, LinkBudget{l, l, l, gth}, pk);
        },
        30.0, 40.0);
  };
  const double s_mm = slope_for(Scheme::MaxMin, 0);
  const double s_nrs = slope_for(Scheme::Naive, 1);
  const double s_rrs = slope_for(Scheme::Random, 0);
  Outcome o;
  o.pass = std::fabs(s_mm + 6) <= 0.6 && std::fabs(s_nrs + 4) <= 0.6 && std::fabs(s_rrs + 2) <= 0.3;
  o.detail = "slopes over 30-40 dB: max-min " + fmt("%.4f", s_mm) + " (-6 +/-10%), naive user 2 " +
             fmt("%.4f", s_nrs) + " (-4 +/-15%), random " + fmt("%.4f", s_rrs) + " (-2 +/-15%)";
  return o;
}

Outcome criterion3() {
  const auto cfg = config("fig1");
  const auto topo = cfg.topology();
  const double gth = db_to_linear(cfg.gamma_th_db);
  const auto pk = probs(sweep_rank_distributions(cfg)[0]);
  const double l = db_to_linear(60);
  const double ratio =
      analytic::asymptotic_outage_case1(gth, l, topo) / analytic::outage_probability(gth, topo, {l, l, l, gth}, pk);
  return {ratio >= 0.95 && ratio <= 1.05, "asymptote / exact at 60 dB = " + fmt("%.6f", ratio) + " (in [0.95, 1.05])"};
}

Outcome criterion4() {
  Outcome o;
  std::string d;
  for (const char* name : {"fig2", "fig2_m3"}) {
    const auto cfg = config(name);
    const auto topo = cfg.topology();
    const double gth = db_to_linear(cfg.gamma_th_db);
    const auto pk = probs(sweep_rank_distributions(cfg)[0]);
    const auto b = cfg.budget_at(60);
    const double floor = analytic::asymptotic_outage_case2(gth, topo, b, pk);
    const double gap = std::fabs(analytic::outage_probability(gth, topo, b, pk) - floor) / floor;
    o.pass = o.pass && gap <= 1e-3;
    d += std::string(d.empty() ? "" : ", ") + "m=" + std::to_string(cfg.m) + " rel gap " + fmt("%.2e", gap);
  }
  o.detail = "Lambda2 = 60 dB vs floor: " + d + " (limit 1e-3)";
  return o;
}

Outcome criterion5() {
  Outcome o;
  std::ostringstream d;
  for (const char* name : {"fig3", "fig3_m4"}) {
    const auto cfg = config(name);
    const auto topo = cfg.topology();
    const auto csi = *cfg.csi_model();
    const double gth = db_to_linear(cfg.gamma_th_db);
    const auto pk = sweep_rank_distributions(cfg);
    const auto sweep = outage_sweep(cfg, {0, 10, 20, 30, 40}, pk);
    const auto p = probs(pk[0]);
    const double l80 = db_to_linear(80);
    const double exact80 = analytic::outage_probability_imperfect(gth, topo, {l80, l80, l80, gth}, csi, p);
    const double floor = analytic::outage_floor_imperfect(gth, csi, cfg.users, cfg.relays, p);
    const double floor_gap = std::fabs(exact80 - floor) / floor;
    const auto zero = CsiErrorModel::from_error_ratios(topo, 0, 0, 0);
    double revert = 0.0;
    for (double db = 0; db <= 40; db += 1) {
      const auto b = cfg.budget_at(db);
      revert = std::max(revert, std::fabs(analytic::outage_probability_imperfect(gth, topo, b, zero, p) -
                                          analytic::outage_probability(gth, topo, b, p)));
    }
    o.pass = o.pass && sweep.outside == 0 && floor_gap <= 1e-3 && revert <= 1e-12;
    d << "M=" << cfg.users << ": " << sweep.outside << "/" << sweep.checked << " outside 3-sigma (max |z| "
      << fmt("%.2f", sweep.worst_z) << "), floor gap at 80 dB " << fmt("%.2e", floor_gap)
      << ", zero-error reversion " << fmt("%.1e", revert) << "; ";
  }
  o.detail = d.str();
  return o;
}

Outcome criterion6() {
  const auto cfg = config("fig4");
  const auto topo = cfg.topology();
  const auto pk = sweep_rank_distributions(cfg);
  const auto points = cfg.sweep.points();
  int outside = 0;
  int checked = 0;
  double worst_rel = 0.0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto b = cfg.budget_at(points[i]);
    const auto est = mc::estimate_throughput(topo, b, cfg.scheme, {kTrials, point_seed(cfg.seed, i), cfg.workers});
    for (int u = 0; u < cfg.users; ++u) {
      const double exact =
          analytic::average_throughput(topo, b, probs(pk[static_cast<std::size_t>(u)])).average_bpcu;
      const auto& e = est[static_cast<std::size_t>(u)];
      const double z = std::fabs(exact - e.mean) / e.std_error;
      ++checked;
      if (z > 3.0 || rel(exact, e.mean) > 0.01) ++outside;
      worst_rel = std::max(worst_rel, rel(exact, e.mean));
      worst_z = std::max(worst_z, z);
    }
  }
  // the same double sum with every rank weight set to 1
  double unweighted_gap = 0.0;
  {
    const auto b = cfg.budget_at(points.back());
    const std::vector<double> ones(pk[0].probs.size(), 1.0);
    const auto est = mc::estimate_throughput(topo, b, cfg.scheme, {100'000, point_seed(cfg.seed, 0), cfg.workers});
    unweighted_gap = rel(analytic::average_throughput(topo, b, ones).average_bpcu, est[0].mean);
  }
  double h_worst = 0.0;
  for (int j = 0; j <= 6; ++j)
    for (double d : {0.25, 1.0, 4.0})
      for (double at : {0.1, 1.0, 10.0}) h_worst = std::max(h_worst, rel(analytic::h_integral(j, at, d), oracle::h_integral(j, at, d)));
  Outcome o;
  o.pass = outside == 0 && h_worst <= 1e-8;
  o.detail = "fig4: " + std::to_string(outside) + "/" + std::to_string(checked) +
             " cells outside 3-sigma or 1%, max rel gap " + fmt("%.2e", worst_rel) + ", max |z| " +
             fmt("%.2f", worst_z) + "; h grid max rel err " + fmt("%.1e", h_worst) + " (limit 1e-8); without rank weights the gap would be " + fmt("%.0f%%", 100 * unweighted_gap);
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::ostringstream d;
  for (auto [m, n] : {std::pair{2, 2}, {2, 3}, {3, 3}}) {
    const auto pk = rank_placement_probs(m, n, Scheme::MaxMin, RankMethod::ExactEnumeration);
    for (const auto& user : pk) {
      std::uint64_t counted = 0;
      for (auto c : user.counts) counted += c;
      o.pass = o.pass && counted == user.total;
    }
    d << "(" << m << "," << n << ") counts sum to " << pk[0].total << "; ";
  }
  const auto p22 = rank_placement_probs(2, 2, Scheme::MaxMin, RankMethod::ExactEnumeration)[0];
  const bool third = p22.counts.back() * 3 == p22.total;
  const auto p23 = rank_placement_probs(2, 3, Scheme::MaxMin, RankMethod::ExactEnumeration)[0];
  const bool worst23 = p23.counts.back() * 20 == p23.total && analytic::worst_case_rank_prob(2, 3) == 1.0 / 20.0;
  o.pass = o.pass && third && worst23;
  d << "P(rank 3 | 2x2) = " << p22.counts.back() << "/" << p22.total << (third ? " = 1/3" : " != 1/3")
    << "; P(rank 4 | 2x3) = " << p23.counts.back() << "/" << p23.total << ", formula "
    << fmt("%.6f", analytic::worst_case_rank_prob(2, 3));
  o.detail = d.str();
  return o;
}

Outcome criterion8() {
  RandomStream rng(8);
  int mismatches = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t users = 1 + rng.below(3);
    const std::size_t relays = users + rng.below(5 - users);
    SnrMatrix snr(users, relays);
    for (auto& v : snr.data()) v = rng.exponential();
    const auto a = maxmin_assign(snr);
    const double got = *std::min_element(a.effective_snr.begin(), a.effective_snr.end());
    if (got != oracle::brute_bottleneck(snr)) ++mismatches;
  }
  // two-proportion z between the fig1 users at every sweep point
  double worst_z = 0.0;
  for (const auto& est : g_fig1.estimates) {
    const auto& a = est.outage[0];
    const auto& b = est.outage[1];
    const double pooled = static_cast<double>(a.successes + b.successes) / static_cast<double>(a.trials + b.trials);
    const double se = std::sqrt(pooled * (1 - pooled) * (1.0 / a.trials + 1.0 / b.trials));
    if (se > 0) worst_z = std::max(worst_z, std::fabs(a.mean - b.mean) / se);
  }
  const auto cfg = config("fig1");
  const auto topo = cfg.topology();
  const double gth = db_to_linear(cfg.gamma_th_db);
  const auto per_user = rank_placement_probs(cfg.users, cfg.relays, Scheme::MaxMin, RankMethod::ExactEnumeration);
  double spread = 0.0;
  for (double db = 0; db <= 40; db += 5) {
    const auto b = cfg.budget_at(db);
    const double p0 = analytic::outage_probability(gth, topo, b, probs(per_user[0]));
    for (const auto& user : per_user)
      spread = std::max(spread, std::fabs(analytic::outage_probability(gth, topo, b, probs(user)) - p0));
  }
  Outcome o;
  o.pass = mismatches == 0 && !g_fig1.estimates.empty() && worst_z < 3.0 && spread <= 1e-12;
  o.detail = std::to_string(mismatches) + " bottleneck mismatches in 10^4 matrices; max user |z| " +
             fmt("%.2f", worst_z) + " (limit 3); analytic user spread " + fmt("%.1e", spread);
  return o;
}

Outcome criterion9() {
  RandomStream rng(9);
  int changed = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t users = 1 + rng.below(3);
    const std::size_t relays = users + rng.below(5 - users);
    SnrMatrix snr(users, relays);
    for (auto& v : snr.data()) v = rng.exponential() * 100.0;
    auto mapped = snr;
    for (auto& v : mapped.data()) v = std::log1p(v);
    if (maxmin_assign(snr).relay_of_user != maxmin_assign(mapped).relay_of_user) ++changed;
    if (naive_assign(snr).relay_of_user != naive_assign(mapped).relay_of_user) ++changed;
  }
  return {changed == 0, std::to_string(changed) + " changed assignments over 10^4 matrices"};
}

Outcome criterion10() {
  double gamma_worst = 0.0;
  for (int m : {1, 2, 3, 4, 6, 10})
    for (double x : {1e-8, 1e-4, 0.01, 0.3, 1.0, 2.0, 3.7, 7.5, 15.0, 40.0}) {
      gamma_worst = std::max(gamma_worst, rel(specfun::lower_incomplete_gamma(m, x), oracle::lower_gamma(m, x)));
      gamma_worst = std::max(gamma_worst, rel(specfun::upper_incomplete_gamma(m, x), oracle::upper_gamma(m, x)));
    }
  double ei_worst = 0.0;
  for (int i = 0; i <= 60; ++i) {
    const double p = std::pow(10.0, -3.0 + 0.1 * i);
    ei_worst = std::max(ei_worst, rel(specfun::exp_scaled_ei(p), -oracle::exp_scaled_e1(p)));
    if (p < 1.0) ei_worst = std::max(ei_worst, rel(specfun::exp_scaled_ei(p), std::exp(p) * oracle::ei_negative_series(p)));
  }
  return {gamma_worst <= 1e-12 && ei_worst <= 1e-10,
          "incomplete gamma max rel err " + fmt("%.1e", gamma_worst) + " (limit 1e-12); exp_scaled_ei " +
              fmt("%.1e", ei_worst) + " (limit 1e-10)"};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {criterion1, criterion2, criterion3, criterion4,
                                                          criterion5, criterion6, criterion7, criterion8,
                                                          criterion9, criterion10};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %zu: %s\n", o.pass ? "PASS" : "FAIL", i + 1, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
