#include "ucr/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "ucr/analytic.hpp"
#include "ucr/errors.hpp"
#include "ucr/montecarlo.hpp"

namespace ucr {
namespace {

using nlohmann::json;

const char* const kTopKeys[] = {"M",         "N",          "m",          "omega_h1",    "omega_h2", "omega_f",
                                "d1",        "d2",         "d3",         "beta",        "lambda1_db", "lambda2_db",
                                "lambda3_db", "gamma_th_db", "scheme",   "mode",        "sweep",    "trials",
                                "seed",      "csi",        "pk_trials",  "workers",     "output"};
const char* const kSweepKeys[] = {"variable", "start_db", "stop_db", "step_db"};
const char* const kCsiKeys[] = {"error_ratio_h1", "error_ratio_h2", "error_ratio_f"};

template <std::size_t N>
void reject_unknown(const json& obj, const char* const (&known)[N], const std::string& prefix) {
  for (const auto& item : obj.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return item.key() == k; }) ==
        std::end(known))
      throw ConfigError("unknown key '" + prefix + item.key() + "'");
  }
}

double get_real(const json& obj, const char* key, double fallback, const std::string& prefix = "") {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("'" + prefix + key + "' must be a number");
  return v.get<double>();
}

std::int64_t get_integer(const json& obj, const char* key, std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(std::string("'") + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::uint64_t get_unsigned(const json& obj, const char* key, std::uint64_t fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(std::string("'") + key + "' must be a non-negative integer");
}

std::string get_string(const json& obj, const char* key, const std::string& fallback, const std::string& prefix = "") {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError("'" + prefix + key + "' must be a string");
  return v.get<std::string>();
}

int narrow_int(std::int64_t v, const char* key) {
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    throw ConfigError(std::string("'") + key + "' is out of range");
  return static_cast<int>(v);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void require_positive(double v, const char* name) {
  require(std::isfinite(v) && v > 0.0, std::string(name) + " must be a positive finite number");
}

std::string fmt_opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

const char* verdict_label(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "PASS";
    case Verdict::Fail: return "FAIL";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(4);
  os << std::scientific << v;
  return os.str();
}

// Per-user analytic values at one sweep point.
struct PointAnalytic {
  std::vector<double> outage;
  std::vector<std::optional<double>> asym1;
  std::vector<std::optional<double>> asym2;
  std::vector<std::optional<double>> throughput;
};

PointAnalytic analyse_point(const ExperimentConfig& cfg, double sweep_db,
                            const std::vector<RankPlacementDistribution>& pk, bool throughput) {
  const NetworkTopology topo = cfg.topology();
  const LinkBudget budget = cfg.budget_at(sweep_db);
  const auto csi = cfg.csi_model();
  PointAnalytic out;
  for (int u = 0; u < cfg.users; ++u) {
    const auto& probs = pk[static_cast<std::size_t>(u)].probs;
    if (throughput) {
      out.throughput.push_back(cfg.m == 1 && !csi ? std::optional(analytic::average_throughput(topo, budget, probs).average_bpcu)
                                                  : std::nullopt);
      continue;
    }
    if (csi) {
      out.outage.push_back(analytic::outage_probability_imperfect(budget.gamma_th, topo, budget, *csi, probs));
      out.asym1.push_back(std::nullopt);
      out.asym2.push_back(analytic::outage_floor_imperfect(budget.gamma_th, *csi, cfg.users, cfg.relays, probs));
      continue;
    }
    out.outage.push_back(analytic::outage_probability(budget.gamma_th, topo, budget, probs));
    if (cfg.scheme == Scheme::MaxMin && cfg.sweep.variable == "lambda_all")
      out.asym1.push_back(analytic::asymptotic_outage_case1(budget.gamma_th, budget.lambda1, topo));
    else
      out.asym1.push_back(std::nullopt);
    if (cfg.sweep.variable == "lambda2")
      out.asym2.push_back(analytic::asymptotic_outage_case2(budget.gamma_th, topo, budget, probs));
    else
      out.asym2.push_back(std::nullopt);
  }
  return out;
}

mc::McOptions point_options(const ExperimentConfig& cfg, std::size_t index) {
  return {cfg.trials, point_seed(cfg.seed, index), cfg.workers};
}

double outage_at(const ExperimentConfig& cfg, double sweep_db, std::span<const double> probs) {
  const NetworkTopology topo = cfg.topology();
  const LinkBudget budget = cfg.budget_at(sweep_db);
  if (const auto csi = cfg.csi_model())
    return analytic::outage_probability_imperfect(budget.gamma_th, topo, budget, *csi, probs);
  return analytic::outage_probability(budget.gamma_th, topo, budget, probs);
}

CheckResult check_outage_vs_mc(const ExperimentConfig& cfg, const std::vector<RankPlacementDistribution>& pk,
                               const std::vector<mc::LinkEstimates>& mc_points) {
  CheckResult r{"outage analytic inside MC 3-sigma Wilson interval", Verdict::Pass, ""};
  const auto points = cfg.sweep.points();
  double widest = 0.0;
  double worst_excess = 0.0;
  std::string where;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto analytic = analyse_point(cfg, points[i], pk, false);
    const auto& est = mc_points[i].outage;
    for (int u = 0; u < cfg.users; ++u) {
      const auto& e = est[static_cast<std::size_t>(u)];
      const auto [lo, hi] = mc::wilson_interval(e.successes, e.trials, 3.0);
      widest = std::max(widest, (hi - lo) / 2.0);
      const double a = analytic.outage[static_cast<std::size_t>(u)];
      const double excess = std::max(lo - a, a - hi);
      if (excess > worst_excess) {
        worst_excess = excess;
        where = "at " + format_number(points[i]) + " dB user " + std::to_string(u + 1) + ": analytic " + sci(a) +
                " vs [" + sci(lo) + ", " + sci(hi) + "]";
      }
    }
  }
  if (widest > 0.01) {
    r.verdict = Verdict::Inconclusive;
    r.detail = "CI too wide (3-sigma half-width " + sci(widest) + " > 0.01)";
  } else if (worst_excess > 0.0) {
    r.verdict = Verdict::Fail;
    r.detail = "outside " + where;
  } else {
    r.detail = std::to_string(points.size()) + " points x " + std::to_string(cfg.users) + " users, max half-width " +
               sci(widest);
  }
  return r;
}

CheckResult check_mc_fairness(const ExperimentConfig& cfg, const std::vector<mc::LinkEstimates>& mc_points) {
  CheckResult r{"max-min MC outage equal across users (|z| < 3)", Verdict::Pass, ""};
  const auto points = cfg.sweep.points();
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& est = mc_points[i].outage;
    for (std::size_t a = 0; a < est.size(); ++a) {
      for (std::size_t b = a + 1; b < est.size(); ++b) {
        const double n = static_cast<double>(est[a].trials);
        const double pool = static_cast<double>(est[a].successes + est[b].successes) / (2.0 * n);
        const double se = std::sqrt(pool * (1.0 - pool) * 2.0 / n);
        const double z = se > 0.0 ? (est[a].mean - est[b].mean) / se : 0.0;
        worst = std::max(worst, std::fabs(z));
      }
    }
  }
  if (worst >= 3.0) r.verdict = Verdict::Fail;
  r.detail = "max |z| = " + format_number(worst);
  return r;
}

CheckResult check_throughput_vs_mc(const ExperimentConfig& cfg, const std::vector<RankPlacementDistribution>& pk,
                                   const std::vector<mc::LinkEstimates>& mc_points) {
  CheckResult r{"throughput closed form inside MC 3-sigma interval and within 1%", Verdict::Pass, ""};
  const auto points = cfg.sweep.points();
  double widest = 0.0;
  double worst_rel = 0.0;
  bool outside = false;
  std::string where;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto analytic = analyse_point(cfg, points[i], pk, true);
    const auto& est = mc_points[i].throughput;
    for (int u = 0; u < cfg.users; ++u) {
      const auto& e = est[static_cast<std::size_t>(u)];
      const double a = *analytic.throughput[static_cast<std::size_t>(u)];
      widest = std::max(widest, 3.0 * e.std_error / e.mean);
      const double rel = std::fabs(a - e.mean) / e.mean;
      const bool in = std::fabs(a - e.mean) <= 3.0 * e.std_error && rel <= 0.01;
      if (!in) outside = true;
      if (rel > worst_rel || (!in && where.empty())) {
        worst_rel = std::max(worst_rel, rel);
        where = "at " + format_number(points[i]) + " dB user " + std::to_string(u + 1) + ": closed form " +
                format_number(a) + " vs MC " + format_number(e.mean) + " +- " + sci(3.0 * e.std_error);
      }
    }
  }
  if (widest > 0.01) {
    r.verdict = Verdict::Inconclusive;
    r.detail = "CI too wide (3-sigma half-width " + sci(widest) + " of the mean > 1%)";
  } else if (outside) {
    r.verdict = Verdict::Fail;
    r.detail = "outside " + where;
  } else {
    r.detail = "max relative gap " + sci(worst_rel);
  }
  return r;
}

CheckResult check_analytic_fairness(const ExperimentConfig& cfg) {
  CheckResult r{"max-min analytic outage identical across users", Verdict::Pass, ""};
  // per-user exact distributions, not the pooled one the sweep uses
  const auto pk = rank_placement_probs(cfg.users, cfg.relays, cfg.scheme, RankMethod::ExactEnumeration);
  double worst = 0.0;
  for (double db : cfg.sweep.points()) {
    const double first = outage_at(cfg, db, pk[0].probs);
    for (int u = 1; u < cfg.users; ++u)
      worst = std::max(worst, std::fabs(outage_at(cfg, db, pk[static_cast<std::size_t>(u)].probs) - first));
  }
  if (worst > 1e-12) r.verdict = Verdict::Fail;
  r.detail = "max difference " + sci(worst);
  return r;
}

CheckResult check_slope(const ExperimentConfig& cfg, const std::vector<RankPlacementDistribution>& pk) {
  const int expected = cfg.m * cfg.relays;
  CheckResult r{"diversity order from slope over 30-40 dB", Verdict::Pass, ""};
  std::vector<double> xs;
  std::vector<double> ys;
  for (double db = 30.0; db <= 40.0 + 1e-9; db += 2.5) {
    xs.push_back(db / 10.0);
    ys.push_back(std::log10(outage_at(cfg, db, pk[0].probs)));
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (std::fabs(slope + expected) > 0.1 * expected) r.verdict = Verdict::Fail;
  r.detail = "slope " + format_number(slope) + ", expected -" + std::to_string(expected) + " within 10%";
  return r;
}

CheckResult check_array_gain(const ExperimentConfig& cfg, const std::vector<RankPlacementDistribution>& pk) {
  CheckResult r{"asymptote / exact at 60 dB in [0.95, 1.05]", Verdict::Pass, ""};
  const double exact = outage_at(cfg, 60.0, pk[0].probs);
  const double asym = analytic::asymptotic_outage_case1(db_to_linear(cfg.gamma_th_db), db_to_linear(60.0), cfg.topology());
  const double ratio = asym / exact;
  if (!(ratio >= 0.95 && ratio <= 1.05)) r.verdict = Verdict::Fail;
  r.detail = "ratio " + format_number(ratio);
  return r;
}

CheckResult check_lambda2_floor(const ExperimentConfig& cfg, const std::vector<RankPlacementDistribution>& pk) {
  CheckResult r{"exact at Lambda2 = 60 dB matches the Lambda2 floor within 0.1%", Verdict::Pass, ""};
  const LinkBudget budget = cfg.budget_at(60.0);
  const double exact = outage_at(cfg, 60.0, pk[0].probs);
  const double floor = analytic::asymptotic_outage_case2(budget.gamma_th, cfg.topology(), budget, pk[0].probs);
  const double rel = std::fabs(exact - floor) / floor;
  if (!(rel <= 1e-3)) r.verdict = Verdict::Fail;
  r.detail = "exact " + sci(exact) + ", floor " + sci(floor) + ", relative gap " + sci(rel);
  return r;
}

CheckResult check_csi_floor(const ExperimentConfig& cfg, const std::vector<RankPlacementDistribution>& pk) {
  CheckResult r{"imperfect-CSI exact at 80 dB matches the floor within 0.1%", Verdict::Pass, ""};
  const auto csi = *cfg.csi_model();
  const double exact = outage_at(cfg, 80.0, pk[0].probs);
  const double floor =
      analytic::outage_floor_imperfect(db_to_linear(cfg.gamma_th_db), csi, cfg.users, cfg.relays, pk[0].probs);
  const double rel = std::fabs(exact - floor) / floor;
  if (!(rel <= 1e-3)) r.verdict = Verdict::Fail;
  r.detail = "exact " + sci(exact) + ", floor " + sci(floor) + ", relative gap " + sci(rel);
  return r;
}

CheckResult check_csi_reversion(const ExperimentConfig& cfg, const std::vector<RankPlacementDistribution>& pk) {
  CheckResult r{"zero CSI error reproduces the perfect-CSI curve", Verdict::Pass, ""};
  ExperimentConfig perfect = cfg;
  perfect.csi = CsiRatios{};
  ExperimentConfig plain = cfg;
  plain.csi.reset();
  double worst = 0.0;
  for (double db : cfg.sweep.points())
    worst = std::max(worst, std::fabs(outage_at(perfect, db, pk[0].probs) - outage_at(plain, db, pk[0].probs)));
  if (worst > 1e-12) r.verdict = Verdict::Fail;
  r.detail = "max difference " + sci(worst);
  return r;
}

CheckResult check_enumeration(const ExperimentConfig& cfg) {
  CheckResult r{"exact rank placement sums to 1", Verdict::Pass, ""};
  const auto pk = rank_placement_probs(cfg.users, cfg.relays, cfg.scheme, RankMethod::ExactEnumeration);
  for (const auto& d : pk) {
    std::uint64_t sum = 0;
    for (auto c : d.counts) sum += c;
    if (sum != d.total) r.verdict = Verdict::Fail;
  }
  r.detail = "(" + std::to_string(cfg.relays * cfg.users) + ")! = " + std::to_string(pk[0].total) + " patterns";
  if (cfg.scheme == Scheme::MaxMin) {
    const int worst_rank = (cfg.users - 1) * cfg.relays + 1;
    const double formula = analytic::worst_case_rank_prob(cfg.users, cfg.relays);
    const double counted = pk[0].probs[static_cast<std::size_t>(worst_rank - 1)];
    if (std::fabs(formula - counted) > 1e-12 * formula) r.verdict = Verdict::Fail;
    r.detail += "; worst-rank probability " + format_number(counted) + " vs formula " + format_number(formula);
  }
  return r;
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::Outage: return "outage";
    case Mode::Throughput: return "throughput";
    case Mode::Pk: return "pk";
    case Mode::Validate: return "validate";
  }
  return "?";
}

Mode parse_mode(std::string_view name) {
  if (name == "outage") return Mode::Outage;
  if (name == "throughput") return Mode::Throughput;
  if (name == "pk") return Mode::Pk;
  if (name == "validate") return Mode::Validate;
  throw ConfigError("mode must be one of outage|throughput|pk|validate, got '" + std::string(name) + "'");
}

std::vector<double> SweepSpec::points() const {
  std::vector<double> out;
  const auto count = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
  for (std::size_t i = 0; i < count; ++i) out.push_back(start_db + static_cast<double>(i) * step_db);
  return out;
}

void ExperimentConfig::validate() const {
  require(users >= 1, "M must be >= 1");
  require(relays >= 1, "N must be >= 1");
  require(relays >= users, "N must be ≥ M (got M=" + std::to_string(users) + ", N=" + std::to_string(relays) + ")");
  require(m >= 1 && m <= 50, "m must be an integer in [1, 50]");
  require_positive(omega_h1, "omega_h1");
  require_positive(omega_h2, "omega_h2");
  require_positive(omega_f, "omega_f");
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(d3, "d3");
  require(std::isfinite(beta) && beta >= 0.0, "beta must be >= 0");
  for (double v : {lambda1_db, lambda2_db, lambda3_db, gamma_th_db})
    require(std::isfinite(v), "lambda*_db and gamma_th_db must be finite");
  require(sweep.variable == "lambda_all" || sweep.variable == "lambda2",
          "sweep.variable must be lambda_all or lambda2, got '" + sweep.variable + "'");
  require(std::isfinite(sweep.start_db) && std::isfinite(sweep.stop_db), "sweep bounds must be finite");
  require(std::isfinite(sweep.step_db) && sweep.step_db > 0.0, "sweep.step_db must be > 0");
  require(sweep.stop_db >= sweep.start_db, "sweep.stop_db must be >= sweep.start_db");
  require(trials >= mc::kMinTrials, "trials must be >= 1000");
  require(pk_trials >= mc::kMinTrials, "pk_trials must be >= 1000");
  if (csi) {
    require(m == 1, "csi requires m=1 (imperfect-CSI analysis is Rayleigh only)");
    for (double v : {csi->h1, csi->h2, csi->f})
      require(v >= 0.0 && v < 1.0, "csi error ratios must lie in [0, 1)");
  }
}

NetworkTopology ExperimentConfig::topology() const {
  NetworkTopology t;
  t.users = users;
  t.relays = relays;
  t.shape = GammaShape(m);
  t.omega_h1 = omega_h1;
  t.omega_h2 = omega_h2;
  t.omega_f = omega_f;
  t.d1 = d1;
  t.d2 = d2;
  t.d3 = d3;
  t.path_loss_exp = beta;
  return t;
}

LinkBudget ExperimentConfig::budget_at(double sweep_db) const {
  if (sweep.variable == "lambda_all") return LinkBudget::from_db(sweep_db, sweep_db, sweep_db, gamma_th_db);
  return LinkBudget::from_db(lambda1_db, sweep_db, lambda3_db, gamma_th_db);
}

std::optional<CsiErrorModel> ExperimentConfig::csi_model() const {
  if (!csi) return std::nullopt;
  return CsiErrorModel::from_error_ratios(topology(), csi->h1, csi->h2, csi->f);
}

ExperimentConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");
  reject_unknown(j, kTopKeys, "");
  require(j.contains("M") && j.contains("N"), "config must set M and N");

  ExperimentConfig c;
  c.users = narrow_int(get_integer(j, "M", c.users), "M");
  c.relays = narrow_int(get_integer(j, "N", c.relays), "N");
  c.m = narrow_int(get_integer(j, "m", c.m), "m");
  c.omega_h1 = get_real(j, "omega_h1", c.omega_h1);
  c.omega_h2 = get_real(j, "omega_h2", c.omega_h2);
  c.omega_f = get_real(j, "omega_f", c.omega_f);
  c.d1 = get_real(j, "d1", c.d1);
  c.d2 = get_real(j, "d2", c.d2);
  c.d3 = get_real(j, "d3", c.d3);
  c.beta = get_real(j, "beta", c.beta);
  c.lambda1_db = get_real(j, "lambda1_db", c.lambda1_db);
  c.lambda2_db = get_real(j, "lambda2_db", c.lambda2_db);
  c.lambda3_db = get_real(j, "lambda3_db", c.lambda3_db);
  c.gamma_th_db = get_real(j, "gamma_th_db", c.gamma_th_db);
  try {
    c.scheme = parse_scheme(get_string(j, "scheme", std::string(to_string(c.scheme))));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  c.mode = parse_mode(get_string(j, "mode", std::string(to_string(c.mode))));
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    require(s.is_object(), "'sweep' must be an object");
    reject_unknown(s, kSweepKeys, "sweep.");
    c.sweep.variable = get_string(s, "variable", c.sweep.variable, "sweep.");
    c.sweep.start_db = get_real(s, "start_db", c.sweep.start_db, "sweep.");
    c.sweep.stop_db = get_real(s, "stop_db", c.sweep.stop_db, "sweep.");
    c.sweep.step_db = get_real(s, "step_db", c.sweep.step_db, "sweep.");
  }
  c.trials = get_unsigned(j, "trials", c.trials);
  c.seed = get_unsigned(j, "seed", c.seed);
  if (j.contains("csi")) {
    const auto& s = j.at("csi");
    require(s.is_object(), "'csi' must be an object");
    reject_unknown(s, kCsiKeys, "csi.");
    CsiRatios r;
    r.h1 = get_real(s, "error_ratio_h1", 0.0, "csi.");
    r.h2 = get_real(s, "error_ratio_h2", 0.0, "csi.");
    r.f = get_real(s, "error_ratio_f", 0.0, "csi.");
    c.csi = r;
  }
  c.pk_trials = get_unsigned(j, "pk_trials", c.pk_trials);
  const auto workers = get_unsigned(j, "workers", c.workers);
  require(workers <= 4096, "workers must be <= 4096");
  c.workers = static_cast<unsigned>(workers);
  c.output = get_string(j, "output", c.output);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string dump_config(const ExperimentConfig& c) {
  json j = json::object();
  j["M"] = c.users;
  j["N"] = c.relays;
  j["m"] = c.m;
  j["omega_h1"] = c.omega_h1;
  j["omega_h2"] = c.omega_h2;
  j["omega_f"] = c.omega_f;
  j["d1"] = c.d1;
  j["d2"] = c.d2;
  j["d3"] = c.d3;
  j["beta"] = c.beta;
  j["lambda1_db"] = c.lambda1_db;
  j["lambda2_db"] = c.lambda2_db;
  j["lambda3_db"] = c.lambda3_db;
  j["gamma_th_db"] = c.gamma_th_db;
  j["scheme"] = std::string(to_string(c.scheme));
  j["mode"] = std::string(to_string(c.mode));
  j["sweep"] = {{"variable", c.sweep.variable},
                {"start_db", c.sweep.start_db},
                {"stop_db", c.sweep.stop_db},
                {"step_db", c.sweep.step_db}};
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  if (c.csi) j["csi"] = {{"error_ratio_h1", c.csi->h1}, {"error_ratio_h2", c.csi->h2}, {"error_ratio_f", c.csi->f}};
  j["pk_trials"] = c.pk_trials;
  j["workers"] = c.workers;
  j["output"] = c.output;
  return j.dump(2) + "\n";
}

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  std::uint64_t state = seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1));
  return RandomStream::splitmix64(state);
}

std::vector<RankPlacementDistribution> sweep_rank_distributions(const ExperimentConfig& cfg) {
  std::uint64_t state = cfg.seed ^ 0xA5A5F00DCAFEBEEFULL;
  const std::uint64_t pk_seed = RandomStream::splitmix64(state);
  auto per_user = rank_placement_auto(cfg.users, cfg.relays, cfg.scheme, cfg.pk_trials, pk_seed, cfg.workers);
  if (cfg.scheme == Scheme::Naive) return per_user;
  return std::vector<RankPlacementDistribution>(per_user.size(), pool_users(per_user));
}

void run_sweep(const ExperimentConfig& cfg, std::ostream& csv) {
  if (cfg.mode != Mode::Outage && cfg.mode != Mode::Throughput)
    throw std::invalid_argument("run_sweep handles the outage and throughput modes");
  const auto pk = sweep_rank_distributions(cfg);
  const auto points = cfg.sweep.points();
  const double gamma_th = db_to_linear(cfg.gamma_th_db);

  std::ostringstream rows;
  rows << kSweepHeader << '\n';
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto analytic = analyse_point(cfg, points[i], pk, cfg.mode == Mode::Throughput);
    const auto est =
        mc::simulate(cfg.topology(), cfg.budget_at(points[i]), cfg.scheme, gamma_th, point_options(cfg, i), cfg.csi_model());
    for (int u = 0; u < cfg.users; ++u) {
      const auto su = static_cast<std::size_t>(u);
      rows << format_number(points[i]) << ',' << (u + 1) << ',';
      if (cfg.mode == Mode::Outage) {
        const auto& e = est.outage[su];
        rows << format_number(analytic.outage[su]) << ',' << fmt_opt(analytic.asym1[su]) << ','
             << fmt_opt(analytic.asym2[su]) << ',' << format_number(e.mean) << ',' << format_number(e.ci_low) << ','
             << format_number(e.ci_high) << ",,\n";
      } else {
        rows << ",,,,,," << fmt_opt(analytic.throughput[su]) << ',' << format_number(est.throughput[su].mean) << '\n';
      }
    }
  }
  csv << rows.str();
}

void run_pk(const ExperimentConfig& cfg, std::ostream& csv) {
  std::uint64_t state = cfg.seed ^ 0xA5A5F00DCAFEBEEFULL;
  const std::uint64_t pk_seed = RandomStream::splitmix64(state);
  const auto pk = rank_placement_auto(cfg.users, cfg.relays, cfg.scheme, cfg.pk_trials, pk_seed, cfg.workers);
  std::ostringstream rows;
  rows << "user,k,probability\n";
  for (std::size_t u = 0; u < pk.size(); ++u)
    for (std::size_t k = 0; k < pk[u].probs.size(); ++k)
      rows << (u + 1) << ',' << (k + 1) << ',' << format_number(pk[u].probs[k]) << '\n';
  csv << rows.str();
}

std::vector<CheckResult> run_validate(const ExperimentConfig& cfg) {
  std::vector<CheckResult> checks;
  const auto pk = sweep_rank_distributions(cfg);
  const bool small = cfg.users * cfg.relays <= kMaxEnumerationCells;
  const bool maxmin = cfg.scheme == Scheme::MaxMin;
  const bool lambda_all = cfg.sweep.variable == "lambda_all";

  // each check runs on its own so a numeric failure in one is reported and
  // the rest still execute
  auto guarded = [&](const std::string& name, const std::function<CheckResult()>& fn) {
    try {
      checks.push_back(fn());
    } catch (const std::exception& e) {
      checks.push_back({name, Verdict::Fail, std::string("error: ") + e.what()});
    }
  };

  if (small) guarded("exact rank placement", [&] { return check_enumeration(cfg); });

  std::vector<mc::LinkEstimates> mc_points;
  const auto points = cfg.sweep.points();
  for (std::size_t i = 0; i < points.size(); ++i)
    mc_points.push_back(mc::simulate(cfg.topology(), cfg.budget_at(points[i]), cfg.scheme,
                                     db_to_linear(cfg.gamma_th_db), point_options(cfg, i), cfg.csi_model()));

  if (cfg.m == 1 && !cfg.csi) guarded("throughput vs MC", [&] { return check_throughput_vs_mc(cfg, pk, mc_points); });
  guarded("outage vs MC", [&] { return check_outage_vs_mc(cfg, pk, mc_points); });
  if (maxmin && cfg.users > 1) {
    guarded("MC fairness", [&] { return check_mc_fairness(cfg, mc_points); });
    if (small) guarded("analytic fairness", [&] { return check_analytic_fairness(cfg); });
  }
  if (cfg.csi) {
    if (lambda_all) guarded("CSI floor", [&] { return check_csi_floor(cfg, pk); });
    guarded("CSI reversion", [&] { return check_csi_reversion(cfg, pk); });
  } else if (lambda_all) {
    if (maxmin) {
      guarded("slope", [&] { return check_slope(cfg, pk); });
      guarded("array gain", [&] { return check_array_gain(cfg, pk); });
    }
  } else {
    guarded("Lambda2 floor", [&] { return check_lambda2_floor(cfg, pk); });
  }
  return checks;
}

bool print_report(const std::vector<CheckResult>& checks, std::ostream& out) {
  bool ok = true;
  for (const auto& c : checks) {
    out << verdict_label(c.verdict) << "  " << c.name << ": " << c.detail << '\n';
    if (c.verdict == Verdict::Fail) ok = false;
  }
  return ok;
}

}  // namespace ucr
