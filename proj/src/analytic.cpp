#include "ucr/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "ucr/errors.hpp"
#include "ucr/specfun.hpp"

namespace ucr::analytic {
namespace {

using specfun::log_binomial;
using specfun::log_factorial;
using specfun::regularized_lower_gamma;
using specfun::regularized_upper_gamma;

constexpr double kCancellationTol = 1e-9;
// |d - 1| below this uses the series around d = 1 instead of partial fractions
constexpr double kTaylorRadius = 0.5;

// Neumaier-compensated sum of terms ordered by decreasing magnitude.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;
  double largest = 0.0;

  void add(double v) {
    largest = std::max(largest, std::fabs(v));
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

double sorted_sum(std::vector<double>& terms, double* largest = nullptr) {
  std::sort(terms.begin(), terms.end(), [](double a, double b) { return std::fabs(a) > std::fabs(b); });
  CompensatedSum acc;
  for (double t : terms) acc.add(t);
  if (largest) *largest = acc.largest;
  return acc.value();
}

void check_x(double x, const char* who) {
  if (!(x >= 0.0)) throw std::domain_error(std::string(who) + ": x must be >= 0");
}

// Negative-binomial weights NB(k; m, p) = C(k+m-1, k) p^m q^k, q = 1 - p.
//
// Returns sum_{k>=m} NB(k) Q(k+m, y), the Lambda2-capped interference
// integral divided by Gamma(m). With y = 0 (Q == 1) it is the plain NB tail.
// For small q the tail series converges geometrically and has no
// cancellation; otherwise the complement of the finite head is used.
double capped_interference_term(int m, double p, double q, double y) {
  if (q == 0.0) return 0.0;
  if (q <= 0.5) {
    double nb = std::exp(log_binomial(2 * m - 1, m) + m * std::log(p) + m * std::log(q));
    double upper = regularized_upper_gamma(2 * m, y);
    int n = 2 * m;
    double poisson = y > 0.0 ? std::exp(-y + n * std::log(y) - log_factorial(n)) : 0.0;
    double sum = 0.0;
    for (int k = m; k < 100000; ++k) {
      const double term = nb * upper;
      sum += term;
      if (nb == 0.0 || nb < sum * 1e-17) break;
      nb *= q * (k + m) / (k + 1.0);
      upper = std::min(1.0, upper + poisson);  // Q(n+1, y) = Q(n, y) + e^{-y} y^n / n!
      poisson *= y / (n + 1.0);
      ++n;
    }
    return sum;
  }
  double head = 0.0;
  double nb = std::pow(p, m);
  for (int k = 0; k < m; ++k) {
    head += nb * regularized_upper_gamma(k + m, y);
    nb *= q * (k + m) / (k + 1.0);
  }
  return std::max(0.0, regularized_upper_gamma(m, p * y) - head);
}

// Lazily cached e^s E_n(s), n >= 1.
class ScaledEn {
 public:
  explicit ScaledEn(double s) : s_(s) {}
  double operator()(int n) {
    while (static_cast<int>(cache_.size()) < n) {
      const int next = static_cast<int>(cache_.size()) + 1;
      if (next > 1 && s_ <= 1.0)
        cache_.push_back((1.0 - s_ * cache_.back()) / (next - 1));
      else
        cache_.push_back(specfun::exp_scaled_en(next, s_));
    }
    return cache_[static_cast<std::size_t>(n - 1)];
  }

 private:
  double s_;
  std::vector<double> cache_;
};

}  // namespace

double cdf_min_snr(double x, const NetworkTopology& topo, const LinkBudget& budget) {
  check_x(x, "cdf_min_snr");
  if (std::isinf(x)) return 1.0;
  const int m = topo.shape.value();
  const double om1 = topo.omega1();
  const double om2 = topo.omega2();
  const double om3 = topo.omega3();

  const double a1 = m * x / (om1 * budget.lambda1);
  const double a2 = m * x / (om2 * budget.lambda2);
  const double a3 = m * budget.lambda3 / (om3 * budget.lambda2);
  const double big_a = m * budget.lambda3 / om3;
  const double big_b = m * x / om2;
  const double y0 = (big_a + big_b) / budget.lambda2;

  const double p1 = regularized_lower_gamma(m, a1);
  const double q1 = regularized_upper_gamma(m, a1);
  const double p2 = regularized_lower_gamma(m, a2);
  const double p3 = regularized_lower_gamma(m, a3);
  const double g = capped_interference_term(m, big_a / (big_a + big_b), big_b / (big_a + big_b), y0);
  return std::clamp(p1 + q1 * (p2 * p3 + g), 0.0, 1.0);
}

double cdf_min_snr_floor(double x, const NetworkTopology& topo, const LinkBudget& budget) {
  check_x(x, "cdf_min_snr_floor");
  if (std::isinf(x)) return 1.0;
  const int m = topo.shape.value();
  const double a1 = m * x / (topo.omega1() * budget.lambda1);
  // weights (Omega2 Lambda3)^m (Omega3 x)^k / (Omega3 x + Omega2 Lambda3)^{k+m}
  const double s = topo.omega3() * x + topo.omega2() * budget.lambda3;
  const double p = topo.omega2() * budget.lambda3 / s;
  const double q = topo.omega3() * x / s;
  const double tail = capped_interference_term(m, p, q, 0.0);
  return std::clamp(regularized_lower_gamma(m, a1) + regularized_upper_gamma(m, a1) * tail, 0.0, 1.0);
}

double cdf_kth_order(int k, int users, int relays, double cdf_point) {
  const int mn = users * relays;
  if (users < 1 || relays < 1 || k < 1 || k > mn) throw std::domain_error("cdf_kth_order: need 1 <= k <= MN");
  if (!(cdf_point >= 0.0 && cdf_point <= 1.0)) throw std::domain_error("cdf_kth_order: CDF value outside [0, 1]");
  if (cdf_point == 0.0) return 0.0;
  // extended precision buys ~3 extra digits against the alternating cancellation
  std::vector<long double> terms;
  terms.reserve(static_cast<std::size_t>(k));
  const long double f = cdf_point;
  for (int i = 0; i < k; ++i) {
    const long double mag = static_cast<long double>(specfun::order_stat_coeff(mn, k, i)) * std::pow(f, mn - k + i + 1);
    terms.push_back(i % 2 == 0 ? mag : -mag);
  }
  std::sort(terms.begin(), terms.end(), [](long double a, long double b) { return std::fabs(a) > std::fabs(b); });
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (long double v : terms) {
    const long double t = sum + v;
    comp += std::fabs(sum) >= std::fabs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const auto value = static_cast<double>(sum + comp);
  if (value < -kCancellationTol || value > 1.0 + kCancellationTol)
    throw NumericError("order-statistic sum left [0, 1] (k=" + std::to_string(k) + ", MN=" + std::to_string(mn) +
                       ", value=" + std::to_string(value) + ")");
  return std::clamp(value, 0.0, 1.0);
}

double outage_from_cdf(double cdf_point, int users, int relays, std::span<const double> pk) {
  if (pk.empty() || static_cast<int>(pk.size()) > users * relays)
    throw std::invalid_argument("rank distribution length must be in [1, MN]");
  CompensatedSum acc;
  for (std::size_t k = 0; k < pk.size(); ++k) {
    if (pk[k] == 0.0) continue;
    acc.add(pk[k] * cdf_kth_order(static_cast<int>(k) + 1, users, relays, cdf_point));
  }
  return std::clamp(acc.value(), 0.0, 1.0);
}

double outage_probability(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                          std::span<const double> pk) {
  return outage_from_cdf(cdf_min_snr(gamma_th, topo, budget), topo.users, topo.relays, pk);
}

double g_of_m(const NetworkTopology& topo) {
  const int m = topo.shape.value();
  const double gm = specfun::gamma_int(m);
  const double om1 = topo.omega1();
  const double om2 = topo.omega2();
  const double om3 = topo.omega3();
  const double hop1 = std::pow(m, m - 1) / (gm * std::pow(om1, m));
  const double hop2 = (std::pow(m, m) * specfun::lower_incomplete_gamma(m, m / om3) +
                       std::pow(om3, m) * specfun::upper_incomplete_gamma(2 * m, m / om3)) /
                      (m * gm * gm * std::pow(om2, m));
  return hop1 + hop2;
}

double worst_case_rank_prob(int users, int relays) {
  if (users < 1 || relays < users) throw std::invalid_argument("worst_case_rank_prob: need N >= M >= 1");
  double prod = 1.0;
  for (int i = 1; i < relays; ++i)
    prod *= static_cast<double>(relays - i) / static_cast<double>(users * relays - i);
  // M == N admits the bottom N entries filling a row or a column
  const double lines = (users == relays && relays > 1) ? 2.0 : 1.0;
  return lines / users * prod;
}

double array_gain(double gamma_th, const NetworkTopology& topo) {
  const int m = topo.shape.value();
  const int users = topo.users;
  const int relays = topo.relays;
  const int mn = users * relays;
  const double log_comb =
      log_factorial(mn) - std::log(static_cast<double>(relays)) - log_factorial(mn - relays) - log_factorial(relays - 1);
  const double per_entry = g_of_m(topo) * std::pow(gamma_th, m);
  return worst_case_rank_prob(users, relays) * std::exp(log_comb) * std::pow(per_entry, relays);
}

double asymptotic_outage_case1(double gamma_th, double lambda, const NetworkTopology& topo) {
  return array_gain(gamma_th, topo) * std::pow(lambda, -topo.shape.value() * topo.relays);
}

double asymptotic_outage_case2(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                               std::span<const double> pk) {
  return outage_from_cdf(cdf_min_snr_floor(gamma_th, topo, budget), topo.users, topo.relays, pk);
}

OutageResult outage_report(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                           std::span<const double> pk) {
  OutageResult r;
  r.exact = outage_probability(gamma_th, topo, budget, pk);
  r.diversity_order = topo.shape.value() * topo.relays;
  r.array_gain = array_gain(gamma_th, topo);
  const auto same = [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(a, b); };
  if (same(budget.lambda1, budget.lambda2) && same(budget.lambda2, budget.lambda3))
    r.asymptotic_case1 = asymptotic_outage_case1(gamma_th, budget.lambda1, topo);
  r.asymptotic_case2 = asymptotic_outage_case2(gamma_th, topo, budget, pk);
  return r;
}

double cdf_min_snr_imperfect(double x, const NetworkTopology& topo, const LinkBudget& budget,
                             const CsiErrorModel& csi) {
  csi.validate(topo);
  check_x(x, "cdf_min_snr_imperfect");
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double loss1 = std::pow(topo.d1, topo.path_loss_exp);
  const double loss2 = std::pow(topo.d2, topo.path_loss_exp);
  const double loss3 = std::pow(topo.d3, topo.path_loss_exp);
  const double rate = (csi.omega_e1 + loss1 / budget.lambda1) / csi.omega_h1_est +
                      (csi.omega_e2 + loss2 / budget.lambda2) / csi.omega_h2_est;
  const double capped = std::exp(-loss3 * budget.lambda3 / (csi.omega_f_est * budget.lambda2));
  const double ratio = loss3 * csi.omega_h2_est * budget.lambda3 / (loss2 * csi.omega_f_est * x);
  // 1 - e^{-x rate} (1 - capped / (1 + ratio)), kept free of 1 - (1 - eps)
  const double value = -std::expm1(-x * rate) + std::exp(-x * rate) * capped / (1.0 + ratio);
  return std::clamp(value, 0.0, 1.0);
}

double outage_probability_imperfect(double gamma_th, const NetworkTopology& topo, const LinkBudget& budget,
                                    const CsiErrorModel& csi, std::span<const double> pk) {
  return outage_from_cdf(cdf_min_snr_imperfect(gamma_th, topo, budget, csi), topo.users, topo.relays, pk);
}

double outage_floor_imperfect(double gamma_th, const CsiErrorModel& csi, int users, int relays,
                              std::span<const double> pk) {
  check_x(gamma_th, "outage_floor_imperfect");
  const double rate = csi.omega_e1 / csi.omega_h1_est + csi.omega_e2 / csi.omega_h2_est;
  return outage_from_cdf(-std::expm1(-gamma_th * rate), users, relays, pk);
}

std::vector<double> h_integrals(int jmax, double at, double d) {
  if (jmax < 0) throw std::domain_error("h_integral: j must be >= 0");
  if (!(at > 0.0)) throw std::domain_error("h_integral: at must be > 0");
  if (!(d > 0.0)) throw std::domain_error("h_integral: d must be > 0");

  ScaledEn en(at);
  std::vector<double> h(static_cast<std::size_t>(jmax) + 1);
  h[0] = en(1);  // -e^{at} Ei(-at)
  const double delta = d - 1.0;

  if (std::fabs(delta) < kTaylorRadius) {
    // (x + d)^{-j} = sum_n C(j+n-1, n) (-delta)^n (x + 1)^{-j-n}, so
    // h(j) = sum_n C(j+n-1, n) (-delta)^n h(j+n | d=1), h(n | d=1) = e^{at} E_{n+1}(at).
    for (int j = 1; j <= jmax; ++j) {
      double coeff = 1.0;
      double sum = 0.0;
      for (int n = 0; n < 5000; ++n) {
        const double term = coeff * en(j + n + 1);
        sum += term;
        if (n > j && std::fabs(term) < 1e-17 * std::fabs(sum)) break;
        coeff *= -delta * (j + n) / (n + 1.0);
        if (coeff == 0.0) break;
      }
      h[static_cast<std::size_t>(j)] = sum;
    }
    return h;
  }

  // Partial fractions: 1/((x+1)(x+d)^j) = (d-1)^{-j}/(x+1) - sum_r (d-1)^{r-j-1}/(x+d)^r
  // with J_r = int e^{-at x} (x+d)^{-r} dx = d^{1-r} e^{at d} E_r(at d); J_1 = -w.
  ScaledEn en_d(at * d);
  for (int j = 1; j <= jmax; ++j) {
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(j) + 1);
    terms.push_back(std::pow(delta, -j) * h[0]);
    for (int r = 1; r <= j; ++r) {
      const double jr = std::pow(d, 1 - r) * en_d(r);
      terms.push_back(-std::pow(delta, r - j - 1) * jr);
    }
    h[static_cast<std::size_t>(j)] = sorted_sum(terms);
  }
  return h;
}

double h_integral(int j, double at, double d) { return h_integrals(j, at, d).back(); }

ThroughputResult average_throughput(const NetworkTopology& topo, const LinkBudget& budget,
                                    std::span<const double> pk) {
  if (topo.shape.value() != 1) throw std::invalid_argument("average_throughput closed form requires m = 1");
  const int users = topo.users;
  const int mn = users * topo.relays;
  if (pk.empty() || static_cast<int>(pk.size()) > mn)
    throw std::invalid_argument("rank distribution length must be in [1, MN]");

  const double om1 = topo.omega1();
  const double om2 = topo.omega2();
  const double om3 = topo.omega3();
  // 1 - F(x) = e^{-a x} (b + c / (x + d))
  const double a = 1.0 / (om1 * budget.lambda1) + 1.0 / (om2 * budget.lambda2);
  const double b = -std::expm1(-budget.lambda3 / (om3 * budget.lambda2));
  const double d = om2 * budget.lambda3 / om3;
  const double c = d * (1.0 - b);

  // q(t) = int e^{-a t x} (b + c/(x+d))^t / (x+1) dx
  std::vector<double> q(static_cast<std::size_t>(mn) + 1, 0.0);
  for (int t = 1; t <= mn; ++t) {
    const auto h = h_integrals(t, a * t, d);
    double sum = 0.0;
    for (int j = 0; j <= t; ++j) sum += specfun::binomial_coefficient(t, j) * std::pow(b, t - j) * std::pow(c, j) * h[static_cast<std::size_t>(j)];
    q[static_cast<std::size_t>(t)] = sum;
  }

  CompensatedSum total;
  for (int k = 1; k <= static_cast<int>(pk.size()); ++k) {
    const double weight = pk[static_cast<std::size_t>(k - 1)];
    if (weight == 0.0) continue;
    std::vector<double> terms;
    for (int i = 0; i <= mn - k; ++i) {
      const int t = k + i;
      // (MN)! C(MN-k, i) / ((k-1)! (MN-k)! t)
      const double coeff = mn * specfun::binomial_coefficient(mn - 1, k - 1) *
                           specfun::binomial_coefficient(mn - k, i) / t;
      terms.push_back((i % 2 == 0 ? coeff : -coeff) * q[static_cast<std::size_t>(t)]);
    }
    double largest = 0.0;
    const double inner = sorted_sum(terms, &largest);
    if (inner < -kCancellationTol * largest)
      throw NumericError("throughput sum for rank " + std::to_string(k) + " lost all precision");
    total.add(weight * std::max(inner, 0.0));
  }
  return {std::max(0.0, total.value() / (2.0 * users * std::numbers::ln2))};
}

}  // namespace ucr::analytic
