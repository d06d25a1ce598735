#include "ucr/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace ucr::specfun {
namespace {

constexpr double kEuler = 0.57721566490153286060651209008240243;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr int kMaxIter = 100000;

void check_shape(int m) {
  if (m < 1) throw std::domain_error("incomplete gamma: shape must be >= 1, got " + std::to_string(m));
}

void check_arg(double x) {
  if (!(x >= 0.0)) throw std::domain_error("incomplete gamma: argument must be >= 0");
}

// sum_{n>=0} x^n / ((m+1)...(m+n)); converges for all x, quickly for x < m.
double lower_series(int m, double x) {
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n < kMaxIter; ++n) {
    term *= x / (m + n);
    sum += term;
    if (term < sum * kEps * 0.5) break;
  }
  return sum;
}

// e^{-x} sum_{k<m} x^k/k!, accumulated from the smallest term upward.
double upper_finite_sum(int m, double x) {
  // top term first in log space so that e^{-x} underflow does not zero the sum
  double term = std::exp(-x + (m - 1) * std::log(x) - log_factorial(m - 1));
  double sum = 0.0;
  for (int k = m - 1; k >= 0; --k) {
    sum += term;  // terms shrink as k decreases because k < m <= x
    term *= k / x;
  }
  return sum;
}

// Regularized {P, Q}: the smaller side is computed directly.
std::pair<double, double> regularized_pair(int m, double x) {
  check_shape(m);
  check_arg(x);
  if (x == 0.0) return {0.0, 1.0};
  if (std::isinf(x)) return {1.0, 0.0};
  if (x < m) {
    const double p = std::exp(m * std::log(x) - x - log_factorial(m)) * lower_series(m, x);
    return {p, 1.0 - p};
  }
  const double q = upper_finite_sum(m, x);
  return {1.0 - q, q};
}

// Unnormalized {gamma(m,x), Gamma(m,x)} with the same branch choice.
std::pair<double, double> unnormalized_pair(int m, double x) {
  check_shape(m);
  check_arg(x);
  const double full = gamma_int(m);
  if (x == 0.0) return {0.0, full};
  if (std::isinf(x)) return {full, 0.0};
  if (x < m) {
    const double lower = full * std::exp(m * std::log(x) - x - log_factorial(m)) * lower_series(m, x);
    return {lower, full - lower};
  }
  const double upper = full * upper_finite_sum(m, x);
  return {full - upper, upper};
}

}  // namespace

double gamma_int(int n) {
  if (n < 1) throw std::domain_error("gamma_int: n must be >= 1");
  double f = 1.0;
  for (int k = 2; k < n; ++k) f *= k;
  return f;
}

double log_factorial(int n) {
  if (n < 0) throw std::domain_error("log_factorial: n must be >= 0");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw std::domain_error("log_binomial: need 0 <= k <= n");
  return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double lower_incomplete_gamma(int m, double x) { return unnormalized_pair(m, x).first; }

double upper_incomplete_gamma(int m, double x) { return unnormalized_pair(m, x).second; }

double regularized_lower_gamma(int m, double x) { return regularized_pair(m, x).first; }

double regularized_upper_gamma(int m, double x) { return regularized_pair(m, x).second; }

double exp_scaled_ei(double p) {
  if (!(p > 0.0)) throw std::domain_error("exp_scaled_ei: p must be > 0");
  if (std::isinf(p)) return -0.0;
  if (p < 1.0) {
    // Ei(-p) = gamma + ln p + sum_k (-p)^k / (k k!)
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < kMaxIter; ++k) {
      term *= -p / k;
      const double add = term / k;
      sum += add;
      if (std::fabs(add) < std::fabs(sum) * kEps * 0.5) break;
    }
    return std::exp(p) * (kEuler + std::log(p) + sum);
  }
  // e^p E_1(p) = 1/(p+1- 1/(p+3- 4/(p+5- ...)))
  double b = p + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return -h;
}

double exp_scaled_en(int n, double s) {
  if (n < 1) throw std::domain_error("exp_scaled_en: n must be >= 1");
  if (!(s > 0.0)) throw std::domain_error("exp_scaled_en: s must be > 0");
  if (n == 1) return -exp_scaled_ei(s);
  if (s <= 1.0) {
    // e^s E_{k+1}(s) = (1 - s e^s E_k(s)) / k, error shrinks by s/k per step
    double e = -exp_scaled_ei(s);
    for (int k = 1; k < n; ++k) e = (1.0 - s * e) / k;
    return e;
  }
  double b = s + n;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (n - 1 + i);
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double binomial_coefficient(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw std::domain_error("binomial_coefficient: need 0 <= k <= n");
  k = std::min(k, n - k);
  // C(n-k+j, j) is an integer at every step; 128-bit keeps the product exact
  unsigned __int128 c = 1;
  for (int j = 1; j <= k; ++j) {
    c = c * static_cast<unsigned __int128>(n - k + j) / static_cast<unsigned __int128>(j);
    if (c > (static_cast<unsigned __int128>(1) << 100)) return std::exp(log_binomial(n, k));
  }
  return static_cast<double>(c);
}

double order_stat_coeff(int mn, int k, int i) {
  if (mn < 1 || k < 1 || k > mn || i < 0 || i > k - 1)
    throw std::domain_error("order_stat_coeff: need 1 <= k <= MN and 0 <= i <= k-1");
  // (MN)! / ((k-1)! (MN-k)!) = MN C(MN-1, k-1); integer binomials keep the
  // large alternating terms accurate to a few ulp
  return static_cast<double>(mn) * binomial_coefficient(mn - 1, k - 1) * binomial_coefficient(k - 1, i) /
         static_cast<double>(mn - k + i + 1);
}

}  // namespace ucr::specfun
