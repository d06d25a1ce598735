#pragma once

// Special functions for integer-shape gamma fading.
//
// Every incomplete gamma here takes an integer shape, which is all the
// Nakagami-m model needs. Evaluations compute whichever of the lower/upper
// parts is smaller directly and obtain the other by complement, so
// lower + upper == (m-1)! holds to rounding.

#include <stdexcept>

namespace ucr {

/// Nakagami shape parameter. Only positive integers are representable.
class GammaShape {
 public:
  explicit GammaShape(int m) : m_(m) {
    if (m < 1) throw std::domain_error("gamma shape must be a positive integer");
  }
  int value() const noexcept { return m_; }
  operator int() const noexcept { return m_; }

 private:
  int m_;
};

namespace specfun {

/// (n-1)! as a double, i.e. Gamma(n) for integer n >= 1.
double gamma_int(int n);

/// log(n!) for n >= 0.
double log_factorial(int n);

/// log of the binomial coefficient C(n, k).
double log_binomial(int n, int k);

/// gamma(m, x) = int_0^x t^{m-1} e^{-t} dt.
double lower_incomplete_gamma(int m, double x);

/// Gamma(m, x) = int_x^inf t^{m-1} e^{-t} dt.
double upper_incomplete_gamma(int m, double x);

/// P(m, x) = gamma(m, x) / Gamma(m).
double regularized_lower_gamma(int m, double x);

/// Q(m, x) = Gamma(m, x) / Gamma(m).
double regularized_upper_gamma(int m, double x);

/// e^p * Ei(-p) for p > 0, evaluated without forming e^p. Series below p = 1,
/// modified-Lentz continued fraction at and above.
double exp_scaled_ei(double p);

/// e^s * E_n(s) = int_0^inf e^{-s x} (1 + x)^{-n} dx for n >= 1, s > 0.
/// Forward recurrence from E_1 for s <= 1, continued fraction otherwise.
double exp_scaled_en(int n, double s);

/// C(n, k), exact while it fits in 53 bits.
double binomial_coefficient(int n, int k);

/// (MN)! C(k-1, i) / ((MN-k+i+1) (k-1)! (MN-k)!). The (-1)^i sign is left to
/// the caller.
double order_stat_coeff(int mn, int k, int i);

}  // namespace specfun
}  // namespace ucr
