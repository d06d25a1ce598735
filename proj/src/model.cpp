#include "ucr/model.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace ucr {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be a positive finite number");
}

// Sum of m unit exponentials scaled to mean omega: G(m, omega).
double gamma_draw(int m, double omega, RandomStream& rng) {
  double acc = 0.0;
  for (int k = 0; k < m; ++k) acc += rng.exponential();
  return acc * (omega / m);
}

void resize_like(Matrix<double>& mat, std::size_t rows, std::size_t cols) {
  if (mat.rows() != rows || mat.cols() != cols) mat = Matrix<double>(rows, cols);
}

}  // namespace

void NetworkTopology::validate() const {
  if (users < 1) throw std::invalid_argument("M (users) must be >= 1");
  if (relays < 1) throw std::invalid_argument("N (relays) must be >= 1");
  if (relays < users) throw std::invalid_argument("N must be >= M");
  require_positive(omega_h1, "omega_h1");
  require_positive(omega_h2, "omega_h2");
  require_positive(omega_f, "omega_f");
  require_positive(d1, "d1");
  require_positive(d2, "d2");
  require_positive(d3, "d3");
  if (!(path_loss_exp >= 0.0) || !std::isfinite(path_loss_exp))
    throw std::invalid_argument("beta (path-loss exponent) must be >= 0");
}

void LinkBudget::validate() const {
  require_positive(lambda1, "lambda1");
  require_positive(lambda2, "lambda2");
  require_positive(lambda3, "lambda3");
  require_positive(gamma_th, "gamma_th");
}

CsiErrorModel CsiErrorModel::from_error_ratios(const NetworkTopology& topo, double ratio1, double ratio2,
                                               double ratio3) {
  for (double r : {ratio1, ratio2, ratio3})
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("CSI error ratio must lie in [0, 1)");
  CsiErrorModel csi;
  csi.omega_e1 = ratio1 * topo.omega_h1;
  csi.omega_e2 = ratio2 * topo.omega_h2;
  csi.omega_e3 = ratio3 * topo.omega_f;
  csi.omega_h1_est = topo.omega_h1 - csi.omega_e1;
  csi.omega_h2_est = topo.omega_h2 - csi.omega_e2;
  csi.omega_f_est = topo.omega_f - csi.omega_e3;
  return csi;
}

void CsiErrorModel::validate(const NetworkTopology& topo) const {
  if (topo.shape.value() != 1) throw std::invalid_argument("imperfect CSI model requires Rayleigh fading (m = 1)");
  require_positive(omega_h1_est, "omega_h1_est");
  require_positive(omega_h2_est, "omega_h2_est");
  require_positive(omega_f_est, "omega_f_est");
  const auto check = [](double total, double est, double err, const char* hop) {
    if (!(err >= 0.0)) throw std::invalid_argument(std::string("error variance must be >= 0 on ") + hop);
    if (std::fabs(total - est - err) > 1e-12 * total)
      throw std::invalid_argument(std::string("error variance must equal true minus estimated variance on ") + hop);
  };
  check(topo.omega_h1, omega_h1_est, omega_e1, "hop 1");
  check(topo.omega_h2, omega_h2_est, omega_e2, "hop 2");
  check(topo.omega_f, omega_f_est, omega_e3, "interference link");
}

void fill_realization(const NetworkTopology& topo, double omega_1, double omega_2, double omega_3, RandomStream& rng,
                      ChannelRealization& out) {
  const auto rows = static_cast<std::size_t>(topo.users);
  const auto cols = static_cast<std::size_t>(topo.relays);
  resize_like(out.h1, rows, cols);
  resize_like(out.h2, rows, cols);
  resize_like(out.f, rows, cols);
  const int m = topo.shape.value();
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      out.h1(i, j) = gamma_draw(m, omega_1, rng);
      out.h2(i, j) = gamma_draw(m, omega_2, rng);
      out.f(i, j) = gamma_draw(m, omega_3, rng);
    }
  }
}

ChannelRealization sample_realization(const NetworkTopology& topo, RandomStream& rng) {
  topo.validate();
  ChannelRealization out;
  fill_realization(topo, topo.omega_h1, topo.omega_h2, topo.omega_f, rng, out);
  return out;
}

ChannelRealization sample_estimates(const NetworkTopology& topo, const CsiErrorModel& csi, RandomStream& rng) {
  topo.validate();
  csi.validate(topo);
  ChannelRealization out;
  fill_realization(topo, csi.omega_h1_est, csi.omega_h2_est, csi.omega_f_est, rng, out);
  return out;
}

double relay_power(double f_gain, const LinkBudget& budget, const NetworkTopology& topo) {
  if (!(f_gain >= 0.0)) throw std::invalid_argument("relay_power: interference gain must be >= 0");
  if (f_gain == 0.0) return budget.lambda2;
  const double cap = budget.lambda3 * std::pow(topo.d3, topo.path_loss_exp) / f_gain;
  return std::min(budget.lambda2, cap);
}

void fill_snr_matrix(const ChannelRealization& real, const NetworkTopology& topo, const LinkBudget& budget,
                     SnrMatrix& out) {
  const std::size_t rows = real.h1.rows();
  const std::size_t cols = real.h1.cols();
  if (real.h2.rows() != rows || real.h2.cols() != cols || real.f.rows() != rows || real.f.cols() != cols)
    throw std::invalid_argument("snr_matrix: channel matrices disagree in shape");
  resize_like(out, rows, cols);
  const double loss1 = std::pow(topo.d1, topo.path_loss_exp);
  const double loss2 = std::pow(topo.d2, topo.path_loss_exp);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double hop1 = budget.lambda1 * real.h1(i, j) / loss1;
      const double hop2 = relay_power(real.f(i, j), budget, topo) * real.h2(i, j) / loss2;
      out(i, j) = std::min(hop1, hop2);
    }
  }
}

SnrMatrix snr_matrix(const ChannelRealization& real, const NetworkTopology& topo, const LinkBudget& budget) {
  SnrMatrix out;
  fill_snr_matrix(real, topo, budget, out);
  return out;
}

void fill_snr_matrix_imperfect(const ChannelRealization& est, const CsiErrorModel& csi, const NetworkTopology& topo,
                               const LinkBudget& budget, SnrMatrix& out) {
  if (topo.shape.value() != 1) throw std::invalid_argument("imperfect CSI SNR requires m = 1");
  const std::size_t rows = est.h1.rows();
  const std::size_t cols = est.h1.cols();
  if (est.h2.rows() != rows || est.h2.cols() != cols || est.f.rows() != rows || est.f.cols() != cols)
    throw std::invalid_argument("snr_matrix_imperfect: channel matrices disagree in shape");
  resize_like(out, rows, cols);
  const double loss1 = std::pow(topo.d1, topo.path_loss_exp);
  const double loss2 = std::pow(topo.d2, topo.path_loss_exp);
  // P/(P Omega_e1 + d1^beta N0) in normalized form
  const double scale1 = budget.lambda1 / (budget.lambda1 * csi.omega_e1 + loss1);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double q = relay_power(est.f(i, j), budget, topo);
      const double hop1 = scale1 * est.h1(i, j);
      const double hop2 = q / (q * csi.omega_e2 + loss2) * est.h2(i, j);
      out(i, j) = std::min(hop1, hop2);
    }
  }
}

SnrMatrix snr_matrix_imperfect(const ChannelRealization& est, const CsiErrorModel& csi, const NetworkTopology& topo,
                               const LinkBudget& budget) {
  csi.validate(topo);
  SnrMatrix out;
  fill_snr_matrix_imperfect(est, csi, topo, budget, out);
  return out;
}

}  // namespace ucr
