#pragma once

// Network configuration, channel sampling and SNR-matrix construction for the
// dual-hop underlay relay network. All powers are carried as ratios to the
// noise power, so N0 never appears.

#include <cmath>

#include "ucr/matrix.hpp"
#include "ucr/rng.hpp"
#include "ucr/specfun.hpp"

namespace ucr {

/// dB -> linear power ratio.
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// M users, N relays and the per-hop fading statistics.
struct NetworkTopology {
  int users = 1;
  int relays = 1;
  GammaShape shape{1};
  double omega_h1 = 1.0;  ///< E|h_1|^2, source -> relay
  double omega_h2 = 1.0;  ///< E|h_2|^2, relay -> destination
  double omega_f = 1.0;   ///< E|f|^2, relay -> primary receiver
  double d1 = 1.0;
  double d2 = 1.0;
  double d3 = 1.0;
  double path_loss_exp = 0.0;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate() const;

  // distance-scaled mean gains
  double omega1() const { return omega_h1 / std::pow(d1, path_loss_exp); }
  double omega2() const { return omega_h2 / std::pow(d2, path_loss_exp); }
  double omega3() const { return omega_f / std::pow(d3, path_loss_exp); }
};

/// Linear power-to-noise ratios and the outage threshold.
struct LinkBudget {
  double lambda1 = 1.0;  ///< P / N0
  double lambda2 = 1.0;  ///< Q_max / N0
  double lambda3 = 1.0;  ///< I_max / N0
  double gamma_th = 1.0;

  static LinkBudget from_db(double lambda1_db, double lambda2_db, double lambda3_db, double gamma_th_db) {
    return {db_to_linear(lambda1_db), db_to_linear(lambda2_db), db_to_linear(lambda3_db), db_to_linear(gamma_th_db)};
  }

  void validate() const;
};

/// Squared channel gains for one coherence interval, each M x N.
struct ChannelRealization {
  Matrix<double> h1;
  Matrix<double> h2;
  Matrix<double> f;
};

/// MMSE estimate / error variances for imperfect CSI (Rayleigh only).
struct CsiErrorModel {
  double omega_h1_est = 1.0;
  double omega_h2_est = 1.0;
  double omega_f_est = 1.0;
  double omega_e1 = 0.0;
  double omega_e2 = 0.0;
  double omega_e3 = 0.0;

  /// Split each true variance into estimate and error using ratio = Omega_e / Omega.
  static CsiErrorModel from_error_ratios(const NetworkTopology& topo, double ratio1, double ratio2, double ratio3);

  /// Checks m == 1 and Omega_e = Omega - Omega_est (to 1e-12 relative) per hop.
  void validate(const NetworkTopology& topo) const;
};

using SnrMatrix = Matrix<double>;

/// 3*M*N independent gamma draws G(m, Omega) per hop.
ChannelRealization sample_realization(const NetworkTopology& topo, RandomStream& rng);

/// Same shape as sample_realization, but drawn from the estimated-channel
/// variances of `csi` (the estimates are all the imperfect-CSI SNR needs).
ChannelRealization sample_estimates(const NetworkTopology& topo, const CsiErrorModel& csi, RandomStream& rng);

/// Relay power over N0: min(Lambda2, Lambda3 d3^beta / |f|^2); Lambda2 when |f|^2 = 0.
double relay_power(double f_gain, const LinkBudget& budget, const NetworkTopology& topo);

/// gamma_ij = min(Lambda1 |h1|^2 / d1^beta, Q_ij |h2|^2 / d2^beta).
SnrMatrix snr_matrix(const ChannelRealization& real, const NetworkTopology& topo, const LinkBudget& budget);

/// Imperfect-CSI end-to-end SNRs computed from channel estimates.
SnrMatrix snr_matrix_imperfect(const ChannelRealization& est, const CsiErrorModel& csi, const NetworkTopology& topo,
                               const LinkBudget& budget);

/// Writes into an existing matrix; used on Monte-Carlo hot paths.
void fill_snr_matrix(const ChannelRealization& real, const NetworkTopology& topo, const LinkBudget& budget,
                     SnrMatrix& out);
void fill_snr_matrix_imperfect(const ChannelRealization& est, const CsiErrorModel& csi, const NetworkTopology& topo,
                               const LinkBudget& budget, SnrMatrix& out);
void fill_realization(const NetworkTopology& topo, double omega_1, double omega_2, double omega_3, RandomStream& rng,
                      ChannelRealization& out);

}  // namespace ucr
