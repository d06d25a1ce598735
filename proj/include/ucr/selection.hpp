#pragma once

// Relay selection schemes and the rank-placement probabilities P(gamma^(k)).

#include <cstdint>
#include <string_view>
#include <vector>

#include "ucr/model.hpp"
#include "ucr/rng.hpp"

namespace ucr {

enum class Scheme { MaxMin, Naive, Random };

std::string_view to_string(Scheme scheme);
/// Accepts "maxmin", "naive", "random"; throws std::invalid_argument otherwise.
Scheme parse_scheme(std::string_view name);

/// Injective user -> relay map with each user's effective SNR and the global
/// rank of that SNR in the full matrix (1 = largest entry).
struct Assignment {
  std::vector<int> relay_of_user;
  std::vector<double> effective_snr;
  std::vector<int> global_rank;
};

/// Lexicographic bottleneck assignment with reusable scratch space. The
/// minimum assigned SNR is maximal over all injective maps; the bottleneck
/// pair is then fixed and the reduced problem solved the same way.
class MaxMinSolver {
 public:
  void solve(const SnrMatrix& snr, Assignment& out);

 private:
  bool perfect_matching(const SnrMatrix& snr, double threshold);
  bool augment(const SnrMatrix& snr, int user, double threshold);

  std::vector<char> user_active_;
  std::vector<char> relay_active_;
  std::vector<char> visited_;
  std::vector<int> owner_;  // relay -> user in the trial matching
  std::vector<int> match_;  // user -> relay in the trial matching
  std::vector<double> levels_;
};

Assignment maxmin_assign(const SnrMatrix& snr);

/// Greedy in user order: each user takes its best relay not yet taken.
Assignment naive_assign(const SnrMatrix& snr);

/// Uniformly random injective map, independent of the SNRs.
Assignment random_assign(const SnrMatrix& snr, RandomStream& rng);

/// Scheme dispatch that reuses `solver` scratch space for max-min.
void assign(Scheme scheme, const SnrMatrix& snr, RandomStream& rng, MaxMinSolver& solver, Assignment& out);

/// Fills global_rank from relay_of_user / effective_snr.
void compute_global_ranks(const SnrMatrix& snr, Assignment& out);

/// Largest rank a user can receive: (M-1)N+1 under max-min, MN otherwise.
int rank_support(int users, int relays, Scheme scheme);

enum class RankMethod { ExactEnumeration, MonteCarlo };

/// One user's rank distribution; probs[k-1] = P(gamma_(u) = gamma^(k)).
struct RankPlacementDistribution {
  std::vector<double> probs;
  RankMethod method = RankMethod::ExactEnumeration;
  std::uint64_t trials = 0;            ///< 0 for exact enumeration
  std::vector<std::uint64_t> counts;   ///< raw counts behind probs
  std::uint64_t total = 0;             ///< (MN)! for exact, trials for MC

  /// Standard error of probs[k-1] (0 for exact).
  double std_error(int k) const;
};

/// Largest M*N for which exact enumeration of all (MN)! rank patterns is allowed.
inline constexpr int kMaxEnumerationCells = 10;

/// Rank-placement distribution for every user. Because the entries are i.i.d.
/// and continuous, the rank pattern of the SNR matrix is a uniform random
/// permutation, so the scheme is run on rank matrices directly.
std::vector<RankPlacementDistribution> rank_placement_probs(int users, int relays, Scheme scheme, RankMethod method,
                                                            std::uint64_t trials = 0, std::uint64_t seed = 0,
                                                            unsigned workers = 0);

/// Average of the per-user distributions. Valid when users are exchangeable
/// (max-min, random), where it reduces Monte-Carlo variance by a factor M.
RankPlacementDistribution pool_users(const std::vector<RankPlacementDistribution>& per_user);

/// Exact enumeration when M*N is small enough, otherwise Monte Carlo.
std::vector<RankPlacementDistribution> rank_placement_auto(int users, int relays, Scheme scheme,
                                                           std::uint64_t mc_trials, std::uint64_t seed,
                                                           unsigned workers = 0);

}  // namespace ucr
