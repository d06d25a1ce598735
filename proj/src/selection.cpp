#include "ucr/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ucr/parallel.hpp"

namespace ucr {
namespace {

void check_dims(const SnrMatrix& snr) {
  if (snr.rows() == 0 || snr.cols() == 0) throw std::invalid_argument("SNR matrix must be non-empty");
  if (snr.rows() > snr.cols()) throw std::invalid_argument("relay selection needs N >= M (more relays than users)");
}

void reset(Assignment& out, std::size_t users) {
  out.relay_of_user.assign(users, -1);
  out.effective_snr.assign(users, 0.0);
  out.global_rank.assign(users, 0);
}

// Per-user rank counters for one block of Monte-Carlo trials.
struct RankCounts {
  int users = 0;
  int support = 0;
  std::vector<std::uint64_t> counts;  // users * support
  std::uint64_t trials = 0;

  void merge(const RankCounts& other) {
    for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
    trials += other.trials;
  }
};

std::uint64_t factorial_u64(int n) {
  std::uint64_t f = 1;
  for (int k = 2; k <= n; ++k) f *= static_cast<std::uint64_t>(k);
  return f;
}

std::vector<RankPlacementDistribution> finish(const RankCounts& rc, RankMethod method, std::uint64_t total,
                                              std::uint64_t trials) {
  std::vector<RankPlacementDistribution> out(static_cast<std::size_t>(rc.users));
  for (int u = 0; u < rc.users; ++u) {
    auto& d = out[static_cast<std::size_t>(u)];
    d.method = method;
    d.trials = trials;
    d.total = total;
    d.counts.assign(rc.counts.begin() + static_cast<std::ptrdiff_t>(u) * rc.support,
                    rc.counts.begin() + static_cast<std::ptrdiff_t>(u + 1) * rc.support);
    d.probs.resize(d.counts.size());
    for (std::size_t k = 0; k < d.counts.size(); ++k)
      d.probs[k] = static_cast<double>(d.counts[k]) / static_cast<double>(total);
  }
  return out;
}

void record(const Assignment& a, RankCounts& rc) {
  for (int u = 0; u < rc.users; ++u) {
    const int k = a.global_rank[static_cast<std::size_t>(u)];
    if (k < 1 || k > rc.support)
      throw std::logic_error("rank " + std::to_string(k) + " outside the scheme's support");
    ++rc.counts[static_cast<std::size_t>(u * rc.support + k - 1)];
  }
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::MaxMin: return "maxmin";
    case Scheme::Naive: return "naive";
    case Scheme::Random: return "random";
  }
  return "?";
}

Scheme parse_scheme(std::string_view name) {
  if (name == "maxmin") return Scheme::MaxMin;
  if (name == "naive") return Scheme::Naive;
  if (name == "random") return Scheme::Random;
  throw std::invalid_argument("unknown scheme '" + std::string(name) + "' (expected maxmin|naive|random)");
}

void compute_global_ranks(const SnrMatrix& snr, Assignment& out) {
  const auto& cells = snr.data();
  for (std::size_t u = 0; u < out.effective_snr.size(); ++u) {
    const double v = out.effective_snr[u];
    int greater = 0;
    for (double c : cells) greater += c > v ? 1 : 0;
    out.global_rank[u] = greater + 1;
  }
}

bool MaxMinSolver::augment(const SnrMatrix& snr, int user, double threshold) {
  const auto u = static_cast<std::size_t>(user);
  for (std::size_t j = 0; j < snr.cols(); ++j) {
    if (!relay_active_[j] || visited_[j] || snr(u, j) < threshold) continue;
    visited_[j] = 1;
    if (owner_[j] < 0 || augment(snr, owner_[j], threshold)) {
      owner_[j] = user;
      match_[u] = static_cast<int>(j);
      return true;
    }
  }
  return false;
}

bool MaxMinSolver::perfect_matching(const SnrMatrix& snr, double threshold) {
  std::fill(owner_.begin(), owner_.end(), -1);
  std::fill(match_.begin(), match_.end(), -1);
  for (std::size_t u = 0; u < snr.rows(); ++u) {
    if (!user_active_[u]) continue;
    std::fill(visited_.begin(), visited_.end(), 0);
    if (!augment(snr, static_cast<int>(u), threshold)) return false;
  }
  return true;
}

void MaxMinSolver::solve(const SnrMatrix& snr, Assignment& out) {
  check_dims(snr);
  const std::size_t users = snr.rows();
  const std::size_t relays = snr.cols();
  reset(out, users);
  user_active_.assign(users, 1);
  relay_active_.assign(relays, 1);
  visited_.assign(relays, 0);
  owner_.assign(relays, -1);
  match_.assign(users, -1);

  for (std::size_t level = 0; level < users; ++level) {
    levels_.clear();
    for (std::size_t i = 0; i < users; ++i) {
      if (!user_active_[i]) continue;
      for (std::size_t j = 0; j < relays; ++j)
        if (relay_active_[j]) levels_.push_back(snr(i, j));
    }
    std::sort(levels_.begin(), levels_.end());
    levels_.erase(std::unique(levels_.begin(), levels_.end()), levels_.end());

    // largest threshold that still admits a matching saturating every active user
    std::size_t lo = 0;
    std::size_t hi = levels_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi + 1) / 2;
      if (perfect_matching(snr, levels_[mid]))
        lo = mid;
      else
        hi = mid - 1;
    }
    const double bottleneck = levels_[lo];
    if (!perfect_matching(snr, bottleneck)) throw std::logic_error("max-min: no matching at the lowest level");

    // the matching must use an edge at exactly the bottleneck value; fix the first one
    std::size_t fixed_user = users;
    for (std::size_t i = 0; i < users; ++i) {
      if (user_active_[i] && snr(i, static_cast<std::size_t>(match_[i])) == bottleneck) {
        fixed_user = i;
        break;
      }
    }
    const auto fixed_relay = static_cast<std::size_t>(match_[fixed_user]);
    out.relay_of_user[fixed_user] = static_cast<int>(fixed_relay);
    out.effective_snr[fixed_user] = snr(fixed_user, fixed_relay);
    user_active_[fixed_user] = 0;
    relay_active_[fixed_relay] = 0;
  }
  compute_global_ranks(snr, out);
}

Assignment maxmin_assign(const SnrMatrix& snr) {
  MaxMinSolver solver;
  Assignment out;
  solver.solve(snr, out);
  return out;
}

Assignment naive_assign(const SnrMatrix& snr) {
  check_dims(snr);
  Assignment out;
  reset(out, snr.rows());
  std::vector<char> taken(snr.cols(), 0);
  for (std::size_t u = 0; u < snr.rows(); ++u) {
    int best = -1;
    for (std::size_t j = 0; j < snr.cols(); ++j) {
      if (taken[j]) continue;
      if (best < 0 || snr(u, j) > snr(u, static_cast<std::size_t>(best))) best = static_cast<int>(j);
    }
    taken[static_cast<std::size_t>(best)] = 1;
    out.relay_of_user[u] = best;
    out.effective_snr[u] = snr(u, static_cast<std::size_t>(best));
  }
  compute_global_ranks(snr, out);
  return out;
}

Assignment random_assign(const SnrMatrix& snr, RandomStream& rng) {
  check_dims(snr);
  Assignment out;
  reset(out, snr.rows());
  std::vector<int> relays(snr.cols());
  std::iota(relays.begin(), relays.end(), 0);
  for (std::size_t u = 0; u < snr.rows(); ++u) {
    const std::size_t pick = u + static_cast<std::size_t>(rng.below(relays.size() - u));
    std::swap(relays[u], relays[pick]);
    out.relay_of_user[u] = relays[u];
    out.effective_snr[u] = snr(u, static_cast<std::size_t>(relays[u]));
  }
  compute_global_ranks(snr, out);
  return out;
}

void assign(Scheme scheme, const SnrMatrix& snr, RandomStream& rng, MaxMinSolver& solver, Assignment& out) {
  switch (scheme) {
    case Scheme::MaxMin: solver.solve(snr, out); return;
    case Scheme::Naive: out = naive_assign(snr); return;
    case Scheme::Random: out = random_assign(snr, rng); return;
  }
}

int rank_support(int users, int relays, Scheme scheme) {
  return scheme == Scheme::MaxMin ? (users - 1) * relays + 1 : users * relays;
}

double RankPlacementDistribution::std_error(int k) const {
  if (method == RankMethod::ExactEnumeration || total == 0) return 0.0;
  const double p = probs.at(static_cast<std::size_t>(k - 1));
  return std::sqrt(p * (1.0 - p) / static_cast<double>(total));
}

std::vector<RankPlacementDistribution> rank_placement_probs(int users, int relays, Scheme scheme, RankMethod method,
                                                            std::uint64_t trials, std::uint64_t seed,
                                                            unsigned workers) {
  if (users < 1 || relays < users) throw std::invalid_argument("rank_placement_probs: need 1 <= M <= N");
  const int cells = users * relays;
  RankCounts init;
  init.users = users;
  init.support = rank_support(users, relays, scheme);
  init.counts.assign(static_cast<std::size_t>(users * init.support), 0);

  if (method == RankMethod::ExactEnumeration) {
    if (cells > kMaxEnumerationCells)
      throw std::invalid_argument("exact rank enumeration limited to M*N <= " + std::to_string(kMaxEnumerationCells));
    const std::uint64_t total = factorial_u64(cells);
    if (scheme == Scheme::Random) {
      // the chosen entry ignores the values, so its rank is uniform
      std::fill(init.counts.begin(), init.counts.end(), total / static_cast<std::uint64_t>(cells));
      return finish(init, method, total, 0);
    }
    SnrMatrix ranks(static_cast<std::size_t>(users), static_cast<std::size_t>(relays));
    std::vector<int> perm(static_cast<std::size_t>(cells));
    std::iota(perm.begin(), perm.end(), 1);
    MaxMinSolver solver;
    Assignment a;
    RandomStream unused(0);
    do {
      for (std::size_t c = 0; c < perm.size(); ++c) ranks.data()[c] = perm[c];
      assign(scheme, ranks, unused, solver, a);
      record(a, init);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return finish(init, method, total, 0);
  }

  if (trials < 1) throw std::invalid_argument("Monte-Carlo rank estimation needs trials >= 1");
  auto body = [&](std::uint64_t begin, std::uint64_t end, RankCounts& acc) {
    SnrMatrix ranks(static_cast<std::size_t>(users), static_cast<std::size_t>(relays));
    std::vector<double> perm(static_cast<std::size_t>(cells));
    MaxMinSolver solver;
    Assignment a;
    for (std::uint64_t t = begin; t < end; ++t) {
      auto rng = RandomStream::for_trial(seed, t);
      std::iota(perm.begin(), perm.end(), 1.0);
      for (std::size_t c = perm.size() - 1; c > 0; --c) std::swap(perm[c], perm[rng.below(c + 1)]);
      ranks.data() = perm;
      assign(scheme, ranks, rng, solver, a);
      record(a, acc);
      ++acc.trials;
    }
  };
  const RankCounts rc = run_blocks(trials, workers, init, body);
  return finish(rc, method, trials, trials);
}

RankPlacementDistribution pool_users(const std::vector<RankPlacementDistribution>& per_user) {
  if (per_user.empty()) throw std::invalid_argument("pool_users: empty input");
  RankPlacementDistribution pooled = per_user.front();
  for (std::size_t u = 1; u < per_user.size(); ++u) {
    const auto& d = per_user[u];
    if (d.counts.size() != pooled.counts.size()) throw std::invalid_argument("pool_users: support mismatch");
    for (std::size_t k = 0; k < d.counts.size(); ++k) pooled.counts[k] += d.counts[k];
    pooled.total += d.total;
  }
  for (std::size_t k = 0; k < pooled.counts.size(); ++k)
    pooled.probs[k] = static_cast<double>(pooled.counts[k]) / static_cast<double>(pooled.total);
  return pooled;
}

std::vector<RankPlacementDistribution> rank_placement_auto(int users, int relays, Scheme scheme,
                                                           std::uint64_t mc_trials, std::uint64_t seed,
                                                           unsigned workers) {
  if (users * relays <= kMaxEnumerationCells)
    return rank_placement_probs(users, relays, scheme, RankMethod::ExactEnumeration);
  return rank_placement_probs(users, relays, scheme, RankMethod::MonteCarlo, mc_trials, seed, workers);
}

}  // namespace ucr
