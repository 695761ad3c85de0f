#pragma once

// Non-RL comparison policies: Random, Greedy-3 and the epsilon-greedy bandit
// for cameras; Round-Robin and EWMA Latency-Greedy for servers.

#include <limits>
#include <vector>

#include "edgerecon/action_space.hpp"
#include "edgerecon/q_learning.hpp"
#include "edgerecon/rng.hpp"

namespace edgerecon {

inline CameraMask baseline_random(const ActionSpace& space, Rng& rng) {
  return space[uniform_index(rng, space.size())];
}

/// Running mean with a sample count.
struct RunningMean {
  std::int64_t n = 0;
  double mean = 0.0;
  void add(double x) {
    ++n;
    mean += (x - mean) / static_cast<double>(n);
  }
};

/// Always picks the 3-camera subset with the highest running-mean observed
/// quality. Cold start visits every 3-camera subset once in canonical order.
class Greedy3Policy {
public:
  explicit Greedy3Policy(const ActionSpace& space, int arity = 3) : space_(space) {
    candidates_ = space.with_count(arity);
    if (candidates_.empty())
      throw ConfigError("k_min", "Greedy-3 needs " + std::to_string(arity) +
                                     "-camera subsets inside [k_min, k_max]");
    stats_.resize(candidates_.size());
  }

  CameraMask select() {
    if (cold_ < candidates_.size()) return space_[candidates_[cold_++]];
    std::size_t best = 0;
    double best_mean = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
      if (stats_[i].n == 0) continue;
      if (stats_[i].mean > best_mean) {
        best_mean = stats_[i].mean;
        best = i;
      }
    }
    return space_[candidates_[best]];
  }

  void observe(const CameraMask& mask, double quality) {
    for (std::size_t i = 0; i < candidates_.size(); ++i)
      if (space_[candidates_[i]] == mask) {
        stats_[i].add(quality);
        return;
      }
    throw ContractViolation("Greedy-3: observed mask " + mask.to_string() + " is not a candidate");
  }

  /// Estimated quality for a candidate mask; NaN when never observed.
  double estimate(const CameraMask& mask) const {
    for (std::size_t i = 0; i < candidates_.size(); ++i)
      if (space_[candidates_[i]] == mask)
        return stats_[i].n ? stats_[i].mean : std::numeric_limits<double>::quiet_NaN();
    return std::numeric_limits<double>::quiet_NaN();
  }

  std::size_t n_candidates() const { return candidates_.size(); }

private:
  ActionSpace space_;
  std::vector<std::size_t> candidates_;
  std::vector<RunningMean> stats_;
  std::size_t cold_ = 0;
};

/// Multi-armed bandit over camera subsets: epsilon-greedy on per-arm mean
/// reward, no bootstrap term.
class BanditPolicy {
public:
  BanditPolicy(ActionSpace space, double epsilon)
      : space_(std::move(space)), epsilon_(epsilon), arms_(space_.size()) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("bandit_epsilon", "must lie in [0, 1]");
  }

  CameraMask select(Rng& rng) {
    std::vector<double> means(arms_.size());
    for (std::size_t i = 0; i < arms_.size(); ++i) means[i] = arms_[i].mean;
    return space_[epsilon_greedy(means, epsilon_, rng)];
  }

  void learn(const CameraMask& mask, double reward) { arms_[space_.index_of(mask)].add(reward); }

  double mean(std::size_t arm) const { return arms_[arm].mean; }
  std::int64_t pulls(std::size_t arm) const { return arms_[arm].n; }
  double epsilon() const { return epsilon_; }
  const ActionSpace& space() const { return space_; }

private:
  ActionSpace space_;
  double epsilon_;
  std::vector<RunningMean> arms_;
};

inline int baseline_round_robin(int frame, int n_servers) { return frame % n_servers; }

/// Picks the server with the lowest EWMA of observed end-to-end latency.
/// Only the server that was used gets a new observation; a server that has
/// never been observed is preferred (estimate 0).
class LatencyGreedyPolicy {
public:
  LatencyGreedyPolicy(int n_servers, double beta)
      : beta_(beta), ewma_(static_cast<std::size_t>(n_servers), 0.0),
        seen_(static_cast<std::size_t>(n_servers), false) {
    if (n_servers < 1) throw ConfigError("n_servers", "must be > 0");
    if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("ewma_beta", "must lie in (0, 1]");
  }

  int select() const { return static_cast<int>(std::min_element(ewma_.begin(), ewma_.end()) - ewma_.begin()); }

  void observe(int server, double latency) {
    auto& e = ewma_[static_cast<std::size_t>(server)];
    if (!seen_[static_cast<std::size_t>(server)]) {
      e = latency;
      seen_[static_cast<std::size_t>(server)] = true;
    } else {
      e = beta_ * latency + (1.0 - beta_) * e;
    }
  }

  /// Overwrites one estimate (tests, warm starts).
  void set_estimate(int server, double value) {
    ewma_[static_cast<std::size_t>(server)] = value;
    seen_[static_cast<std::size_t>(server)] = true;
  }

  double estimate(int server) const { return ewma_[static_cast<std::size_t>(server)]; }
  double beta() const { return beta_; }

private:
  double beta_;
  std::vector<double> ewma_;
  std::vector<bool> seen_;
};

}  // namespace edgerecon
