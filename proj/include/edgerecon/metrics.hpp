#pragma once

// Score functions, per-agent rewards, the reliability predicate and run
// aggregation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "edgerecon/error.hpp"
#include "edgerecon/frame_outcome.hpp"

namespace edgerecon {

struct Thresholds {
  double theta = 400.0;        ///< minimum quality, matching points per view
  double phi_total_s = 3.0;    ///< end-to-end latency budget
  double phi_recon_s = 1.0;    ///< reconstruction-only budget

  void validate() const {
    if (!(theta > 0.0)) throw ConfigError("thresholds.theta", "must be > 0");
    if (!(phi_total_s > 0.0)) throw ConfigError("thresholds.phi_total_s", "must be > 0");
    if (!(phi_recon_s > 0.0)) throw ConfigError("thresholds.phi_recon_s", "must be > 0");
    if (phi_recon_s > phi_total_s)
      throw ConfigError("thresholds.phi_recon_s", "must not exceed phi_total_s");
  }
};

struct RewardWeights {
  double w1 = 0.5;  ///< quality
  double w2 = 0.5;  ///< reconstruction latency

  void validate() const {
    if (!(w1 >= 0.0 && w1 <= 1.0)) throw ConfigError("weights.w1", "must lie in [0, 1]");
    if (!(w2 >= 0.0 && w2 <= 1.0)) throw ConfigError("weights.w2", "must lie in [0, 1]");
    if (std::abs(w1 + w2 - 1.0) > 1e-9) throw ConfigError("weights", "w1 + w2 must equal 1");
  }
};

/// min(1, q / theta)
inline double quality_score(double q, double theta) {
  detail::require(theta > 0.0, "quality_score: theta must be > 0");
  return std::min(1.0, q / theta);
}

/// max(0, 1 - l / phi)
inline double latency_score(double l, double phi) {
  detail::require(phi > 0.0, "latency_score: phi must be > 0");
  return std::max(0.0, 1.0 - l / phi);
}

/// Weighted quality and reconstruction-latency score. Transmission latency is
/// deliberately absent.
inline double camera_reward(const FrameOutcome& o, const Thresholds& th, const RewardWeights& w) {
  return w.w1 * quality_score(o.quality, th.theta) +
         w.w2 * latency_score(o.recon_latency_s, th.phi_recon_s);
}

inline double server_reward(const FrameOutcome& o, const Thresholds& th) {
  return latency_score(o.total_latency_s, th.phi_total_s);
}

/// Quality at or above theta, total within phi_total and reconstruction within
/// phi_recon. Setting phi_recon_s == phi_total_s gives the single-bound form.
inline bool reliability(const FrameOutcome& o, const Thresholds& th) {
  return o.quality >= th.theta && o.total_latency_s <= th.phi_total_s &&
         o.recon_latency_s <= th.phi_recon_s;
}

struct RewardPair {
  double camera = 0.0;
  double server = 0.0;
  friend bool operator==(const RewardPair&, const RewardPair&) = default;
};

/// Aggregate over a run. Sums rather than means are stored so that merging two
/// partial runs is exact for counts and associative for means.
struct RunStats {
  std::int64_t frames = 0;
  std::int64_t reliable_frames = 0;
  double quality_sum = 0.0;
  double recon_sum_s = 0.0;
  double total_sum_s = 0.0;
  std::map<CameraMask, std::int64_t> camera_subset_histogram;
  std::map<int, std::int64_t> server_histogram;
  std::vector<RewardPair> reward_series;

  double reliability_pct() const {
    return frames == 0 ? 0.0 : 100.0 * static_cast<double>(reliable_frames) / static_cast<double>(frames);
  }
  double avg_quality() const { return mean(quality_sum); }
  double avg_recon_s() const { return mean(recon_sum_s); }
  double avg_total_s() const { return mean(total_sum_s); }

private:
  double mean(double sum) const { return frames == 0 ? 0.0 : sum / static_cast<double>(frames); }
};

inline void accumulate(RunStats& stats, const FrameOutcome& outcome, const CameraMask& chosen,
                       int server, RewardPair rewards) {
  ++stats.frames;
  if (outcome.reliable) ++stats.reliable_frames;
  stats.quality_sum += outcome.quality;
  stats.recon_sum_s += outcome.recon_latency_s;
  stats.total_sum_s += outcome.total_latency_s;
  ++stats.camera_subset_histogram[chosen];
  ++stats.server_histogram[server];
  stats.reward_series.push_back(rewards);
}

/// Concatenation of two record streams: `a` then `b`.
inline RunStats merge(RunStats a, const RunStats& b) {
  a.frames += b.frames;
  a.reliable_frames += b.reliable_frames;
  a.quality_sum += b.quality_sum;
  a.recon_sum_s += b.recon_sum_s;
  a.total_sum_s += b.total_sum_s;
  for (const auto& [m, c] : b.camera_subset_histogram) a.camera_subset_histogram[m] += c;
  for (const auto& [s, c] : b.server_histogram) a.server_histogram[s] += c;
  a.reward_series.insert(a.reward_series.end(), b.reward_series.begin(), b.reward_series.end());
  return a;
}

}  // namespace edgerecon
