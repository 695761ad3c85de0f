#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "edgerecon/camera_mask.hpp"
#include "edgerecon/error.hpp"

namespace edgerecon {

/// All camera masks with k_min <= popcount <= k_max, in canonical
/// (lexicographic bitstring) order.
class ActionSpace {
public:
  ActionSpace() = default;

  ActionSpace(int n_cameras, int k_min, int k_max) : n_(n_cameras), k_min_(k_min), k_max_(k_max) {
    if (n_cameras < 1 || n_cameras > kMaxCameras)
      throw ConfigError("n_cameras", "must be in [1, 32]");
    if (k_min < 1) throw ConfigError("k_min", "must be >= 1");
    if (k_max < k_min) throw ConfigError("k_max", "must be >= k_min");
    if (k_max > n_cameras) throw ConfigError("k_max", "must be <= n_cameras");
    if (n_cameras > 20) throw ConfigError("n_cameras", "action enumeration is limited to 20 cameras");
    const std::uint32_t limit = 1u << n_cameras;
    for (std::uint32_t bits = 0; bits < limit; ++bits) {
      CameraMask m(bits, n_cameras);
      if (m.count() >= k_min && m.count() <= k_max) actions_.push_back(m);
    }
    std::sort(actions_.begin(), actions_.end());
  }

  int n_cameras() const { return n_; }
  int k_min() const { return k_min_; }
  int k_max() const { return k_max_; }
  std::size_t size() const { return actions_.size(); }
  const CameraMask& operator[](std::size_t i) const { return actions_[i]; }
  const std::vector<CameraMask>& actions() const { return actions_; }

  bool admits(const CameraMask& m) const {
    return m.size() == n_ && m.count() >= k_min_ && m.count() <= k_max_;
  }

  /// Position of `m` in canonical order.
  std::size_t index_of(const CameraMask& m) const {
    auto it = std::lower_bound(actions_.begin(), actions_.end(), m);
    if (it == actions_.end() || *it != m)
      throw ContractViolation("mask " + m.to_string() + " is not in the action space");
    return static_cast<std::size_t>(it - actions_.begin());
  }

  /// Indices of all actions with exactly k cameras, in canonical order.
  std::vector<std::size_t> with_count(int k) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < actions_.size(); ++i)
      if (actions_[i].count() == k) out.push_back(i);
    return out;
  }

private:
  int n_ = 0;
  int k_min_ = 0;
  int k_max_ = 0;
  std::vector<CameraMask> actions_;
};

inline ActionSpace enumerate_actions(int n, int k_min, int k_max) { return {n, k_min, k_max}; }

}  // namespace edgerecon
