#pragma once

#include "edgerecon/camera_mask.hpp"

namespace edgerecon {

/// Result of one controller timestep.
struct FrameOutcome {
  double quality = 0.0;  ///< matching points per view
  double tx_latency_s = 0.0;
  double recon_latency_s = 0.0;
  double total_latency_s = 0.0;  ///< tx + recon
  CameraMask effective_mask;     ///< selected AND available
  bool reliable = false;

  friend bool operator==(const FrameOutcome&, const FrameOutcome&) = default;
};

}  // namespace edgerecon
