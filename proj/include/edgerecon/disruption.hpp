#pragma once

// Correlated camera-disruption and server-latency trace generation.
//
// Camera side: every camera carries a disruption-probability series that sits
// at `baseline_prob`. A bump event lifts the probability of every camera in
// one correlation group to `bump_prob` for a geometric number of frames. The
// availability bit is 0 wherever the probability exceeds
// `disruption_threshold`. Server side: latency is baseline plus uniform jitter;
// a spike event adds a constant drawn uniformly from the spike range to one
// server for a geometric number of frames.
//
// Events on the same group (or server) never overlap or touch, so every event
// shows up as exactly one maximal run in the generated matrix. When the
// timeline is too short to hold every requested event, placement stops at the
// first event that finds no free slot; `events` lists what was placed.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "edgerecon/camera_mask.hpp"
#include "edgerecon/error.hpp"
#include "edgerecon/rng.hpp"

namespace edgerecon {

struct DisruptionParams {
  int n_frames = 4000;
  int n_cameras = 5;
  int n_servers = 4;
  /// 1-based camera ids.
  std::vector<std::vector<int>> correlation_groups{{1, 2}, {3, 5}, {4}};
  int n_bump_events = 10;
  double mean_bump_len = 50.0;
  double baseline_prob = 0.05;
  double bump_prob = 0.9;
  double disruption_threshold = 0.6;
  double server_baseline_ms = 150.0;
  double server_jitter_ms = 10.0;
  int n_spike_events = 10;
  double spike_min_ms = 400.0;
  double spike_max_ms = 1200.0;
  double mean_spike_len = 50.0;
  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const char* f, const std::string& w) { throw ConfigError(f, w); };
    if (n_frames <= 0) fail("n_frames", "must be > 0");
    if (n_cameras <= 0 || n_cameras > kMaxCameras) fail("n_cameras", "must be in [1, 32]");
    if (n_servers <= 0) fail("n_servers", "must be > 0");
    if (n_bump_events < 0) fail("n_bump_events", "must be >= 0");
    if (n_spike_events < 0) fail("n_spike_events", "must be >= 0");
    if (!(mean_bump_len >= 1.0)) fail("mean_bump_len", "must be >= 1 frame");
    if (!(mean_spike_len >= 1.0)) fail("mean_spike_len", "must be >= 1 frame");
    if (!(disruption_threshold > 0.0 && disruption_threshold < 1.0))
      fail("disruption_threshold", "must lie strictly inside (0, 1)");
    if (!(baseline_prob >= 0.0 && baseline_prob <= disruption_threshold))
      fail("baseline_prob", "must lie in [0, disruption_threshold]");
    if (!(bump_prob > disruption_threshold && bump_prob <= 1.0))
      fail("bump_prob", "must lie in (disruption_threshold, 1]");
    if (!(server_baseline_ms >= 0.0)) fail("server_baseline_ms", "must be >= 0");
    if (!(server_jitter_ms >= 0.0 && server_jitter_ms <= server_baseline_ms))
      fail("server_jitter_ms", "must lie in [0, server_baseline_ms]");
    if (!(spike_min_ms >= 0.0 && spike_min_ms < spike_max_ms))
      fail("spike_range_ms", "lower bound must be >= 0 and below the upper bound");
    if (n_bump_events > 0 && correlation_groups.empty())
      fail("correlation_groups", "bump events need at least one group");
    std::vector<bool> seen(static_cast<std::size_t>(n_cameras), false);
    for (const auto& g : correlation_groups) {
      if (g.empty()) fail("correlation_groups", "groups must be non-empty");
      for (int cam : g) {
        if (cam < 1 || cam > n_cameras)
          fail("correlation_groups", "camera id " + std::to_string(cam) + " outside [1, n_cameras]");
        if (seen[static_cast<std::size_t>(cam - 1)])
          fail("correlation_groups", "camera id " + std::to_string(cam) + " appears in two groups");
        seen[static_cast<std::size_t>(cam - 1)] = true;
      }
    }
  }
};

struct BumpEvent {
  int group = 0;  ///< index into correlation_groups
  std::vector<int> cameras;  ///< 0-based
  int start = 0;
  int length = 0;
  int end() const { return start + length; }
  friend bool operator==(const BumpEvent&, const BumpEvent&) = default;
};

struct SpikeEvent {
  int server = 0;
  int start = 0;
  int length = 0;
  double magnitude_ms = 0.0;
  int end() const { return start + length; }
  friend bool operator==(const SpikeEvent&, const SpikeEvent&) = default;
};

/// Availability matrix [frame x camera], 1 = normal, 0 = disrupted.
struct CameraTrace {
  int frames = 0;
  int n_cameras = 0;
  std::vector<std::uint8_t> availability;
  /// Generation log. Empty for traces loaded from disk.
  std::vector<BumpEvent> events;

  CameraTrace() = default;
  CameraTrace(int n_frames, int cameras)
      : frames(n_frames), n_cameras(cameras),
        availability(static_cast<std::size_t>(n_frames) * static_cast<std::size_t>(cameras), 1) {}

  std::uint8_t at(int frame, int camera) const {
    return availability[static_cast<std::size_t>(frame) * static_cast<std::size_t>(n_cameras) +
                        static_cast<std::size_t>(camera)];
  }
  std::uint8_t& at(int frame, int camera) {
    return availability[static_cast<std::size_t>(frame) * static_cast<std::size_t>(n_cameras) +
                        static_cast<std::size_t>(camera)];
  }

  CameraMask row(int frame) const {
    std::uint32_t bits = 0;
    for (int c = 0; c < n_cameras; ++c)
      if (at(frame, c)) bits |= 1u << c;
    return {bits, n_cameras};
  }

  /// Matrix equality; the event log is not compared.
  bool same_matrix(const CameraTrace& o) const {
    return frames == o.frames && n_cameras == o.n_cameras && availability == o.availability;
  }
};

/// Latency matrix [frame x server] in milliseconds.
struct ServerLatencyTrace {
  int frames = 0;
  int n_servers = 0;
  std::vector<double> latency_ms;
  std::vector<SpikeEvent> events;

  ServerLatencyTrace() = default;
  ServerLatencyTrace(int n_frames, int servers)
      : frames(n_frames), n_servers(servers),
        latency_ms(static_cast<std::size_t>(n_frames) * static_cast<std::size_t>(servers), 0.0) {}

  double at(int frame, int server) const {
    return latency_ms[static_cast<std::size_t>(frame) * static_cast<std::size_t>(n_servers) +
                      static_cast<std::size_t>(server)];
  }
  double& at(int frame, int server) {
    return latency_ms[static_cast<std::size_t>(frame) * static_cast<std::size_t>(n_servers) +
                      static_cast<std::size_t>(server)];
  }

  bool same_matrix(const ServerLatencyTrace& o) const {
    return frames == o.frames && n_servers == o.n_servers && latency_ms == o.latency_ms;
  }
};

struct DisruptionTraces {
  CameraTrace cameras;
  ServerLatencyTrace servers;
};

namespace detail {

inline int draw_length(Rng& rng, double mean, int cap) {
  // Geometric on {1, 2, ...} with the requested mean.
  const double p = 1.0 / mean;
  int len = 1;
  if (p < 1.0) len += std::geometric_distribution<int>(p)(rng);
  return std::min(len, cap);
}

/// True when [start, start+len) overlaps or touches an interval in `taken`.
template <typename Event>
bool collides(const std::vector<Event>& taken, int lane, int start, int len,
              int Event::*lane_field) {
  for (const auto& e : taken) {
    if (e.*lane_field != lane) continue;
    if (start <= e.end() && e.start <= start + len) return true;
  }
  return false;
}

inline constexpr int kPlacementAttempts = 10000;

}  // namespace detail

inline CameraTrace generate_camera_trace(const DisruptionParams& params) {
  params.validate();
  Rng rng = make_rng(params.seed, Stream::kCameraTrace);
  CameraTrace trace(params.n_frames, params.n_cameras);

  const auto n_groups = params.correlation_groups.size();
  for (int k = 0; k < params.n_bump_events; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < detail::kPlacementAttempts && !placed; ++attempt) {
      const int group = static_cast<int>(uniform_index(rng, n_groups));
      const int len = detail::draw_length(rng, params.mean_bump_len, params.n_frames);
      const int start = static_cast<int>(
          uniform_index(rng, static_cast<std::size_t>(params.n_frames - len + 1)));
      if (detail::collides(trace.events, group, start, len, &BumpEvent::group)) continue;
      BumpEvent ev{group, {}, start, len};
      for (int cam : params.correlation_groups[static_cast<std::size_t>(group)])
        ev.cameras.push_back(cam - 1);
      trace.events.push_back(std::move(ev));
      placed = true;
    }
    if (!placed) break;
  }

  std::vector<double> prob(trace.availability.size(), params.baseline_prob);
  for (const auto& ev : trace.events)
    for (int t = ev.start; t < ev.end(); ++t)
      for (int cam : ev.cameras)
        prob[static_cast<std::size_t>(t) * static_cast<std::size_t>(params.n_cameras) +
             static_cast<std::size_t>(cam)] = params.bump_prob;

  for (std::size_t i = 0; i < prob.size(); ++i)
    trace.availability[i] = prob[i] > params.disruption_threshold ? 0 : 1;
  return trace;
}

inline ServerLatencyTrace generate_server_trace(const DisruptionParams& params) {
  params.validate();
  Rng rng = make_rng(params.seed, Stream::kServerTrace);
  ServerLatencyTrace trace(params.n_frames, params.n_servers);

  std::uniform_real_distribution<double> jitter(-params.server_jitter_ms, params.server_jitter_ms);
  for (double& v : trace.latency_ms)
    v = params.server_baseline_ms + (params.server_jitter_ms > 0.0 ? jitter(rng) : 0.0);

  std::uniform_real_distribution<double> magnitude(params.spike_min_ms, params.spike_max_ms);
  for (int k = 0; k < params.n_spike_events; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < detail::kPlacementAttempts && !placed; ++attempt) {
      const int server = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(params.n_servers)));
      const int len = detail::draw_length(rng, params.mean_spike_len, params.n_frames);
      const int start = static_cast<int>(
          uniform_index(rng, static_cast<std::size_t>(params.n_frames - len + 1)));
      const double mag = magnitude(rng);
      if (detail::collides(trace.events, server, start, len, &SpikeEvent::server)) continue;
      trace.events.push_back({server, start, len, mag});
      placed = true;
    }
    if (!placed) break;
  }

  for (const auto& ev : trace.events)
    for (int t = ev.start; t < ev.end(); ++t) trace.at(t, ev.server) += ev.magnitude_ms;
  for (double& v : trace.latency_ms) v = std::max(0.0, v);
  return trace;
}

inline DisruptionTraces generate_traces(const DisruptionParams& params) {
  return {generate_camera_trace(params), generate_server_trace(params)};
}

}  // namespace edgerecon
