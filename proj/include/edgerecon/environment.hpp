#pragma once

// One controller timestep: a camera subset and a server under the current
// disruption state produce quality, transmission latency and reconstruction
// latency.

#include <cmath>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "edgerecon/action_space.hpp"
#include "edgerecon/csv.hpp"
#include "edgerecon/disruption.hpp"
#include "edgerecon/frame_outcome.hpp"
#include "edgerecon/metrics.hpp"
#include "edgerecon/rng.hpp"

namespace edgerecon {

/// Fewer effective views than this produce no reconstruction at all.
inline constexpr int kMinViews = 2;

/// Quality lookup, either a per-subset base table plus Gaussian noise or a
/// measured per-frame trace.
class QualityModel {
public:
  enum class Mode { kSynthetic, kTrace };

  QualityModel() = default;

  static QualityModel synthetic(std::map<CameraMask, double> base, double noise_sd) {
    QualityModel m;
    m.mode_ = Mode::kSynthetic;
    m.base_ = std::move(base);
    m.noise_sd_ = noise_sd;
    if (!(noise_sd >= 0.0)) throw ConfigError("quality.noise_sd", "must be >= 0");
    for (const auto& [mask, v] : m.base_)
      if (!(v >= 0.0) || !std::isfinite(v))
        throw ConfigError("quality.base", "value for " + mask.to_string() + " must be finite and >= 0");
    for (const auto& [small, vs] : m.base_)
      for (const auto& [big, vb] : m.base_)
        if (small != big && small.subset_of(big) && vs > vb)
          throw ConfigError("quality.base", "not monotone: " + small.to_string() + " (" +
                                                csv::format_double(vs) + ") exceeds superset " +
                                                big.to_string() + " (" + csv::format_double(vb) + ")");
    return m;
  }

  static QualityModel trace(int frames, std::vector<CameraMask> columns, std::vector<double> values) {
    QualityModel m;
    m.mode_ = Mode::kTrace;
    m.frames_ = frames;
    m.columns_ = std::move(columns);
    m.values_ = std::move(values);
    for (std::size_t i = 0; i < m.columns_.size(); ++i) m.column_of_[m.columns_[i]] = i;
    return m;
  }

  Mode mode() const { return mode_; }
  double noise_sd() const { return noise_sd_; }
  const std::map<CameraMask, double>& base_table() const { return base_; }
  int trace_frames() const { return frames_; }

  /// Masks that a lookup may need: popcount in [kMinViews, k_max].
  static std::vector<CameraMask> required_masks(int n_cameras, int k_max) {
    if (k_max < kMinViews) return {};
    const ActionSpace space(n_cameras, kMinViews, k_max);
    return space.actions();
  }

  /// Throws ConfigError naming every mask the model cannot answer.
  void check_covers(int n_cameras, int k_max) const {
    std::string missing;
    for (const auto& m : required_masks(n_cameras, k_max)) {
      const bool has = mode_ == Mode::kSynthetic ? base_.count(m) > 0 : column_of_.count(m) > 0;
      if (!has) missing += (missing.empty() ? "" : " ") + m.to_string();
    }
    if (!missing.empty()) throw ConfigError("quality", "no quality value for masks: " + missing);
  }

  /// Noise-free base for the synthetic model.
  double base(const CameraMask& m) const {
    auto it = base_.find(m);
    if (it == base_.end()) throw ContractViolation("no base quality for mask " + m.to_string());
    return it->second;
  }

  /// Quality for `effective` at `frame`; `z` is that frame's standard normal draw.
  double lookup(int frame, const CameraMask& effective, double z) const {
    if (effective.count() < kMinViews) return 0.0;
    if (mode_ == Mode::kSynthetic) return std::max(0.0, base(effective) + noise_sd_ * z);
    auto it = column_of_.find(effective);
    if (it == column_of_.end()) throw ContractViolation("no quality column for mask " + effective.to_string());
    if (frame < 0 || frame >= frames_) throw BoundsError("quality trace has no frame " + std::to_string(frame));
    return values_[static_cast<std::size_t>(frame) * columns_.size() + it->second];
  }

private:
  Mode mode_ = Mode::kSynthetic;
  std::map<CameraMask, double> base_;
  double noise_sd_ = 0.0;
  int frames_ = 0;
  std::vector<CameraMask> columns_;
  std::vector<double> values_;
  std::unordered_map<CameraMask, std::size_t> column_of_;
};

/// Shape of the generated base table.
struct QualityTableShape {
  double full = 650.0;             ///< all cameras
  double per_missing = 65.0;       ///< lost per camera left out
  double two_view_penalty = 155.0; ///< extra loss for a bare two-view reconstruction
  double spread = 30.0;            ///< per-camera offset range, +spread (camera 1) .. -spread (camera N)
};

/// Generated base table over every mask with at least two cameras:
/// full - per_missing * (N - k) - [k == 2] * two_view_penalty + sum of the
/// selected cameras' offsets.
inline std::map<CameraMask, double> default_quality_table(int n_cameras,
                                                          const QualityTableShape& shape = {}) {
  std::vector<double> offset(static_cast<std::size_t>(n_cameras), 0.0);
  if (n_cameras > 1)
    for (int c = 0; c < n_cameras; ++c)
      offset[static_cast<std::size_t>(c)] = shape.spread * (1.0 - 2.0 * c / (n_cameras - 1));
  std::map<CameraMask, double> table;
  if (n_cameras < kMinViews) return table;
  const ActionSpace space(n_cameras, kMinViews, n_cameras);
  for (const auto& m : space.actions()) {
    double v = shape.full - shape.per_missing * (n_cameras - m.count());
    if (m.count() == kMinViews) v -= shape.two_view_penalty;
    for (int c = 0; c < n_cameras; ++c)
      if (m.test(c)) v += offset[static_cast<std::size_t>(c)];
    table[m] = std::max(0.0, v);
  }
  return table;
}

/// Reads `frame,<mask>,<mask>,...`. Every mask with popcount in
/// [2, k_max] over `n_cameras` must have a column.
inline QualityModel load_quality_trace(const std::string& path, int n_cameras, int k_max) {
  const auto lines = csv::read_lines(path);
  if (lines.empty()) throw ParseError(path, 1, "empty file");
  const auto header = csv::split(lines[0]);
  if (header.empty() || header[0] != "frame") throw ParseError(path, 1, "header must start with 'frame'");
  std::vector<CameraMask> columns;
  for (std::size_t i = 1; i < header.size(); ++i) {
    CameraMask m;
    try {
      m = CameraMask::from_string(header[i]);
    } catch (const ConfigError& e) {
      throw ParseError(path, 1, e.what());
    }
    if (m.size() != n_cameras)
      throw SchemaError(path + ": column '" + std::string(header[i]) + "' is not a " +
                        std::to_string(n_cameras) + "-camera bitstring");
    columns.push_back(m);
  }
  const int frames = static_cast<int>(lines.size()) - 1;
  if (frames == 0) throw SchemaError(path + ": no frame rows");
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(frames) * columns.size());
  for (int t = 0; t < frames; ++t) {
    const std::size_t line_no = static_cast<std::size_t>(t) + 2;
    const auto cells = csv::split(lines[static_cast<std::size_t>(t) + 1]);
    if (cells.size() != columns.size() + 1)
      throw ParseError(path, line_no, "expected " + std::to_string(columns.size() + 1) + " cells");
    long long f = 0;
    if (!csv::parse_int(cells[0], f)) throw ParseError(path, line_no, "frame cell is not an integer");
    if (f != t) throw SchemaError(path + ":" + std::to_string(line_no) + ": frame index out of sequence");
    for (std::size_t c = 1; c < cells.size(); ++c) {
      double v = 0.0;
      if (!csv::parse_double(cells[c], v) || v < 0.0)
        throw ParseError(path, line_no, "quality cell '" + std::string(cells[c]) + "' is not a nonnegative number");
      values.push_back(v);
    }
  }
  auto model = QualityModel::trace(frames, std::move(columns), std::move(values));
  try {
    model.check_covers(n_cameras, k_max);
  } catch (const ConfigError& e) {
    throw SchemaError(path + ": " + e.what());
  }
  return model;
}

/// Writes the quality every required mask would get over `frames` frames,
/// using the per-frame noise draws `z` (may be empty for noise-free).
inline void write_quality_trace(const QualityModel& model, int n_cameras, int k_max, int frames,
                                const std::vector<double>& z, const std::string& path) {
  const auto masks = QualityModel::required_masks(n_cameras, k_max);
  auto out = csv::open_for_write(path);
  out << "frame";
  for (const auto& m : masks) out << ',' << m.to_string();
  out << '\n';
  for (int t = 0; t < frames; ++t) {
    out << t;
    const double zt = z.empty() ? 0.0 : z[static_cast<std::size_t>(t)];
    for (const auto& m : masks) out << ',' << csv::format_double(model.lookup(t, m, zt));
    out << '\n';
  }
}

struct LatencyModel {
  double per_image_tx_ms = 350.0;
  double recon_base_ms = 400.0;
  double recon_per_image_ms = 120.0;
  /// One multiplier per server; empty means 1.0 everywhere.
  std::vector<double> server_speed_factor;
  /// Time between consecutive frames. When > 0 each server works through its
  /// jobs in order, so a frame sent to a server that is still busy waits for
  /// the remaining work and that wait counts as reconstruction latency.
  /// 0 disables the backlog (servers are always idle on arrival).
  double frame_interval_ms = 0.0;

  double speed(int server) const {
    return server_speed_factor.empty() ? 1.0 : server_speed_factor[static_cast<std::size_t>(server)];
  }

  void validate(int n_servers) const {
    if (!(per_image_tx_ms >= 0.0)) throw ConfigError("latency.per_image_tx_ms", "must be >= 0");
    if (!(recon_base_ms >= 0.0)) throw ConfigError("latency.recon_base_ms", "must be >= 0");
    if (!(recon_per_image_ms >= 0.0)) throw ConfigError("latency.recon_per_image_ms", "must be >= 0");
    if (!server_speed_factor.empty() &&
        server_speed_factor.size() != static_cast<std::size_t>(n_servers))
      throw ConfigError("latency.server_speed_factor", "needs one entry per server");
    for (double f : server_speed_factor)
      if (!(f >= 0.0)) throw ConfigError("latency.server_speed_factor", "entries must be >= 0");
    if (!(frame_interval_ms >= 0.0)) throw ConfigError("latency.frame_interval_ms", "must be >= 0");
  }
};

/// Outstanding reconstruction work per server, in ms, as of frame `frame`.
/// Owned by one episode; only used when LatencyModel::frame_interval_ms > 0.
struct ServerBacklog {
  int frame = 0;
  std::vector<double> pending_ms;

  explicit ServerBacklog(int n_servers) : pending_ms(static_cast<std::size_t>(n_servers), 0.0) {}

  /// Drains every queue up to `to_frame` and returns the wait at `server`.
  double advance(int to_frame, int server, double interval_ms) {
    const double elapsed = static_cast<double>(to_frame - frame) * interval_ms;
    for (double& p : pending_ms) p = std::max(0.0, p - elapsed);
    frame = to_frame;
    return pending_ms[static_cast<std::size_t>(server)];
  }
};

/// Per-frame standard normal draws shared by every subset at that frame, so
/// quality noise is independent of which policy is running.
inline std::vector<double> quality_noise(std::uint64_t seed, int frames) {
  Rng rng = make_rng(seed, Stream::kQualityNoise);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<double> z(static_cast<std::size_t>(frames));
  for (double& v : z) v = n01(rng);
  return z;
}

/// Immutable simulation world for one episode. `step` is a pure function of
/// its arguments and this state.
class Environment {
public:
  Environment(DisruptionTraces traces, QualityModel quality, LatencyModel latency,
              Thresholds thresholds, int k_min, int k_max, std::vector<double> noise)
      : traces_(std::move(traces)), quality_(std::move(quality)), latency_(std::move(latency)),
        thresholds_(thresholds), k_min_(k_min), k_max_(k_max), noise_(std::move(noise)) {
    if (traces_.cameras.frames != traces_.servers.frames)
      throw SchemaError("camera and server traces differ in frame count");
    if (noise_.size() < static_cast<std::size_t>(frames()))
      noise_.resize(static_cast<std::size_t>(frames()), 0.0);
    latency_.validate(n_servers());
    thresholds_.validate();
    quality_.check_covers(n_cameras(), k_max_);
    if (quality_.mode() == QualityModel::Mode::kTrace && quality_.trace_frames() < frames())
      throw ConfigError("quality.path", "quality trace is shorter than the disruption traces");
  }

  int frames() const { return traces_.cameras.frames; }
  int n_cameras() const { return traces_.cameras.n_cameras; }
  int n_servers() const { return traces_.servers.n_servers; }
  const DisruptionTraces& traces() const { return traces_; }
  const QualityModel& quality() const { return quality_; }
  const LatencyModel& latency() const { return latency_; }
  const Thresholds& thresholds() const { return thresholds_; }

  FrameOutcome step(int frame, const CameraMask& selected, int server) const {
    return step_impl(frame, selected, server, nullptr);
  }

  /// As above, threading the episode's server backlog through the step.
  /// Identical to the stateless overload when frame_interval_ms == 0.
  FrameOutcome step(int frame, const CameraMask& selected, int server, ServerBacklog& backlog) const {
    return step_impl(frame, selected, server, &backlog);
  }

private:
  FrameOutcome step_impl(int frame, const CameraMask& selected, int server, ServerBacklog* backlog) const {
    if (frame < 0 || frame >= frames())
      throw BoundsError("frame " + std::to_string(frame) + " outside trace of " +
                        std::to_string(frames()) + " frames");
    if (server < 0 || server >= n_servers())
      throw BoundsError("server " + std::to_string(server) + " outside [0, " +
                        std::to_string(n_servers()) + ")");
    if (selected.size() != n_cameras() || selected.count() < k_min_ || selected.count() > k_max_)
      throw ContractViolation("mask " + selected.to_string() + " violates the selection bounds");

    FrameOutcome o;
    o.effective_mask = selected & traces_.cameras.row(frame);
    const int views = o.effective_mask.count();
    o.quality = quality_.lookup(frame, o.effective_mask, noise_[static_cast<std::size_t>(frame)]);
    o.tx_latency_s = (latency_.per_image_tx_ms * views + traces_.servers.at(frame, server)) / 1000.0;
    const double service_ms =
        (latency_.recon_base_ms + latency_.recon_per_image_ms * views) * latency_.speed(server);
    double wait_ms = 0.0;
    if (backlog && latency_.frame_interval_ms > 0.0) {
      if (frame < backlog->frame) throw ContractViolation("server backlog cannot move backwards in time");
      wait_ms = backlog->advance(frame, server, latency_.frame_interval_ms);
      backlog->pending_ms[static_cast<std::size_t>(server)] += service_ms;
    }
    o.recon_latency_s = (wait_ms + service_ms) / 1000.0;
    o.total_latency_s = o.tx_latency_s + o.recon_latency_s;
    o.reliable = reliability(o, thresholds_);
    return o;
  }

  DisruptionTraces traces_;
  QualityModel quality_;
  LatencyModel latency_;
  Thresholds thresholds_;
  int k_min_;
  int k_max_;
  std::vector<double> noise_;
};

}  // namespace edgerecon
