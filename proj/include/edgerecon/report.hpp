#pragma once

// Output files for single runs and policy comparisons: the per-frame log,
// run summaries, Q-table snapshots, the comparison table and the histogram
// and latency-quartile CSVs.

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgerecon/config.hpp"
#include "edgerecon/controller.hpp"
#include "edgerecon/csv.hpp"

namespace edgerecon {

inline constexpr const char* kFrameLogHeader =
    "frame,mask,server,quality,tx_s,recon_s,total_s,reward_cam,reward_srv,reliable";
inline constexpr const char* kLogFile = "log.csv";
inline constexpr const char* kSummaryFile = "summary.json";
inline constexpr const char* kCameraQFile = "qtable_camera.json";
inline constexpr const char* kServerQFile = "qtable_server.json";

inline void write_frame_log(std::span<const FrameRecord> records, std::ostream& out) {
  using csv::format_double;
  out << kFrameLogHeader << '\n';
  for (const auto& r : records) {
    out << r.frame << ',' << r.mask.to_string() << ',' << r.server << ','
        << format_double(r.outcome.quality) << ',' << format_double(r.outcome.tx_latency_s) << ','
        << format_double(r.outcome.recon_latency_s) << ','
        << format_double(r.outcome.total_latency_s) << ',' << format_double(r.rewards.camera) << ','
        << format_double(r.rewards.server) << ',' << (r.outcome.reliable ? 1 : 0) << '\n';
  }
}

inline void write_frame_log(std::span<const FrameRecord> records, const std::string& path) {
  auto out = csv::open_for_write(path);
  write_frame_log(records, out);
}

/// Five-number summary.
struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
};

/// Quantiles by linear interpolation between order statistics.
inline FiveNumber five_number(std::vector<double> xs) {
  if (xs.empty()) return {};
  std::sort(xs.begin(), xs.end());
  auto q = [&](double p) {
    const double h = p * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
  };
  return {xs.front(), q(0.25), q(0.5), q(0.75), xs.back()};
}

inline FiveNumber total_latency_summary(std::span<const FrameRecord> records) {
  std::vector<double> xs;
  xs.reserve(records.size());
  for (const auto& r : records) xs.push_back(r.outcome.total_latency_s);
  return five_number(std::move(xs));
}

inline nlohmann::json stats_json(const RunStats& s) {
  nlohmann::json subsets = nlohmann::json::object();
  for (const auto& [m, n] : s.camera_subset_histogram) subsets[m.to_string()] = n;
  nlohmann::json servers = nlohmann::json::object();
  for (const auto& [id, n] : s.server_histogram) servers[std::to_string(id)] = n;
  return {{"frames", s.frames},
          {"reliable_frames", s.reliable_frames},
          {"reliability_pct", s.reliability_pct()},
          {"avg_quality", s.avg_quality()},
          {"avg_recon_s", s.avg_recon_s()},
          {"avg_total_s", s.avg_total_s()},
          {"subset_counts", std::move(subsets)},
          {"server_counts", std::move(servers)}};
}

inline nlohmann::json run_summary_json(const ExperimentConfig& cfg, const EpisodeResult& res) {
  auto j = stats_json(res.stats);
  j["id"] = cfg.id;
  j["seed"] = cfg.seed;
  j["trace_seed"] = cfg.world_seed();
  j["camera_policy"] = display_name(cfg.camera_policy);
  j["server_policy"] = display_name(cfg.server_policy);
  return j;
}

inline void write_json(const nlohmann::json& j, const std::string& path) {
  auto out = csv::open_for_write(path);
  out << j.dump(2) << '\n';
}

/// Writes log.csv, summary.json and both Q-table snapshots (JSON null for a
/// policy without a table) into `dir`.
inline void write_run_outputs(const ExperimentConfig& cfg, const EpisodeResult& res,
                              const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_frame_log(res.records, (base / kLogFile).string());
  write_json(run_summary_json(cfg, res), (base / kSummaryFile).string());
  write_json(res.camera_qtable, (base / kCameraQFile).string());
  write_json(res.server_qtable, (base / kServerQFile).string());
}

/// Event log of a generated trace pair, ids 1-based as in the config.
inline nlohmann::json events_json(const DisruptionTraces& t) {
  nlohmann::json bumps = nlohmann::json::array();
  for (const auto& e : t.cameras.events) {
    std::vector<int> cams;
    for (int c : e.cameras) cams.push_back(c + 1);
    bumps.push_back({{"group", e.group}, {"cameras", cams}, {"start", e.start}, {"length", e.length}});
  }
  nlohmann::json spikes = nlohmann::json::array();
  for (const auto& e : t.servers.events)
    spikes.push_back({{"server", e.server + 1},
                      {"start", e.start},
                      {"length", e.length},
                      {"magnitude_ms", e.magnitude_ms}});
  return {{"frames", t.cameras.frames}, {"bump_events", bumps}, {"spike_events", spikes}};
}

// ---------------------------------------------------------------------------
// Comparisons

enum class Axis { kCamera, kServer };

inline Axis parse_axis(const std::string& s) {
  if (s == "camera") return Axis::kCamera;
  if (s == "server") return Axis::kServer;
  throw ConfigError("axis", "expected 'camera' or 'server', got '" + s + "'");
}

struct PolicyReport {
  std::string name;  ///< display name
  std::string key;   ///< config spelling, also the output subdirectory
  ExperimentConfig config;
  EpisodeResult result;
  FiveNumber latency;
};

struct ReportBundle {
  Axis axis = Axis::kCamera;
  std::vector<PolicyReport> rows;

  /// Percent of frames per camera subset for row `i`.
  std::map<CameraMask, double> subset_shares(std::size_t i) const {
    return shares(rows[i].result.stats.camera_subset_histogram, rows[i].result.stats.frames);
  }
  std::map<int, double> server_shares(std::size_t i) const {
    return shares(rows[i].result.stats.server_histogram, rows[i].result.stats.frames);
  }

private:
  template <typename K>
  static std::map<K, double> shares(const std::map<K, std::int64_t>& h, std::int64_t frames) {
    std::map<K, double> out;
    for (const auto& [k, n] : h)
      out[k] = frames == 0 ? 0.0 : 100.0 * static_cast<double>(n) / static_cast<double>(frames);
    return out;
  }
};

/// Runs each policy on the axis against one shared world. Policy i gets the
/// policy seed `seed + i`, so a one-policy comparison equals a plain run.
template <typename Kind>
ReportBundle compare_policies(const ExperimentConfig& base, std::span<const Kind> policies) {
  ReportBundle bundle;
  bundle.axis = std::is_same_v<Kind, CameraPolicyKind> ? Axis::kCamera : Axis::kServer;
  base.validate();
  const Environment env = build_environment(base);
  for (std::size_t i = 0; i < policies.size(); ++i) {
    PolicyReport row;
    row.config = base;
    row.config.trace_seed = base.world_seed();
    row.config.seed = base.seed + i;
    if constexpr (std::is_same_v<Kind, CameraPolicyKind>)
      row.config.camera_policy = policies[i];
    else
      row.config.server_policy = policies[i];
    row.name = display_name(policies[i]);
    row.key = to_string(policies[i]);
    row.config.id = row.key;
    row.result = run_episode(row.config, env);
    row.latency = total_latency_summary(row.result.records);
    bundle.rows.push_back(std::move(row));
  }
  return bundle;
}

inline ReportBundle compare(const ExperimentConfig& base, Axis axis) {
  if (axis == Axis::kCamera) return compare_policies<CameraPolicyKind>(base, kAllCameraPolicies);
  return compare_policies<ServerPolicyKind>(base, kAllServerPolicies);
}

/// Aligned text table: quality to 0 decimals, latency and reliability to 2.
inline std::string render_table(const ReportBundle& b) {
  std::size_t w = std::string("Policy").size();
  for (const auto& r : b.rows) w = std::max(w, r.name.size());
  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(w)) << "Policy" << std::right << std::setw(10) << "Avg PQ"
     << std::setw(14) << "Avg Recon s" << std::setw(14) << "Avg Total s" << std::setw(15)
     << "Reliability %" << '\n';
  for (const auto& r : b.rows) {
    const auto& s = r.result.stats;
    os << std::left << std::setw(static_cast<int>(w)) << r.name << std::right << std::setw(10)
       << csv::format_fixed(s.avg_quality(), 0) << std::setw(14) << csv::format_fixed(s.avg_recon_s(), 2)
       << std::setw(14) << csv::format_fixed(s.avg_total_s(), 2) << std::setw(15)
       << csv::format_fixed(s.reliability_pct(), 2) << '\n';
  }
  return os.str();
}

inline nlohmann::json bundle_json(const ReportBundle& b) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    const auto& r = b.rows[i];
    auto j = stats_json(r.result.stats);
    j["policy"] = r.name;
    j["key"] = r.key;
    j["seed"] = r.config.seed;
    j["latency_quartiles_s"] = {{"min", r.latency.min},
                                {"q1", r.latency.q1},
                                {"median", r.latency.median},
                                {"q3", r.latency.q3},
                                {"max", r.latency.max}};
    nlohmann::json subsets = nlohmann::json::object();
    for (const auto& [m, p] : b.subset_shares(i)) subsets[m.to_string()] = p;
    nlohmann::json servers = nlohmann::json::object();
    for (const auto& [id, p] : b.server_shares(i)) servers[std::to_string(id)] = p;
    j["subset_share_pct"] = std::move(subsets);
    j["server_share_pct"] = std::move(servers);
    rows.push_back(std::move(j));
  }
  return {{"axis", b.axis == Axis::kCamera ? "camera" : "server"},
          {"trace_seed", b.rows.empty() ? 0 : b.rows.front().config.world_seed()},
          {"rows", std::move(rows)}};
}

/// Writes table.txt, compare.json, subset_distribution.csv,
/// server_distribution.csv, latency_quartiles.csv and one run directory per
/// policy holding the files write_run_outputs produces.
inline void write_bundle(const ReportBundle& b, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    auto out = csv::open_for_write((base / "table.txt").string());
    out << render_table(b);
  }
  write_json(bundle_json(b), (base / "compare.json").string());

  auto subsets = csv::open_for_write((base / "subset_distribution.csv").string());
  subsets << "policy,mask,count,share_pct\n";
  auto servers = csv::open_for_write((base / "server_distribution.csv").string());
  servers << "policy,server,count,share_pct\n";
  auto quart = csv::open_for_write((base / "latency_quartiles.csv").string());
  quart << "policy,min_s,q1_s,median_s,q3_s,max_s\n";
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    const auto& r = b.rows[i];
    const auto& st = r.result.stats;
    for (const auto& [m, p] : b.subset_shares(i))
      subsets << r.key << ',' << m.to_string() << ',' << st.camera_subset_histogram.at(m) << ','
              << csv::format_double(p) << '\n';
    for (const auto& [id, p] : b.server_shares(i))
      servers << r.key << ',' << id << ',' << st.server_histogram.at(id) << ',' << csv::format_double(p)
              << '\n';
    using csv::format_double;
    quart << r.key << ',' << format_double(r.latency.min) << ',' << format_double(r.latency.q1) << ','
          << format_double(r.latency.median) << ',' << format_double(r.latency.q3) << ','
          << format_double(r.latency.max) << '\n';
    write_run_outputs(r.config, r.result, (base / r.key).string());
  }
}

}  // namespace edgerecon
