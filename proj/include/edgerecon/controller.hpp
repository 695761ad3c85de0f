#pragma once

// The per-frame loop binding the camera and server policies to the
// environment, and grid execution of independent episodes.

#include <cmath>
#include <deque>
#include <future>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgerecon/baselines.hpp"
#include "edgerecon/environment.hpp"
#include "edgerecon/metrics.hpp"
#include "edgerecon/q_learning.hpp"
#include "edgerecon/trace_io.hpp"

namespace edgerecon {

enum class CameraPolicyKind { kQLearning, kAdaptiveQ, kRandom, kGreedy3, kBandit };
enum class ServerPolicyKind { kQLearning, kAdaptiveQ, kRoundRobin, kLatencyGreedy };

inline constexpr CameraPolicyKind kAllCameraPolicies[] = {
    CameraPolicyKind::kQLearning, CameraPolicyKind::kGreedy3, CameraPolicyKind::kBandit,
    CameraPolicyKind::kAdaptiveQ, CameraPolicyKind::kRandom};
inline constexpr ServerPolicyKind kAllServerPolicies[] = {
    ServerPolicyKind::kRoundRobin, ServerPolicyKind::kLatencyGreedy, ServerPolicyKind::kQLearning,
    ServerPolicyKind::kAdaptiveQ};

inline const char* to_string(CameraPolicyKind k) {
  switch (k) {
    case CameraPolicyKind::kQLearning: return "qlearning";
    case CameraPolicyKind::kAdaptiveQ: return "adaptive_q";
    case CameraPolicyKind::kRandom: return "random";
    case CameraPolicyKind::kGreedy3: return "greedy3";
    case CameraPolicyKind::kBandit: return "bandit";
  }
  return "?";
}

inline const char* to_string(ServerPolicyKind k) {
  switch (k) {
    case ServerPolicyKind::kQLearning: return "qlearning";
    case ServerPolicyKind::kAdaptiveQ: return "adaptive_q";
    case ServerPolicyKind::kRoundRobin: return "round_robin";
    case ServerPolicyKind::kLatencyGreedy: return "latency_greedy";
  }
  return "?";
}

/// Row labels used in rendered tables.
inline const char* display_name(CameraPolicyKind k) {
  switch (k) {
    case CameraPolicyKind::kQLearning: return "Q-learning";
    case CameraPolicyKind::kAdaptiveQ: return "Adaptive Q-learning";
    case CameraPolicyKind::kRandom: return "Random";
    case CameraPolicyKind::kGreedy3: return "Greedy-3";
    case CameraPolicyKind::kBandit: return "Epsilon-Greedy Bandit";
  }
  return "?";
}

inline const char* display_name(ServerPolicyKind k) {
  switch (k) {
    case ServerPolicyKind::kQLearning: return "Q-Learning";
    case ServerPolicyKind::kAdaptiveQ: return "Adaptive Q-Learning";
    case ServerPolicyKind::kRoundRobin: return "Round-Robin";
    case ServerPolicyKind::kLatencyGreedy: return "Latency-Greedy";
  }
  return "?";
}

inline CameraPolicyKind parse_camera_policy(const std::string& s) {
  for (auto k : kAllCameraPolicies)
    if (s == to_string(k)) return k;
  throw ConfigError("camera_policy", "unknown policy '" + s +
                                         "' (qlearning|adaptive_q|random|greedy3|bandit)");
}

inline ServerPolicyKind parse_server_policy(const std::string& s) {
  for (auto k : kAllServerPolicies)
    if (s == to_string(k)) return k;
  throw ConfigError("server_policy", "unknown policy '" + s +
                                         "' (qlearning|adaptive_q|round_robin|latency_greedy)");
}

struct QualityConfig {
  QualityModel::Mode mode = QualityModel::Mode::kSynthetic;
  double noise_sd = 40.0;
  QualityTableShape shape;
  /// Per-mask overrides of the generated base table, keyed by bitstring.
  std::map<std::string, double> base_overrides;
  std::string trace_path;
};

struct ExperimentConfig {
  std::string id;
  int n_frames = 4000;
  int n_cameras = 5;
  int n_servers = 4;
  int k_min = 2;
  int k_max = 5;
  Thresholds thresholds;
  RewardWeights weights;
  CameraPolicyKind camera_policy = CameraPolicyKind::kQLearning;
  ServerPolicyKind server_policy = ServerPolicyKind::kRoundRobin;
  AgentParams camera_q{.alpha = 0.9, .gamma = 0.1, .epsilon = 0.1};
  AgentParams camera_adaptive{.alpha = 0.5, .gamma = 0.1, .epsilon = 1.0, .adaptive = true};
  AgentParams server_q{.alpha = 0.9, .gamma = 0.1, .epsilon = 0.1};
  AgentParams server_adaptive{.alpha = 0.3, .gamma = 0.95, .epsilon = 0.2, .adaptive = true};
  double bandit_epsilon = 0.1;
  double ewma_beta = 0.3;
  DisruptionParams disruption;
  /// When both are set, traces are loaded instead of generated.
  std::string cameras_trace_path;
  std::string servers_trace_path;
  QualityConfig quality;
  LatencyModel latency;
  std::uint64_t seed = 1;
  /// Seed for traces and quality noise. Defaults to `seed`; grids keep it
  /// fixed across episodes so every policy faces the same world.
  std::optional<std::uint64_t> trace_seed;
  int feedback_delay_frames = 0;
  int initial_server = 0;

  std::uint64_t world_seed() const { return trace_seed.value_or(seed); }

  void validate() const {
    if (n_frames <= 0) throw ConfigError("n_frames", "must be > 0");
    if (n_servers <= 0) throw ConfigError("n_servers", "must be > 0");
    if (feedback_delay_frames < 0) throw ConfigError("feedback_delay_frames", "must be >= 0");
    if (initial_server < 0 || initial_server >= n_servers)
      throw ConfigError("initial_server", "must lie in [0, n_servers)");
    ActionSpace(n_cameras, k_min, k_max);
    thresholds.validate();
    weights.validate();
    camera_q.validate("camera_q");
    camera_adaptive.validate("camera_adaptive");
    server_q.validate("server_q");
    server_adaptive.validate("server_adaptive");
    if (!(bandit_epsilon >= 0.0 && bandit_epsilon <= 1.0))
      throw ConfigError("bandit_epsilon", "must lie in [0, 1]");
    if (!(ewma_beta > 0.0 && ewma_beta <= 1.0)) throw ConfigError("ewma_beta", "must lie in (0, 1]");
    if (cameras_trace_path.empty() != servers_trace_path.empty())
      throw ConfigError("traces", "set both cameras and servers paths or neither");
    if (cameras_trace_path.empty()) {
      DisruptionParams p = disruption;
      p.n_frames = n_frames;
      p.n_cameras = n_cameras;
      p.n_servers = n_servers;
      p.validate();
    }
    latency.validate(n_servers);
  }
};

struct FrameRecord {
  int frame = 0;
  CameraMask mask;
  int server = 0;
  FrameOutcome outcome;
  RewardPair rewards;
  double camera_epsilon = std::numeric_limits<double>::quiet_NaN();
  double camera_alpha = std::numeric_limits<double>::quiet_NaN();
  double server_epsilon = std::numeric_limits<double>::quiet_NaN();
  double server_alpha = std::numeric_limits<double>::quiet_NaN();
  /// Loop step at which each agent consumed this frame's feedback, -1 if never.
  int camera_learn_step = -1;
  int server_learn_step = -1;
};

// ---------------------------------------------------------------------------
// Policy adapters

class CameraSelector {
public:
  virtual ~CameraSelector() = default;
  virtual CameraMask select(int frame, Rng& rng) = 0;
  virtual void learn(const CameraMask& mask, const FrameOutcome& outcome, double reward) = 0;
  virtual double epsilon() const { return std::numeric_limits<double>::quiet_NaN(); }
  virtual double alpha() const { return std::numeric_limits<double>::quiet_NaN(); }
  virtual const QTable* table() const { return nullptr; }
};

class ServerSelector {
public:
  virtual ~ServerSelector() = default;
  virtual int select(int frame, const ServerState& state, Rng& rng) = 0;
  virtual void learn(const ServerState& s, int server, const FrameOutcome& outcome, double reward,
                     const ServerState& next) = 0;
  virtual double epsilon() const { return std::numeric_limits<double>::quiet_NaN(); }
  virtual double alpha() const { return std::numeric_limits<double>::quiet_NaN(); }
  virtual const QTable* table() const { return nullptr; }
};

namespace detail {

class QCameraSelector final : public CameraSelector {
public:
  QCameraSelector(const ActionSpace& space, const AgentParams& p) : agent_(space, p) {}
  CameraMask select(int, Rng& rng) override { return agent_.select(rng); }
  void learn(const CameraMask& m, const FrameOutcome&, double r) override { agent_.learn(m, r); }
  double epsilon() const override { return agent_.params().epsilon; }
  double alpha() const override { return agent_.params().alpha; }
  const QTable* table() const override { return &agent_.table(); }

private:
  CameraQAgent agent_;
};

class RandomCameraSelector final : public CameraSelector {
public:
  explicit RandomCameraSelector(ActionSpace space) : space_(std::move(space)) {}
  CameraMask select(int, Rng& rng) override { return baseline_random(space_, rng); }
  void learn(const CameraMask&, const FrameOutcome&, double) override {}

private:
  ActionSpace space_;
};

class Greedy3Selector final : public CameraSelector {
public:
  explicit Greedy3Selector(const ActionSpace& space) : policy_(space) {}
  CameraMask select(int, Rng&) override { return policy_.select(); }
  void learn(const CameraMask& m, const FrameOutcome& o, double) override { policy_.observe(m, o.quality); }

private:
  Greedy3Policy policy_;
};

class BanditSelector final : public CameraSelector {
public:
  BanditSelector(const ActionSpace& space, double eps) : policy_(space, eps) {}
  CameraMask select(int, Rng& rng) override { return policy_.select(rng); }
  void learn(const CameraMask& m, const FrameOutcome&, double r) override { policy_.learn(m, r); }
  double epsilon() const override { return policy_.epsilon(); }

private:
  BanditPolicy policy_;
};

class QServerSelector final : public ServerSelector {
public:
  QServerSelector(int m, const AgentParams& p) : agent_(m, p) {}
  int select(int, const ServerState& s, Rng& rng) override { return agent_.select(s, rng); }
  void learn(const ServerState& s, int a, const FrameOutcome&, double r, const ServerState& n) override {
    agent_.learn(s, a, r, n);
  }
  double epsilon() const override { return agent_.params().epsilon; }
  double alpha() const override { return agent_.params().alpha; }
  const QTable* table() const override { return &agent_.table(); }

private:
  ServerQAgent agent_;
};

class RoundRobinSelector final : public ServerSelector {
public:
  explicit RoundRobinSelector(int m) : m_(m) {}
  int select(int frame, const ServerState&, Rng&) override { return baseline_round_robin(frame, m_); }
  void learn(const ServerState&, int, const FrameOutcome&, double, const ServerState&) override {}

private:
  int m_;
};

class LatencyGreedySelector final : public ServerSelector {
public:
  LatencyGreedySelector(int m, double beta) : policy_(m, beta) {}
  int select(int, const ServerState&, Rng&) override { return policy_.select(); }
  void learn(const ServerState&, int a, const FrameOutcome& o, double, const ServerState&) override {
    policy_.observe(a, o.total_latency_s);
  }

private:
  LatencyGreedyPolicy policy_;
};

}  // namespace detail

inline std::unique_ptr<CameraSelector> make_camera_selector(const ExperimentConfig& cfg,
                                                            const ActionSpace& space) {
  switch (cfg.camera_policy) {
    case CameraPolicyKind::kQLearning: return std::make_unique<detail::QCameraSelector>(space, cfg.camera_q);
    case CameraPolicyKind::kAdaptiveQ: {
      AgentParams p = cfg.camera_adaptive;
      p.adaptive = true;
      return std::make_unique<detail::QCameraSelector>(space, p);
    }
    case CameraPolicyKind::kRandom: return std::make_unique<detail::RandomCameraSelector>(space);
    case CameraPolicyKind::kGreedy3: return std::make_unique<detail::Greedy3Selector>(space);
    case CameraPolicyKind::kBandit: return std::make_unique<detail::BanditSelector>(space, cfg.bandit_epsilon);
  }
  throw ConfigError("camera_policy", "unhandled policy");
}

inline std::unique_ptr<ServerSelector> make_server_selector(const ExperimentConfig& cfg) {
  switch (cfg.server_policy) {
    case ServerPolicyKind::kQLearning: return std::make_unique<detail::QServerSelector>(cfg.n_servers, cfg.server_q);
    case ServerPolicyKind::kAdaptiveQ: {
      AgentParams p = cfg.server_adaptive;
      p.adaptive = true;
      return std::make_unique<detail::QServerSelector>(cfg.n_servers, p);
    }
    case ServerPolicyKind::kRoundRobin: return std::make_unique<detail::RoundRobinSelector>(cfg.n_servers);
    case ServerPolicyKind::kLatencyGreedy:
      return std::make_unique<detail::LatencyGreedySelector>(cfg.n_servers, cfg.ewma_beta);
  }
  throw ConfigError("server_policy", "unhandled policy");
}

// ---------------------------------------------------------------------------
// World construction

/// Generated or loaded traces for `cfg`, checked against its dimensions.
inline DisruptionTraces build_traces(const ExperimentConfig& cfg) {
  DisruptionTraces traces;
  if (!cfg.cameras_trace_path.empty()) {
    traces = load_traces(cfg.cameras_trace_path, cfg.servers_trace_path);
  } else {
    DisruptionParams p = cfg.disruption;
    p.n_frames = cfg.n_frames;
    p.n_cameras = cfg.n_cameras;
    p.n_servers = cfg.n_servers;
    p.seed = cfg.world_seed();
    traces = generate_traces(p);
  }
  if (traces.cameras.frames < cfg.n_frames)
    throw ConfigError("n_frames", "traces hold " + std::to_string(traces.cameras.frames) +
                                      " frames, fewer than the " + std::to_string(cfg.n_frames) + " requested");
  if (traces.cameras.n_cameras != cfg.n_cameras)
    throw ConfigError("n_cameras", "camera trace has " + std::to_string(traces.cameras.n_cameras) + " columns");
  if (traces.servers.n_servers != cfg.n_servers)
    throw ConfigError("n_servers", "server trace has " + std::to_string(traces.servers.n_servers) + " columns");
  return traces;
}

inline QualityModel build_quality(const ExperimentConfig& cfg) {
  const auto& q = cfg.quality;
  if (q.mode == QualityModel::Mode::kTrace) {
    if (q.trace_path.empty()) throw ConfigError("quality.path", "trace mode needs a path");
    return load_quality_trace(q.trace_path, cfg.n_cameras, cfg.k_max);
  }
  auto table = default_quality_table(cfg.n_cameras, q.shape);
  for (const auto& [bits, v] : q.base_overrides) {
    const auto m = CameraMask::from_string(bits);
    if (m.size() != cfg.n_cameras)
      throw ConfigError("quality.base", "mask '" + bits + "' does not have n_cameras bits");
    table[m] = v;
  }
  return QualityModel::synthetic(std::move(table), q.noise_sd);
}

inline Environment build_environment(const ExperimentConfig& cfg) {
  return Environment(build_traces(cfg), build_quality(cfg), cfg.latency, cfg.thresholds, cfg.k_min,
                     cfg.k_max, quality_noise(cfg.world_seed(), cfg.n_frames));
}

// ---------------------------------------------------------------------------
// Episode

struct EpisodeResult {
  RunStats stats;
  std::vector<FrameRecord> records;
  nlohmann::json camera_qtable;  ///< null unless the camera policy is tabular
  nlohmann::json server_qtable;
};

/// Runs one episode against a prepared environment. Each frame: the camera
/// policy picks a mask; the server policy sees (|mask|, previous server) and
/// picks a server; the environment produces the outcome. Feedback for frame f
/// reaches the camera policy at the end of step f + delay, and reaches the
/// server policy once that has happened and the next state s_{f+1} exists.
inline EpisodeResult run_episode(const ExperimentConfig& cfg, const Environment& env) {
  cfg.validate();
  if (env.frames() < cfg.n_frames) throw ConfigError("n_frames", "environment shorter than n_frames");
  const ActionSpace space(cfg.n_cameras, cfg.k_min, cfg.k_max);
  auto camera = make_camera_selector(cfg, space);
  auto server = make_server_selector(cfg);
  Rng camera_rng = make_rng(cfg.seed, Stream::kCameraPolicy);
  Rng server_rng = make_rng(cfg.seed, Stream::kServerPolicy);

  EpisodeResult res;
  auto& records = res.records;
  records.reserve(static_cast<std::size_t>(cfg.n_frames));
  std::vector<ServerState> states;
  states.reserve(static_cast<std::size_t>(cfg.n_frames));
  std::deque<int> server_pending;  // frames whose feedback arrived, waiting on s_{f+1}

  auto flush_server = [&](int step) {
    while (!server_pending.empty()) {
      const int f = server_pending.front();
      if (static_cast<std::size_t>(f) + 1 >= states.size()) break;
      auto& r = records[static_cast<std::size_t>(f)];
      server->learn(states[static_cast<std::size_t>(f)], r.server, r.outcome, r.rewards.server,
                    states[static_cast<std::size_t>(f) + 1]);
      r.server_learn_step = step;
      server_pending.pop_front();
    }
  };

  ServerBacklog backlog(cfg.n_servers);
  int prev_server = cfg.initial_server;
  for (int t = 0; t < cfg.n_frames; ++t) {
    FrameRecord rec;
    rec.frame = t;
    rec.camera_epsilon = camera->epsilon();
    rec.camera_alpha = camera->alpha();
    rec.mask = camera->select(t, camera_rng);
    if (!space.admits(rec.mask)) throw ContractViolation("camera policy emitted an invalid mask");

    const ServerState state{rec.mask.count(), prev_server};
    states.push_back(state);
    flush_server(t);

    rec.server_epsilon = server->epsilon();
    rec.server_alpha = server->alpha();
    rec.server = server->select(t, state, server_rng);
    if (rec.server < 0 || rec.server >= cfg.n_servers)
      throw ContractViolation("server policy emitted an invalid server id");

    rec.outcome = env.step(t, rec.mask, rec.server, backlog);
    rec.rewards = {camera_reward(rec.outcome, cfg.thresholds, cfg.weights),
                   server_reward(rec.outcome, cfg.thresholds)};
    accumulate(res.stats, rec.outcome, rec.mask, rec.server, rec.rewards);
    records.push_back(rec);

    const int f = t - cfg.feedback_delay_frames;
    if (f >= 0) {
      auto& fr = records[static_cast<std::size_t>(f)];
      camera->learn(fr.mask, fr.outcome, fr.rewards.camera);
      fr.camera_learn_step = t;
      server_pending.push_back(f);
      flush_server(t);
    }
    prev_server = rec.server;
  }

  if (const QTable* q = camera->table()) res.camera_qtable = q->to_json();
  if (const QTable* q = server->table()) res.server_qtable = q->to_json();
  return res;
}

inline EpisodeResult run_episode(const ExperimentConfig& cfg) {
  cfg.validate();
  return run_episode(cfg, build_environment(cfg));
}

// ---------------------------------------------------------------------------
// Grid

struct GridResult {
  std::string id;
  std::optional<RunStats> stats;
  std::string error;  ///< non-empty when the episode failed
};

/// Runs every config as an independent episode. Episode i uses policy seed
/// `seed + i`; the trace seed stays at the config's own value so that all
/// episodes of one grid face identical traces. Failures are reported per id.
inline std::vector<GridResult> run_grid(const std::vector<ExperimentConfig>& configs,
                                        unsigned threads = 1) {
  auto run_one = [&](std::size_t i) {
    GridResult r;
    ExperimentConfig cfg = configs[i];
    r.id = cfg.id.empty() ? std::to_string(i) : cfg.id;
    try {
      cfg.trace_seed = cfg.world_seed();
      cfg.seed = cfg.seed + i;
      r.stats = run_episode(cfg).stats;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    return r;
  };

  std::vector<GridResult> out(configs.size());
  if (threads <= 1) {
    for (std::size_t i = 0; i < configs.size(); ++i) out[i] = run_one(i);
    return out;
  }
  for (std::size_t begin = 0; begin < configs.size(); begin += threads) {
    std::vector<std::future<GridResult>> batch;
    const std::size_t end = std::min(configs.size(), begin + threads);
    for (std::size_t i = begin; i < end; ++i) batch.push_back(std::async(std::launch::async, run_one, i));
    for (std::size_t i = begin; i < end; ++i) out[i] = batch[i - begin].get();
  }
  return out;
}

}  // namespace edgerecon
