#pragma once

// JSON experiment files. Every key is optional and falls back to the
// ExperimentConfig default; unknown keys and wrong types are rejected with
// the dotted path of the offending field.

#include <algorithm>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "edgerecon/controller.hpp"

namespace edgerecon {

namespace detail {

using nlohmann::json;

class JsonReader {
public:
  JsonReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  const json* find(const std::string& key) {
    seen_.push_back(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (auto* v = find(key)) {
      if (!v->is_number()) throw ConfigError(field(key), "expected a number");
      out = v->get<double>();
    }
  }

  void integer(const std::string& key, int& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_integer()) throw ConfigError(field(key), "expected an integer");
      out = v->get<int>();
    }
  }

  void seed(const std::string& key, std::uint64_t& out) {
    if (auto* v = find(key)) {
      if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
        throw ConfigError(field(key), "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(field(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (auto* v = find(key)) {
      if (!v->is_array()) throw ConfigError(field(key), "expected an array of numbers");
      out.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) throw ConfigError(field(key), "expected an array of numbers");
        out.push_back(x.get<double>());
      }
    }
  }

  /// Throws on any key that no reader asked for.
  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (std::find(seen_.begin(), seen_.end(), k) == seen_.end())
        throw ConfigError(field(k), "unknown key");
  }

private:
  const json& j_;
  std::string path_;
  std::vector<std::string> seen_;
};

inline void read_agent(JsonReader& parent, const std::string& key, AgentParams& p) {
  const json* v = parent.find(key);
  if (!v) return;
  JsonReader r(*v, parent.field(key));
  r.number("alpha", p.alpha);
  r.number("gamma", p.gamma);
  r.number("epsilon", p.epsilon);
  r.number("eta_inc", p.eta_inc);
  r.number("eta_dec", p.eta_dec);
  r.number("lambda_inc", p.lambda_inc);
  r.number("lambda_dec", p.lambda_dec);
  r.number("eps_min", p.eps_min);
  r.number("eps_max", p.eps_max);
  r.number("alpha_min", p.alpha_min);
  r.number("alpha_max", p.alpha_max);
  r.integer("degradation_window", p.degradation_window);
  r.number("degradation_drop", p.degradation_drop);
  r.finish();
}

inline json write_agent(const AgentParams& p) {
  json j = {{"alpha", p.alpha}, {"gamma", p.gamma}, {"epsilon", p.epsilon}};
  if (p.adaptive) {
    j["eta_inc"] = p.eta_inc;
    j["eta_dec"] = p.eta_dec;
    j["lambda_inc"] = p.lambda_inc;
    j["lambda_dec"] = p.lambda_dec;
    j["eps_min"] = p.eps_min;
    j["eps_max"] = p.eps_max;
    j["alpha_min"] = p.alpha_min;
    j["alpha_max"] = p.alpha_max;
    j["degradation_window"] = p.degradation_window;
    j["degradation_drop"] = p.degradation_drop;
  }
  return j;
}

}  // namespace detail

/// Builds a config from parsed JSON on top of the defaults.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  using detail::JsonReader;
  ExperimentConfig c;
  JsonReader r(j, "");
  r.string("id", c.id);
  r.integer("n_frames", c.n_frames);
  r.integer("n_cameras", c.n_cameras);
  r.integer("n_servers", c.n_servers);
  r.integer("k_min", c.k_min);
  r.integer("k_max", c.k_max);
  r.seed("seed", c.seed);
  if (r.find("trace_seed")) {
    std::uint64_t ts = 0;
    r.seed("trace_seed", ts);
    c.trace_seed = ts;
  }
  r.integer("feedback_delay_frames", c.feedback_delay_frames);
  r.integer("initial_server", c.initial_server);
  r.number("bandit_epsilon", c.bandit_epsilon);
  r.number("ewma_beta", c.ewma_beta);

  std::string policy;
  if (r.find("camera_policy")) {
    r.string("camera_policy", policy);
    c.camera_policy = parse_camera_policy(policy);
  }
  if (r.find("server_policy")) {
    r.string("server_policy", policy);
    c.server_policy = parse_server_policy(policy);
  }

  if (const auto* v = r.find("thresholds")) {
    JsonReader t(*v, "thresholds");
    t.number("theta", c.thresholds.theta);
    t.number("phi_total_s", c.thresholds.phi_total_s);
    t.number("phi_recon_s", c.thresholds.phi_recon_s);
    t.finish();
  }
  if (const auto* v = r.find("weights")) {
    JsonReader w(*v, "weights");
    w.number("w1", c.weights.w1);
    w.number("w2", c.weights.w2);
    w.finish();
  }

  detail::read_agent(r, "camera_q", c.camera_q);
  detail::read_agent(r, "camera_adaptive", c.camera_adaptive);
  detail::read_agent(r, "server_q", c.server_q);
  detail::read_agent(r, "server_adaptive", c.server_adaptive);

  if (const auto* v = r.find("disruption")) {
    JsonReader d(*v, "disruption");
    auto& p = c.disruption;
    if (const auto* g = d.find("correlation_groups")) {
      const std::string f = d.field("correlation_groups");
      if (!g->is_array()) throw ConfigError(f, "expected an array of arrays of camera ids");
      p.correlation_groups.clear();
      for (const auto& grp : *g) {
        if (!grp.is_array()) throw ConfigError(f, "expected an array of arrays of camera ids");
        std::vector<int> ids;
        for (const auto& id : grp) {
          if (!id.is_number_integer()) throw ConfigError(f, "camera ids must be integers");
          ids.push_back(id.get<int>());
        }
        p.correlation_groups.push_back(std::move(ids));
      }
    }
    d.integer("n_bump_events", p.n_bump_events);
    d.number("mean_bump_len", p.mean_bump_len);
    d.number("baseline_prob", p.baseline_prob);
    d.number("bump_prob", p.bump_prob);
    d.number("disruption_threshold", p.disruption_threshold);
    d.number("server_baseline_ms", p.server_baseline_ms);
    d.number("server_jitter_ms", p.server_jitter_ms);
    d.integer("n_spike_events", p.n_spike_events);
    d.number("spike_min_ms", p.spike_min_ms);
    d.number("spike_max_ms", p.spike_max_ms);
    d.number("mean_spike_len", p.mean_spike_len);
    d.finish();
  }

  if (const auto* v = r.find("traces")) {
    JsonReader t(*v, "traces");
    t.string("cameras", c.cameras_trace_path);
    t.string("servers", c.servers_trace_path);
    t.finish();
  }

  if (const auto* v = r.find("quality")) {
    JsonReader q(*v, "quality");
    std::string mode = "synthetic";
    q.string("mode", mode);
    if (mode == "synthetic") c.quality.mode = QualityModel::Mode::kSynthetic;
    else if (mode == "trace") c.quality.mode = QualityModel::Mode::kTrace;
    else throw ConfigError("quality.mode", "expected 'synthetic' or 'trace'");
    q.number("noise_sd", c.quality.noise_sd);
    q.string("path", c.quality.trace_path);
    if (const auto* s = q.find("shape")) {
      JsonReader sh(*s, "quality.shape");
      sh.number("full", c.quality.shape.full);
      sh.number("per_missing", c.quality.shape.per_missing);
      sh.number("two_view_penalty", c.quality.shape.two_view_penalty);
      sh.number("spread", c.quality.shape.spread);
      sh.finish();
    }
    if (const auto* b = q.find("base")) {
      if (!b->is_object()) throw ConfigError("quality.base", "expected an object of mask -> quality");
      for (const auto& [mask, val] : b->items()) {
        if (!val.is_number()) throw ConfigError("quality.base." + mask, "expected a number");
        c.quality.base_overrides[mask] = val.get<double>();
      }
    }
    q.finish();
  }

  if (const auto* v = r.find("latency")) {
    JsonReader l(*v, "latency");
    l.number("per_image_tx_ms", c.latency.per_image_tx_ms);
    l.number("recon_base_ms", c.latency.recon_base_ms);
    l.number("recon_per_image_ms", c.latency.recon_per_image_ms);
    l.numbers("server_speed_factor", c.latency.server_speed_factor);
    l.number("frame_interval_ms", c.latency.frame_interval_ms);
    l.finish();
  }

  r.finish();
  c.validate();
  return c;
}

/// Full serialization; config_from_json(config_to_json(c)) reproduces c.
inline nlohmann::json config_to_json(const ExperimentConfig& c) {
  using nlohmann::json;
  json j;
  j["id"] = c.id;
  j["n_frames"] = c.n_frames;
  j["n_cameras"] = c.n_cameras;
  j["n_servers"] = c.n_servers;
  j["k_min"] = c.k_min;
  j["k_max"] = c.k_max;
  j["seed"] = c.seed;
  if (c.trace_seed) j["trace_seed"] = *c.trace_seed;
  j["feedback_delay_frames"] = c.feedback_delay_frames;
  j["initial_server"] = c.initial_server;
  j["camera_policy"] = to_string(c.camera_policy);
  j["server_policy"] = to_string(c.server_policy);
  j["bandit_epsilon"] = c.bandit_epsilon;
  j["ewma_beta"] = c.ewma_beta;
  j["thresholds"] = {{"theta", c.thresholds.theta},
                     {"phi_total_s", c.thresholds.phi_total_s},
                     {"phi_recon_s", c.thresholds.phi_recon_s}};
  j["weights"] = {{"w1", c.weights.w1}, {"w2", c.weights.w2}};
  j["camera_q"] = detail::write_agent(c.camera_q);
  j["camera_adaptive"] = detail::write_agent(c.camera_adaptive);
  j["server_q"] = detail::write_agent(c.server_q);
  j["server_adaptive"] = detail::write_agent(c.server_adaptive);
  const auto& p = c.disruption;
  j["disruption"] = {{"correlation_groups", p.correlation_groups},
                     {"n_bump_events", p.n_bump_events},
                     {"mean_bump_len", p.mean_bump_len},
                     {"baseline_prob", p.baseline_prob},
                     {"bump_prob", p.bump_prob},
                     {"disruption_threshold", p.disruption_threshold},
                     {"server_baseline_ms", p.server_baseline_ms},
                     {"server_jitter_ms", p.server_jitter_ms},
                     {"n_spike_events", p.n_spike_events},
                     {"spike_min_ms", p.spike_min_ms},
                     {"spike_max_ms", p.spike_max_ms},
                     {"mean_spike_len", p.mean_spike_len}};
  if (!c.cameras_trace_path.empty())
    j["traces"] = {{"cameras", c.cameras_trace_path}, {"servers", c.servers_trace_path}};
  json q = {{"mode", c.quality.mode == QualityModel::Mode::kTrace ? "trace" : "synthetic"},
            {"noise_sd", c.quality.noise_sd},
            {"shape",
             {{"full", c.quality.shape.full},
              {"per_missing", c.quality.shape.per_missing},
              {"two_view_penalty", c.quality.shape.two_view_penalty},
              {"spread", c.quality.shape.spread}}}};
  if (!c.quality.trace_path.empty()) q["path"] = c.quality.trace_path;
  if (!c.quality.base_overrides.empty()) q["base"] = c.quality.base_overrides;
  j["quality"] = std::move(q);
  j["latency"] = {{"per_image_tx_ms", c.latency.per_image_tx_ms},
                  {"recon_base_ms", c.latency.recon_base_ms},
                  {"recon_per_image_ms", c.latency.recon_per_image_ms},
                  {"server_speed_factor", c.latency.server_speed_factor},
                  {"frame_interval_ms", c.latency.frame_interval_ms}};
  return j;
}

/// Reads and validates a config file. Syntax errors surface as ConfigError
/// with field "<file>".
inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("<file>", path + ": " + e.what());
  }
  return config_from_json(j);
}

inline void save_config(const ExperimentConfig& c, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("<file>", "cannot write config file " + path);
  out << config_to_json(c).dump(2) << "\n";
}

/// Default scenario for comparing camera policies: the stock config with
/// Round-Robin serving.
inline ExperimentConfig camera_axis_scenario() {
  ExperimentConfig c;
  c.id = "camera-axis";
  c.server_policy = ServerPolicyKind::kRoundRobin;
  return c;
}

/// Scenario for comparing server policies: a stricter quality bar of 500,
/// frames arrive every 500 ms so servers queue, server 4 runs 1.5x slower
/// than the rest, and latency spikes recur twice as often as in the default.
/// Cameras follow Greedy-3 so that only the server choice varies.
inline ExperimentConfig server_axis_scenario() {
  ExperimentConfig c;
  c.id = "server-axis";
  c.thresholds.theta = 500.0;
  c.camera_policy = CameraPolicyKind::kGreedy3;
  c.latency.frame_interval_ms = 500.0;
  c.latency.server_speed_factor = {1.0, 1.0, 1.0, 1.5};
  c.disruption.n_spike_events = 20;
  return c;
}

}  // namespace edgerecon
