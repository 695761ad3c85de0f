#pragma once

// Tabular Q-learning with epsilon-greedy exploration, the adaptive
// learning-rate/exploration schedule, and the two cooperative agents.

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "edgerecon/action_space.hpp"
#include "edgerecon/error.hpp"
#include "edgerecon/rng.hpp"

namespace edgerecon {

/// Map (state-key, action) -> value. Absent entries read as exactly 0.
class QTable {
public:
  QTable() = default;
  explicit QTable(std::size_t n_actions) : n_actions_(n_actions) {}

  std::size_t n_actions() const { return n_actions_; }

  double get(const std::string& state, std::size_t action) const {
    auto it = rows_.find(state);
    return it == rows_.end() ? 0.0 : it->second[action];
  }

  /// Copy of the row; all zeros for an unseen state.
  std::vector<double> row(const std::string& state) const {
    auto it = rows_.find(state);
    return it == rows_.end() ? std::vector<double>(n_actions_, 0.0) : it->second;
  }

  double max(const std::string& state) const {
    auto it = rows_.find(state);
    if (it == rows_.end()) return 0.0;
    return *std::max_element(it->second.begin(), it->second.end());
  }

  void set(const std::string& state, std::size_t action, double value) {
    auto [it, inserted] = rows_.try_emplace(state, n_actions_, 0.0);
    it->second[action] = value;
  }

  std::size_t n_states() const { return rows_.size(); }

  nlohmann::json to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : rows_) j[k] = v;
    return j;
  }

  static QTable from_json(const nlohmann::json& j, std::size_t n_actions) {
    if (!j.is_object()) throw ConfigError("qtable", "snapshot must be a JSON object");
    QTable t(n_actions);
    for (const auto& [k, v] : j.items()) {
      if (!v.is_array() || v.size() != n_actions)
        throw ConfigError("qtable." + k, "expected an array of " + std::to_string(n_actions) + " numbers");
      std::vector<double> row;
      for (const auto& x : v) {
        if (!x.is_number()) throw ConfigError("qtable." + k, "non-numeric entry");
        row.push_back(x.get<double>());
      }
      t.rows_[k] = std::move(row);
    }
    return t;
  }

  friend bool operator==(const QTable&, const QTable&) = default;

private:
  std::size_t n_actions_ = 0;
  std::map<std::string, std::vector<double>> rows_;
};

/// Index of the largest value; ties go to the lowest index.
inline std::size_t argmax_first(std::span<const double> values) {
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

/// Random index with probability epsilon, otherwise argmax (lowest index on ties).
inline std::size_t epsilon_greedy(std::span<const double> q_values, double epsilon, Rng& rng) {
  detail::require(!q_values.empty(), "epsilon_greedy: empty value list");
  if (uniform01(rng) < epsilon) return uniform_index(rng, q_values.size());
  return argmax_first(q_values);
}

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))
inline void q_update(QTable& table, const std::string& s, std::size_t a, double r,
                     const std::string& s_next, double alpha, double gamma) {
  detail::require(std::isfinite(r), "q_update: reward must be finite");
  const double q = table.get(s, a);
  const double target = r + gamma * table.max(s_next);
  table.set(s, a, q + alpha * (target - q));
}

struct AgentParams {
  double alpha = 0.9;
  double gamma = 0.1;
  double epsilon = 0.1;
  bool adaptive = false;
  double eta_inc = 1.5;
  double eta_dec = 0.995;
  double lambda_inc = 1.5;
  double lambda_dec = 0.995;
  double eps_min = 0.05;
  double eps_max = 1.0;
  double alpha_min = 0.05;
  double alpha_max = 0.9;
  int degradation_window = 20;
  double degradation_drop = 0.1;

  void validate(const std::string& prefix) const {
    auto fail = [&](const char* f, const char* w) { throw ConfigError(prefix + "." + f, w); };
    if (!(alpha > 0.0 && alpha <= 1.0)) fail("alpha", "must lie in (0, 1]");
    if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma", "must lie in [0, 1)");
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) fail("epsilon", "must lie in [0, 1]");
    if (!adaptive) return;
    if (!(eta_inc > 1.0)) fail("eta_inc", "must be > 1");
    if (!(eta_dec < 1.0 && eta_dec > 0.0)) fail("eta_dec", "must lie in (0, 1)");
    if (!(lambda_inc > 1.0)) fail("lambda_inc", "must be > 1");
    if (!(lambda_dec < 1.0 && lambda_dec > 0.0)) fail("lambda_dec", "must lie in (0, 1)");
    if (!(eps_min >= 0.0 && eps_min <= eps_max && eps_max <= 1.0))
      fail("eps_min", "need 0 <= eps_min <= eps_max <= 1");
    if (!(alpha_min > 0.0 && alpha_min <= alpha_max && alpha_max <= 1.0))
      fail("alpha_min", "need 0 < alpha_min <= alpha_max <= 1");
    if (degradation_window < 1) fail("degradation_window", "must be >= 1");
    if (!(degradation_drop >= 0.0)) fail("degradation_drop", "must be >= 0");
  }
};

/// Two-window test: mean reward over the last `window` entries is lower than
/// the mean over the `window` before it by more than `drop`.
inline bool degradation_detected(std::span<const double> history, int window, double drop) {
  const auto w = static_cast<std::size_t>(window);
  if (history.size() < 2 * w) return false;
  const auto recent = history.subspan(history.size() - w, w);
  const auto previous = history.subspan(history.size() - 2 * w, w);
  const double m_recent = std::accumulate(recent.begin(), recent.end(), 0.0) / static_cast<double>(w);
  const double m_prev = std::accumulate(previous.begin(), previous.end(), 0.0) / static_cast<double>(w);
  return m_prev - m_recent > drop;
}

/// Raises epsilon/alpha on degradation, decays them otherwise, clamped to the
/// configured bounds. Returns whether degradation was detected.
inline bool adapt_params(AgentParams& p, std::span<const double> reward_history) {
  const bool degraded = degradation_detected(reward_history, p.degradation_window, p.degradation_drop);
  if (degraded) {
    p.epsilon = std::min(p.epsilon * p.eta_inc, p.eps_max);
    p.alpha = std::min(p.alpha * p.lambda_inc, p.alpha_max);
  } else {
    p.epsilon = std::max(p.epsilon * p.eta_dec, p.eps_min);
    p.alpha = std::max(p.alpha * p.lambda_dec, p.alpha_min);
  }
  return degraded;
}

namespace detail {

/// Bounded reward history feeding adapt_params.
class RewardWindow {
public:
  void push(double r, int window) {
    buf_.push_back(r);
    const auto cap = 2 * static_cast<std::size_t>(window);
    while (buf_.size() > cap) buf_.erase(buf_.begin());
  }
  std::span<const double> view() const { return buf_; }
  void clear() { buf_.clear(); }

private:
  std::vector<double> buf_;
};

}  // namespace detail

/// Camera-subset agent over a single abstract state, so the bootstrap term is
/// gamma * max_a Q(a).
class CameraQAgent {
public:
  static constexpr const char* kState = "stateless";

  CameraQAgent(ActionSpace space, AgentParams params)
      : space_(std::move(space)), params_(params), table_(space_.size()) {
    params_.validate("camera_agent");
  }

  std::size_t select_index(Rng& rng) {
    selected_ = true;
    const auto q = table_.row(kState);
    return epsilon_greedy(q, params_.epsilon, rng);
  }

  CameraMask select(Rng& rng) { return space_[select_index(rng)]; }

  void learn(const CameraMask& action, double reward) {
    if (!selected_) throw ContractViolation("camera agent: learn called before any select");
    q_update(table_, kState, space_.index_of(action), reward, kState, params_.alpha, params_.gamma);
    if (params_.adaptive) {
      history_.push(reward, params_.degradation_window);
      if (adapt_params(params_, history_.view())) history_.clear();
    }
  }

  const ActionSpace& space() const { return space_; }
  const AgentParams& params() const { return params_; }
  const QTable& table() const { return table_; }
  QTable& table() { return table_; }

private:
  ActionSpace space_;
  AgentParams params_;
  QTable table_;
  detail::RewardWindow history_;
  bool selected_ = false;
};

/// (cameras selected now, server chosen at the previous frame)
struct ServerState {
  int n_selected = 0;
  int prev_server = 0;

  std::string key() const {
    return "n=" + std::to_string(n_selected) + ",prev=" + std::to_string(prev_server);
  }
  friend bool operator==(const ServerState&, const ServerState&) = default;
};

class ServerQAgent {
public:
  ServerQAgent(int n_servers, AgentParams params)
      : n_servers_(n_servers), params_(params), table_(static_cast<std::size_t>(n_servers)) {
    if (n_servers < 1) throw ConfigError("n_servers", "must be > 0");
    params_.validate("server_agent");
  }

  int select(const ServerState& s, Rng& rng) {
    check(s);
    selected_ = true;
    const auto q = table_.row(s.key());
    return static_cast<int>(epsilon_greedy(q, params_.epsilon, rng));
  }

  void learn(const ServerState& s, int action, double reward, const ServerState& next) {
    if (!selected_) throw ContractViolation("server agent: learn called before any select");
    check(s);
    check(next);
    if (action < 0 || action >= n_servers_) throw BoundsError("server agent: action out of range");
    q_update(table_, s.key(), static_cast<std::size_t>(action), reward, next.key(), params_.alpha,
             params_.gamma);
    if (params_.adaptive) {
      history_.push(reward, params_.degradation_window);
      if (adapt_params(params_, history_.view())) history_.clear();
    }
  }

  int n_servers() const { return n_servers_; }
  const AgentParams& params() const { return params_; }
  const QTable& table() const { return table_; }
  QTable& table() { return table_; }

private:
  void check(const ServerState& s) const {
    if (s.prev_server < 0 || s.prev_server >= n_servers_)
      throw ContractViolation("server state: prev_server out of range");
    if (s.n_selected < 0) throw ContractViolation("server state: negative camera count");
  }

  int n_servers_;
  AgentParams params_;
  QTable table_;
  detail::RewardWindow history_;
  bool selected_ = false;
};

}  // namespace edgerecon
