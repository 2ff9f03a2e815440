// Copyright 2026 The edgesim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "edgesim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace edgesim {
namespace {

using nlohmann::json;

void fail(const std::string& what) { throw std::invalid_argument(what); }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out + "]";
}

}  // namespace

double arrival_probability(const SimConfig& cfg) {
  return cfg.arrival_rate * cfg.slot_seconds / cfg.num_devices;
}

SimConfig paper_scale_config() {
  SimConfig cfg;
  cfg.num_devices = 50;
  cfg.num_edges = 5;
  cfg.arrival_rate = 150.0;
  cfg.num_episodes = 1000;
  cfg.eval_episodes = 50;
  return cfg;
}

void validate(const SimConfig& cfg) {
  if (cfg.num_devices < 1) fail("num_devices must be >= 1");
  if (cfg.num_edges < 1) fail("num_edges must be >= 1");
  if (cfg.num_slots < 1) fail("num_slots must be >= 1");
  if (cfg.slot_seconds <= 0.0) fail("slot_seconds must be positive");
  if (cfg.arrival_rate < 0.0) fail("arrival_rate must be non-negative");
  double p = arrival_probability(cfg);
  if (p > 1.0)
    fail("arrival_rate " + fmt(cfg.arrival_rate) +
         " yields per-device slot probability " + fmt(p) + " > 1");
  if (cfg.task_size_min_bits <= 0.0) fail("task_size_min_bits must be positive");
  if (cfg.task_size_max_bits < cfg.task_size_min_bits)
    fail("task_size_max_bits must be >= task_size_min_bits");
  if (cfg.task_densities.empty()) fail("task_densities must be non-empty");
  for (double d : cfg.task_densities)
    if (d <= 0.0) fail("task densities must be positive");
  if (cfg.deadline_slots < 1) fail("deadline_slots must be >= 1");
  if (cfg.battery_levels.empty()) fail("battery_levels must be non-empty");
  for (double b : cfg.battery_levels)
    if (b < 0.0 || b > 1.0) fail("battery levels must lie in [0, 1]");
  if (cfg.device_cpu_hz <= 0.0) fail("device_cpu_hz must be positive");
  if (cfg.edge_cpu_hz <= 0.0) fail("edge_cpu_hz must be positive");
  if (cfg.uplink_bps <= 0.0) fail("uplink_bps must be positive");
  if (cfg.edge_power_w < 0.0) fail("edge_power_w must be non-negative");
  if (cfg.tx_power_w < 0.0) fail("tx_power_w must be non-negative");
  if (cfg.idle_power_w < 0.0) fail("idle_power_w must be non-negative");
  if (cfg.completion_reward <= 0.0) fail("completion_reward must be positive");
  if (cfg.num_episodes < 1) fail("num_episodes must be >= 1");
  if (cfg.eval_episodes < 1) fail("eval_episodes must be >= 1");

  const AgentConfig& a = cfg.agent;
  if (a.history_steps < 1) fail("agent.history_steps must be >= 1");
  if (a.lstm_hidden < 1) fail("agent.lstm_hidden must be >= 1");
  if (a.dense1_units < 1) fail("agent.dense1_units must be >= 1");
  if (a.dense2_units < 1) fail("agent.dense2_units must be >= 1");
  if (a.batch_size < 1) fail("agent.batch_size must be >= 1");
  if (a.learning_rate <= 0.0) fail("agent.learning_rate must be positive");
  if (a.rmsprop_decay <= 0.0 || a.rmsprop_decay >= 1.0)
    fail("agent.rmsprop_decay must lie in (0, 1)");
  if (a.rmsprop_epsilon <= 0.0) fail("agent.rmsprop_epsilon must be positive");
  if (a.gamma < 0.0 || a.gamma > 1.0) fail("agent.gamma must lie in [0, 1]");
  if (a.eps_start < 0.0 || a.eps_start > 1.0) fail("agent.eps_start must lie in [0, 1]");
  if (a.eps_final < 0.0 || a.eps_final > a.eps_start)
    fail("agent.eps_final must lie in [0, eps_start]");
  if (a.eps_decay_fraction <= 0.0 || a.eps_decay_fraction > 1.0)
    fail("agent.eps_decay_fraction must lie in (0, 1]");
  if (a.replay_capacity < static_cast<std::size_t>(a.batch_size))
    fail("agent.replay_capacity must be >= batch_size");
  if (a.replace_threshold < 1) fail("agent.replace_threshold must be >= 1");
}

namespace {

template <typename T>
void read_field(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void apply_agent(const json& j, AgentConfig& a) {
  static const char* known[] = {
      "history_steps",  "lstm_hidden",     "dense1_units",
      "dense2_units",   "batch_size",      "learning_rate",
      "rmsprop_decay",  "rmsprop_epsilon", "gamma",
      "eps_start",      "eps_final",       "eps_decay_fraction",
      "replay_capacity", "replace_threshold", "share_network"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail("unknown config key agent." + it.key());
  }
  read_field(j, "history_steps", a.history_steps);
  read_field(j, "lstm_hidden", a.lstm_hidden);
  read_field(j, "dense1_units", a.dense1_units);
  read_field(j, "dense2_units", a.dense2_units);
  read_field(j, "batch_size", a.batch_size);
  read_field(j, "learning_rate", a.learning_rate);
  read_field(j, "rmsprop_decay", a.rmsprop_decay);
  read_field(j, "rmsprop_epsilon", a.rmsprop_epsilon);
  read_field(j, "gamma", a.gamma);
  read_field(j, "eps_start", a.eps_start);
  read_field(j, "eps_final", a.eps_final);
  read_field(j, "eps_decay_fraction", a.eps_decay_fraction);
  read_field(j, "replay_capacity", a.replay_capacity);
  read_field(j, "replace_threshold", a.replace_threshold);
  read_field(j, "share_network", a.share_network);
}

}  // namespace

SimConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config root must be a JSON object");

  static const char* known[] = {
      "num_devices",    "num_edges",         "num_slots",
      "slot_seconds",   "arrival_rate",      "task_size_min_bits",
      "task_size_max_bits", "task_densities", "deadline_slots",
      "battery_levels", "device_cpu_hz",     "edge_cpu_hz",
      "uplink_bps",     "edge_power_w",      "tx_power_w",
      "idle_power_w",   "completion_reward", "num_episodes",
      "eval_episodes",  "seed",              "agent"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) fail("unknown config key " + it.key());
  }

  SimConfig cfg;
  read_field(j, "num_devices", cfg.num_devices);
  read_field(j, "num_edges", cfg.num_edges);
  read_field(j, "num_slots", cfg.num_slots);
  read_field(j, "slot_seconds", cfg.slot_seconds);
  read_field(j, "arrival_rate", cfg.arrival_rate);
  read_field(j, "task_size_min_bits", cfg.task_size_min_bits);
  read_field(j, "task_size_max_bits", cfg.task_size_max_bits);
  read_field(j, "task_densities", cfg.task_densities);
  read_field(j, "deadline_slots", cfg.deadline_slots);
  read_field(j, "battery_levels", cfg.battery_levels);
  read_field(j, "device_cpu_hz", cfg.device_cpu_hz);
  read_field(j, "edge_cpu_hz", cfg.edge_cpu_hz);
  read_field(j, "uplink_bps", cfg.uplink_bps);
  read_field(j, "edge_power_w", cfg.edge_power_w);
  read_field(j, "tx_power_w", cfg.tx_power_w);
  read_field(j, "idle_power_w", cfg.idle_power_w);
  read_field(j, "completion_reward", cfg.completion_reward);
  read_field(j, "num_episodes", cfg.num_episodes);
  read_field(j, "eval_episodes", cfg.eval_episodes);
  read_field(j, "seed", cfg.seed);
  if (j.contains("agent")) {
    if (!j.at("agent").is_object()) fail("agent must be a JSON object");
    apply_agent(j.at("agent"), cfg.agent);
  }
  validate(cfg);
  return cfg;
}

SimConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string canonical_string(const SimConfig& cfg) {
  std::ostringstream out;
  out << "num_devices=" << cfg.num_devices << '\n'
      << "num_edges=" << cfg.num_edges << '\n'
      << "num_slots=" << cfg.num_slots << '\n'
      << "slot_seconds=" << fmt(cfg.slot_seconds) << '\n'
      << "arrival_rate=" << fmt(cfg.arrival_rate) << '\n'
      << "task_size_min_bits=" << fmt(cfg.task_size_min_bits) << '\n'
      << "task_size_max_bits=" << fmt(cfg.task_size_max_bits) << '\n'
      << "task_densities=" << fmt_list(cfg.task_densities) << '\n'
      << "deadline_slots=" << cfg.deadline_slots << '\n'
      << "battery_levels=" << fmt_list(cfg.battery_levels) << '\n'
      << "device_cpu_hz=" << fmt(cfg.device_cpu_hz) << '\n'
      << "edge_cpu_hz=" << fmt(cfg.edge_cpu_hz) << '\n'
      << "uplink_bps=" << fmt(cfg.uplink_bps) << '\n'
      << "edge_power_w=" << fmt(cfg.edge_power_w) << '\n'
      << "tx_power_w=" << fmt(cfg.tx_power_w) << '\n'
      << "idle_power_w=" << fmt(cfg.idle_power_w) << '\n'
      << "completion_reward=" << fmt(cfg.completion_reward) << '\n'
      << "num_episodes=" << cfg.num_episodes << '\n'
      << "eval_episodes=" << cfg.eval_episodes << '\n'
      << "seed=" << cfg.seed << '\n'
      << "agent.history_steps=" << cfg.agent.history_steps << '\n'
      << "agent.lstm_hidden=" << cfg.agent.lstm_hidden << '\n'
      << "agent.dense1_units=" << cfg.agent.dense1_units << '\n'
      << "agent.dense2_units=" << cfg.agent.dense2_units << '\n'
      << "agent.batch_size=" << cfg.agent.batch_size << '\n'
      << "agent.learning_rate=" << fmt(cfg.agent.learning_rate) << '\n'
      << "agent.rmsprop_decay=" << fmt(cfg.agent.rmsprop_decay) << '\n'
      << "agent.rmsprop_epsilon=" << fmt(cfg.agent.rmsprop_epsilon) << '\n'
      << "agent.gamma=" << fmt(cfg.agent.gamma) << '\n'
      << "agent.eps_start=" << fmt(cfg.agent.eps_start) << '\n'
      << "agent.eps_final=" << fmt(cfg.agent.eps_final) << '\n'
      << "agent.eps_decay_fraction=" << fmt(cfg.agent.eps_decay_fraction) << '\n'
      << "agent.replay_capacity=" << cfg.agent.replay_capacity << '\n'
      << "agent.replace_threshold=" << cfg.agent.replace_threshold << '\n'
      << "agent.share_network=" << (cfg.agent.share_network ? 1 : 0) << '\n';
  return out.str();
}

std::string config_fingerprint(const SimConfig& cfg) {
  SimConfig scrubbed = cfg;
  scrubbed.seed = 0;
  std::string text = canonical_string(scrubbed);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace edgesim
