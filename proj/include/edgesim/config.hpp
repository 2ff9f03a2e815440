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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace edgesim {

// Learner hyper-parameters. Defaults train in minutes on one desktop core.
struct AgentConfig {
  int history_steps = 5;     // broadcast history rows fed to the recurrent encoder
  int lstm_hidden = 64;
  int dense1_units = 128;
  int dense2_units = 64;
  int batch_size = 16;
  double learning_rate = 1e-3;
  double rmsprop_decay = 0.95;
  double rmsprop_epsilon = 1e-6;
  double gamma = 0.9;
  double eps_start = 1.0;
  double eps_final = 0.01;
  // Fraction of the training episodes over which epsilon anneals linearly;
  // it stays at eps_final afterwards.
  double eps_decay_fraction = 0.8;
  std::size_t replay_capacity = 10000;
  int replace_threshold = 100;  // trainer steps between target-network syncs
  // One network for all devices instead of one per device. Cheaper to
  // train; off by default to keep learners fully decentralized.
  bool share_network = false;
};

// Full scenario description. Defaults are the desk-scale profile: small
// enough that training plus evaluation of every policy finishes well under
// half an hour on a single core.
struct SimConfig {
  int num_devices = 10;
  int num_edges = 3;
  int num_slots = 100;          // slots per episode
  double slot_seconds = 0.1;
  double arrival_rate = 30.0;   // system-wide tasks per second
  double task_size_min_bits = 1.0e6;
  double task_size_max_bits = 7.0e6;
  std::vector<double> task_densities{197.0, 297.0, 397.0};  // cycles per bit
  int deadline_slots = 10;
  std::vector<double> battery_levels{0.25, 0.5, 0.75};
  double device_cpu_hz = 2.6e9;
  double edge_cpu_hz = 4.28e10;
  double uplink_bps = 1.4e7;
  double edge_power_w = 5.0;
  double tx_power_w = 2.3;
  double idle_power_w = 0.1;
  double completion_reward = 1.0;
  int num_episodes = 300;
  int eval_episodes = 50;
  std::uint64_t seed = 1;
  AgentConfig agent;
};

// Per-device, per-slot arrival probability.
double arrival_probability(const SimConfig& cfg);

// Scenario sized like the reference large-scale deployment. Training it
// takes hours, so it sits behind an explicit flag in the CLI.
SimConfig paper_scale_config();

// Throws std::invalid_argument naming the offending field.
void validate(const SimConfig& cfg);

// Parses a JSON file whose keys mirror the struct fields (agent settings
// nested under "agent"). Unknown keys are an error. Missing keys keep their
// defaults.
SimConfig load_config_file(const std::string& path);
SimConfig parse_config_json(const std::string& text);

// Stable textual form used for hashing and provenance layers in output.
std::string canonical_string(const SimConfig& cfg);

// FNV-1a over the canonical form with the seed field blanked, as hex.
// Runs differing only in seed share a fingerprint.
std::string config_fingerprint(const SimConfig& cfg);

}  // namespace edgesim
