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

#include <functional>
#include <unordered_map>
#include <vector>

#include "edgesim/config.hpp"
#include "edgesim/device.hpp"
#include "edgesim/edge.hpp"
#include "edgesim/mdp.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

struct SlotReport {
  int slot = 0;
  int arrivals = 0;
  int finalized = 0;
  int completed = 0;
  int dropped = 0;
  double energy_j = 0.0;
  double qoe_sum = 0.0;
};

struct EpisodeMetrics {
  int episode = 0;
  long arrivals = 0;
  long completed = 0;
  long dropped = 0;
  long in_system = 0;   // decided but not finalized when the episode ended
  long finalized = 0;
  double energy_j = 0.0;       // finalized tasks only
  double qoe_sum = 0.0;
  double delay_sum_slots = 0.0;  // completed tasks only
  long experiences = 0;
  double mean_discounted_return = 0.0;  // averaged over devices
};

struct DeviceExperience {
  int device = 0;
  Experience experience;
};

// Discrete-time scenario: devices draw tasks, a policy routes each to the
// local CPU or an edge node, queues evolve, finalizations produce QoE and
// training experiences. Deterministic given (config, seed).
class World {
 public:
  explicit World(const SimConfig& cfg);

  using DecideFn = std::function<Action(int device, const StateVector& state)>;

  void begin_episode(int episode_index);

  // Runs the next slot. Order: per device arrival draw, state observation,
  // experience emission for last slot's finalizations, decision and queue
  // admission; then device-side finish events; then edge scheduling; then
  // QoE accounting. Experiences are appended to *experiences when given.
  SlotReport advance_slot(const DecideFn& decide,
                          std::vector<DeviceExperience>* experiences = nullptr);

  // Emits terminal experiences for tasks finalized in the last slot and
  // closes the books. Throws std::logic_error if task conservation fails.
  std::vector<DeviceExperience> end_episode();

  EpisodeMetrics episode_metrics() const { return metrics_; }

  // State a device would see this slot if `task_size_bits` arrived.
  StateVector observe_state(int device, double task_size_bits = 0.0) const;

  // Decision slots of this device's tasks that finalized exactly at `slot`.
  std::vector<int> completion_set(int device, int slot) const;

  const SimConfig& config() const { return cfg_; }
  const CostParams& cost_params() const { return cost_; }
  int current_slot() const { return current_slot_; }
  const MobileDevice& device(int i) const { return devices_.at(i); }
  const EdgeNode& edge(int j) const { return edges_.at(j); }
  EdgeNode& mutable_edge(int j) { return edges_.at(j); }
  long experiences_emitted() const { return experiences_emitted_; }
  long tasks_spawned() const { return next_task_id_; }

 private:
  struct InFlightTask {
    Task task;
    int action_code = 0;
    std::vector<double> state_flat;
    bool local = true;
    int target_edge = -1;
    double service_slots = 0.0;  // time on the CPU or the radio
    int wait_slots = 0;
    bool completes = false;      // device-side plan outcome
    int finish_slot = 0;
    double tx_energy_j = 0.0;
  };

  struct PendingEmission {
    int device = 0;
    long task_id = 0;
    int action = 0;
    double qoe = 0.0;
    std::vector<double> state_flat;
  };

  void finalize_task(InFlightTask& f, Outcome outcome, int finalize_slot,
                     double energy_j, SlotReport& report);
  void assign_local(InFlightTask& f, int slot);
  void assign_edge(InFlightTask& f, int slot);

  SimConfig cfg_;
  CostParams cost_;
  std::vector<MobileDevice> devices_;
  std::vector<EdgeNode> edges_;
  std::vector<RngStream> arrival_rng_;
  std::vector<RngStream> battery_rng_;

  int episode_index_ = -1;
  int current_slot_ = 1;  // next slot to run
  bool episode_open_ = false;

  std::unordered_map<long, InFlightTask> inflight_;
  std::vector<std::vector<long>> comp_events_;   // [slot] -> task ids
  std::vector<std::vector<long>> trans_events_;
  std::vector<PendingEmission> awaiting_next_state_;
  std::vector<std::vector<double>> qoe_by_slot_;            // [device][slot-1]
  std::vector<std::vector<std::pair<int, int>>> completion_log_;  // (decision, finalize)

  EpisodeMetrics metrics_;
  long next_task_id_ = 0;
  long experiences_emitted_ = 0;
};

}  // namespace edgesim
