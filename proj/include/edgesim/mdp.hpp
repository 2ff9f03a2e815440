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

#include <string>
#include <vector>

#include "edgesim/config.hpp"
#include "edgesim/task.hpp"

namespace edgesim {

// Everything a device can see when deciding where a task runs. Values are
// raw (bits, slots, counts); the learner normalizes on encode.
struct StateVector {
  double task_size_bits = 0.0;            // 0 when no task arrived
  double wait_comp_slots = 0.0;
  double wait_trans_slots = 0.0;
  std::vector<double> edge_backlog_bits;  // one entry per edge node
  double battery = 0.0;
  // history_steps x num_edges broadcast loads, row-major, oldest row
  // first; the last row is the previous slot. Slots before the episode
  // read as zero.
  std::vector<double> history;

  int num_edges() const { return static_cast<int>(edge_backlog_bits.size()); }
  int history_steps() const {
    return edge_backlog_bits.empty()
               ? 0
               : static_cast<int>(history.size() / edge_backlog_bits.size());
  }

  std::vector<double> flatten() const;
  static StateVector unflatten(const std::vector<double>& flat, int num_edges,
                               int history_steps);
  static int flat_size(int num_edges, int history_steps) {
    return 4 + num_edges + history_steps * num_edges;
  }
};

// Decision: code 0 runs the task locally, code k in [1, J] sends it to
// edge node k-1.
struct Action {
  int code = 0;
  bool is_local() const { return code == 0; }
  int edge_index() const { return code - 1; }
};

enum class Outcome { kCompleted, kDropped };

// Scaling constants that make the delay/energy combination dimensionless.
struct CostParams {
  double deadline_slots = 10.0;
  double energy_ref_j = 17.576;   // worst-case local burn inside one deadline
  double completion_reward = 1.0;
};
CostParams make_cost_params(const SimConfig& cfg);

// Delay in slots as experienced by the user; dropped tasks report 0.
double task_delay(Outcome outcome, int decision_slot, int finalize_slot);

// Weighted normalized combination of delay and energy. The battery level
// weighs delay; its complement weighs energy.
double task_cost(double delay_slots, double energy_j, double battery,
                 const CostParams& cp);

// Per-task satisfaction: reward minus cost on completion, a pure energy
// penalty on a drop.
double qoe(Outcome outcome, double cost, double energy_j, const CostParams& cp);

struct QoERecord {
  long task_id = 0;
  Outcome outcome = Outcome::kCompleted;
  int decision_slot = 0;
  int finalize_slot = 0;
  double delay_slots = 0.0;
  double energy_j = 0.0;
  double cost = 0.0;
  double qoe = 0.0;
};

QoERecord make_qoe_record(const Task& task, Outcome outcome, int finalize_slot,
                          double energy_j, double battery, const CostParams& cp);

// Decision waiting for its outcome. One per in-flight decided task.
struct PendingTask {
  long task_id = 0;
  int device = 0;
  int decision_slot = 0;
  int action = 0;
  std::vector<double> state;  // flattened StateVector at the decision slot
};

// Training tuple, emitted exactly once per decided task at finalization.
struct Experience {
  long task_id = 0;
  std::vector<double> state;
  int action = 0;
  double q = 0.0;
  std::vector<double> next_state;
  bool terminal = false;  // finalized in the last slot of an episode
};

std::string serialize_experience(const Experience& e);

// Discounted episode return; qoe_by_slot[k] belongs to slot k+1.
double discounted_return(const std::vector<double>& qoe_by_slot, double gamma);

}  // namespace edgesim
