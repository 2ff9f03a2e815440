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

#include <deque>
#include <vector>

#include "edgesim/task.hpp"

namespace edgesim {

// One offloaded task sitting in an edge queue.
struct EdgeQueueEntry {
  Task task;
  double remaining_bits = 0.0;
  int enqueue_slot = 0;      // first slot the scheduler can see it
  int start_slot = 0;        // first slot it received service; 0 = none yet
  int service_slots = 0;     // slots in which it held a processor share
  double busy_energy_j = 0.0;
};

// Finalization record returned by EdgeNode::step.
struct EdgeOutcome {
  Task task;
  bool completed = false;
  int enqueue_slot = 0;
  int start_slot = 0;        // 0 when dropped before any service
  int finish_slot = 0;
  int service_slots = 0;
  double busy_energy_j = 0.0;
  double idle_energy_j = 0.0;
  double dropped_bits = 0.0;  // unfinished work, 0 for completed tasks
};

// Per-queue account of one scheduling slot. Kept for flow-conservation
// audits and tests; all quantities in bits except the granted share.
struct QueueFlowRecord {
  int slot = 0;
  int device = 0;
  bool active = false;
  int active_count = 0;          // B at this slot
  double backlog_before = 0.0;   // end of previous slot
  double arrived = 0.0;
  double share_cycles = 0.0;     // granted allocation, 0 when inactive
  double served = 0.0;           // bits drained from the head entry
  double dropped = 0.0;          // bits expired this slot
  double backlog_after = 0.0;
};

// Edge node with one FIFO queue per device and an equal-share processor
// split across active queues each slot. Only the head entry of a queue is
// in service during a slot; a successor starts no earlier than the next
// slot, so a share larger than the head's residue is partly wasted.
class EdgeNode {
 public:
  EdgeNode(int index, int num_devices, double cpu_hz, double busy_power_w,
           double idle_power_w, double slot_seconds);

  // Hands over an uplinked task, visible to the scheduler from
  // `enqueue_slot` on. Must not be called for slots already stepped.
  void deliver(const Task& task, int enqueue_slot);

  // Runs slot `slot` (strictly increasing across calls): admits arrivals,
  // splits capacity over active queues, serves heads, expires deadlines.
  // Throws std::logic_error if the flow bookkeeping fails to balance.
  std::vector<EdgeOutcome> step(int slot);

  // Load broadcast B_j for a past slot; 0 for slots not yet run.
  int load_at(int slot) const;
  // Last `count` loads ending at `slot`, zero-padded before slot 1.
  std::vector<int> recent_loads(int slot, int count) const;

  double backlog_bits(int device) const;  // end of the last stepped slot
  int index() const { return index_; }
  int last_stepped_slot() const { return static_cast<int>(loads_.size()); }

  const std::vector<QueueFlowRecord>& flow_log() const { return flow_log_; }
  void set_flow_log_enabled(bool on) { flow_log_enabled_ = on; }

  void reset();

 private:
  int index_;
  int num_devices_;
  double cpu_hz_;
  double busy_power_w_;
  double idle_power_w_;
  double slot_seconds_;
  std::vector<std::deque<EdgeQueueEntry>> queues_;
  std::deque<std::pair<int, EdgeQueueEntry>> pending_;  // keyed by enqueue slot
  std::vector<int> loads_;                              // loads_[t-1] = B(t)
  std::vector<QueueFlowRecord> flow_log_;
  bool flow_log_enabled_ = false;

  double queue_backlog(int device) const;
};

// Reference service-time estimate for an offloaded task against a load
// snapshot B; the scheduler's step function is authoritative.
double edge_processing_slots_estimate(double size_bits, double density,
                                      int load, double cpu_hz,
                                      double slot_seconds);

// Overall offload energy: uplink radio energy plus the accrued processor
// share plus standby draw over the slots the task was in service.
double offload_energy_total(double tx_energy_j, double busy_energy_j,
                            double idle_energy_j);
double idle_energy_j(int service_slots, double idle_power_w, double slot_seconds);

}  // namespace edgesim
