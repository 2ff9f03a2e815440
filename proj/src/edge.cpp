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

#include "edgesim/edge.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace edgesim {

namespace {
// A head entry whose residue falls below this share of its size is
// complete; guards against float dust from repeated share subtraction.
constexpr double kResidueRel = 1e-9;
}  // namespace

EdgeNode::EdgeNode(int index, int num_devices, double cpu_hz, double busy_power_w,
                   double idle_power_w, double slot_seconds)
    : index_(index),
      num_devices_(num_devices),
      cpu_hz_(cpu_hz),
      busy_power_w_(busy_power_w),
      idle_power_w_(idle_power_w),
      slot_seconds_(slot_seconds),
      queues_(num_devices) {
  if (num_devices < 1) throw std::invalid_argument("edge node needs >= 1 device");
  if (cpu_hz <= 0.0) throw std::invalid_argument("edge cpu_hz must be positive");
  if (slot_seconds <= 0.0) throw std::invalid_argument("slot_seconds must be positive");
}

void EdgeNode::deliver(const Task& task, int enqueue_slot) {
  if (task.device < 0 || task.device >= num_devices_)
    throw std::out_of_range("deliver: device index out of range");
  if (enqueue_slot <= last_stepped_slot())
    throw std::logic_error("deliver: slot already processed");
  EdgeQueueEntry entry;
  entry.task = task;
  entry.remaining_bits = task.size_bits;
  entry.enqueue_slot = enqueue_slot;
  // Stable insert keyed by visibility slot so admission stays FIFO even if
  // callers hand over future arrivals out of order.
  auto pos = pending_.end();
  while (pos != pending_.begin() && std::prev(pos)->first > enqueue_slot) --pos;
  pending_.insert(pos, {enqueue_slot, entry});
}

double EdgeNode::queue_backlog(int device) const {
  double sum = 0.0;
  for (const EdgeQueueEntry& e : queues_[device]) sum += e.remaining_bits;
  return sum;
}

double EdgeNode::backlog_bits(int device) const {
  if (device < 0 || device >= num_devices_)
    throw std::out_of_range("backlog_bits: device index out of range");
  return queue_backlog(device);
}

int EdgeNode::load_at(int slot) const {
  if (slot < 1 || slot > last_stepped_slot()) return 0;
  return loads_[slot - 1];
}

std::vector<int> EdgeNode::recent_loads(int slot, int count) const {
  std::vector<int> out(count, 0);
  for (int k = 0; k < count; ++k) out[k] = load_at(slot - count + 1 + k);
  return out;
}

std::vector<EdgeOutcome> EdgeNode::step(int slot) {
  if (slot != last_stepped_slot() + 1)
    throw std::logic_error("step: slots must be processed in order");

  std::vector<EdgeOutcome> out;
  std::vector<double> backlog_before(num_devices_);
  std::vector<double> arrived(num_devices_, 0.0);
  std::vector<double> dropped(num_devices_, 0.0);
  std::vector<double> served(num_devices_, 0.0);
  std::vector<double> served_cycles(num_devices_, 0.0);

  for (int i = 0; i < num_devices_; ++i) backlog_before[i] = queue_backlog(i);

  // Admit arrivals that become visible this slot.
  while (!pending_.empty() && pending_.front().first <= slot) {
    auto [when, entry] = pending_.front();
    pending_.pop_front();
    arrived[entry.task.device] += entry.task.size_bits;
    queues_[entry.task.device].push_back(entry);
  }

  auto finalize = [&](const EdgeQueueEntry& e, bool completed) {
    EdgeOutcome o;
    o.task = e.task;
    o.completed = completed;
    o.enqueue_slot = e.enqueue_slot;
    o.start_slot = e.start_slot;
    o.finish_slot = slot;
    o.service_slots = e.service_slots;
    o.busy_energy_j = e.busy_energy_j;
    o.idle_energy_j = idle_energy_j(e.service_slots, idle_power_w_, slot_seconds_);
    o.dropped_bits = completed ? 0.0 : e.remaining_bits;
    out.push_back(o);
  };

  // Deadline dominance: an entry that can no longer meet its deadline gets
  // no service. Entries admitted before this slot always have
  // deadline >= slot (they survived the previous end-of-slot sweep), so
  // this only catches tasks delivered too late.
  for (int i = 0; i < num_devices_; ++i) {
    auto& q = queues_[i];
    for (auto it = q.begin(); it != q.end();) {
      if (it->task.deadline_slot < slot) {
        dropped[i] += it->remaining_bits;
        finalize(*it, false);
        it = q.erase(it);
      } else {
        ++it;
      }
    }
  }

  // Active set: queues holding work once expired entries are gone. A task
  // swept on arrival must not draw a ghost share away from live queues.
  std::vector<bool> active(num_devices_, false);
  int load = 0;
  for (int i = 0; i < num_devices_; ++i) {
    active[i] = !queues_[i].empty();
    if (active[i]) ++load;
  }
  loads_.push_back(load);

  double share_cycles = load > 0 ? cpu_hz_ * slot_seconds_ / load : 0.0;

  // Serve the head of each active queue. Leftover allocation is not
  // forwarded to the next entry: a successor starts the slot after its
  // predecessor leaves, which is what makes completion slots obey the
  // cumulative-allocation test below.
  for (int i = 0; i < num_devices_; ++i) {
    if (!active[i] || queues_[i].empty()) continue;
    EdgeQueueEntry& head = queues_[i].front();
    if (head.start_slot == 0) head.start_slot = slot;
    double bits_capacity = share_cycles / head.task.density;
    double take = std::min(head.remaining_bits, bits_capacity);
    head.remaining_bits -= take;
    served[i] = take;
    served_cycles[i] = take * head.task.density;
    head.busy_energy_j += busy_power_w_ * slot_seconds_ / load;
    head.service_slots += 1;
    if (head.remaining_bits <= kResidueRel * head.task.size_bits) {
      served[i] += head.remaining_bits;
      served_cycles[i] += head.remaining_bits * head.task.density;
      head.remaining_bits = 0.0;
      finalize(head, true);
      queues_[i].pop_front();
    }
  }

  // End-of-slot deadline sweep.
  for (int i = 0; i < num_devices_; ++i) {
    auto& q = queues_[i];
    for (auto it = q.begin(); it != q.end();) {
      if (it->task.deadline_slot <= slot) {
        dropped[i] += it->remaining_bits;
        finalize(*it, false);
        it = q.erase(it);
      } else {
        ++it;
      }
    }
  }

  // Flow audit. Two layers: exact conservation of bits for every queue,
  // and the clamped backlog recursion against the full granted share
  // whenever the share was not left partly unused by a completion.
  double capacity_cycles = cpu_hz_ * slot_seconds_;
  double cycle_tol = 1e-9 * capacity_cycles;
  double total_served_cycles = 0.0;
  for (int i = 0; i < num_devices_; ++i) {
    total_served_cycles += served_cycles[i];
    double after = queue_backlog(i);
    double bit_tol = 1e-9 * std::max(1.0, backlog_before[i] + arrived[i]);
    double balance = backlog_before[i] + arrived[i] - served[i] - dropped[i];
    if (std::abs(after - balance) > bit_tol)
      throw std::logic_error("edge queue flow imbalance, device " + std::to_string(i));
    if (active[i] && served_cycles[i] + cycle_tol < share_cycles &&
        !queues_[i].empty()) {
      // Head finished mid-slot with a successor behind it: the unused
      // remainder of the share is forfeited by design, so the clamped
      // recursion against the full share does not apply this slot.
    } else {
      double share_bits = 0.0;
      if (active[i]) {
        double density = served[i] > 0.0 ? served_cycles[i] / served[i]
                                         : (queues_[i].empty()
                                                ? 0.0
                                                : queues_[i].front().task.density);
        share_bits = density > 0.0 ? share_cycles / density : served[i];
      }
      double expect = std::max(0.0, backlog_before[i] + arrived[i] - share_bits -
                                        dropped[i]);
      if (std::abs(after - expect) > bit_tol)
        throw std::logic_error("edge backlog recursion violated, device " +
                               std::to_string(i));
    }
    if (flow_log_enabled_) {
      QueueFlowRecord rec;
      rec.slot = slot;
      rec.device = i;
      rec.active = active[i];
      rec.active_count = load;
      rec.backlog_before = backlog_before[i];
      rec.arrived = arrived[i];
      rec.share_cycles = active[i] ? share_cycles : 0.0;
      rec.served = served[i];
      rec.dropped = dropped[i];
      rec.backlog_after = after;
      flow_log_.push_back(rec);
    }
  }
  if (total_served_cycles > capacity_cycles + cycle_tol)
    throw std::logic_error("edge served beyond per-slot capacity");

  return out;
}

void EdgeNode::reset() {
  for (auto& q : queues_) q.clear();
  pending_.clear();
  loads_.clear();
  flow_log_.clear();
}

double edge_processing_slots_estimate(double size_bits, double density, int load,
                                      double cpu_hz, double slot_seconds) {
  if (load < 1) load = 1;
  return size_bits * density * load / (cpu_hz * slot_seconds);
}

double offload_energy_total(double tx_energy_j, double busy_energy_j,
                            double idle_energy) {
  return tx_energy_j + busy_energy_j + idle_energy;
}

double idle_energy_j(int service_slots, double idle_power_w, double slot_seconds) {
  return service_slots * idle_power_w * slot_seconds;
}

}  // namespace edgesim
