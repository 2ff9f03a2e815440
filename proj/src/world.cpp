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

#include "edgesim/world.hpp"

#include <stdexcept>
#include <string>

namespace edgesim {

World::World(const SimConfig& cfg) : cfg_(cfg), cost_(make_cost_params(cfg)) {
  validate(cfg_);
  devices_.reserve(cfg_.num_devices);
  arrival_rng_.reserve(cfg_.num_devices);
  battery_rng_.reserve(cfg_.num_devices);
  for (int i = 0; i < cfg_.num_devices; ++i) {
    devices_.emplace_back(i, cfg_.device_cpu_hz);
    arrival_rng_.emplace_back(cfg_.seed, Stream::kArrival, i);
    battery_rng_.emplace_back(cfg_.seed, Stream::kBattery, i);
  }
  edges_.reserve(cfg_.num_edges);
  for (int j = 0; j < cfg_.num_edges; ++j)
    edges_.emplace_back(j, cfg_.num_devices, cfg_.edge_cpu_hz, cfg_.edge_power_w,
                        cfg_.idle_power_w, cfg_.slot_seconds);
}

void World::begin_episode(int episode_index) {
  if (episode_open_) throw std::logic_error("begin_episode: episode still open");
  episode_index_ = episode_index;
  episode_open_ = true;
  current_slot_ = 1;
  for (MobileDevice& d : devices_) {
    d.reset();
    std::size_t pick = battery_rng_[d.index()].uniform_index(cfg_.battery_levels.size());
    d.set_battery(cfg_.battery_levels[pick]);
  }
  for (EdgeNode& e : edges_) e.reset();
  inflight_.clear();
  comp_events_.assign(cfg_.num_slots + 2, {});
  trans_events_.assign(cfg_.num_slots + 2, {});
  awaiting_next_state_.clear();
  qoe_by_slot_.assign(cfg_.num_devices, std::vector<double>(cfg_.num_slots, 0.0));
  completion_log_.assign(cfg_.num_devices, {});
  metrics_ = EpisodeMetrics{};
  metrics_.episode = episode_index;
}

StateVector World::observe_state(int device, double task_size_bits) const {
  const MobileDevice& d = devices_.at(device);
  StateVector s;
  s.task_size_bits = task_size_bits;
  s.wait_comp_slots = d.computation_wait(current_slot_);
  s.wait_trans_slots = d.transmission_wait(current_slot_);
  s.edge_backlog_bits.resize(cfg_.num_edges);
  for (int j = 0; j < cfg_.num_edges; ++j)
    s.edge_backlog_bits[j] = edges_[j].backlog_bits(device);
  s.battery = d.battery();
  const int steps = cfg_.agent.history_steps;
  s.history.assign(static_cast<std::size_t>(steps) * cfg_.num_edges, 0.0);
  for (int r = 0; r < steps; ++r) {
    int slot = current_slot_ - steps + r;
    for (int j = 0; j < cfg_.num_edges; ++j)
      s.history[static_cast<std::size_t>(r) * cfg_.num_edges + j] =
          edges_[j].load_at(slot);
  }
  return s;
}

void World::assign_local(InFlightTask& f, int slot) {
  MobileDevice& d = devices_[f.task.device];
  f.local = true;
  f.wait_slots = d.computation_wait(slot);
  f.service_slots = local_processing_slots(f.task.size_bits, f.task.density,
                                           cfg_.device_cpu_hz, cfg_.slot_seconds);
  ServicePlan plan =
      plan_service(slot, f.wait_slots, f.service_slots, f.task.deadline_slot);
  f.completes = plan.completed;
  f.finish_slot = plan.finish_slot;
  d.admit_computation(plan.finish_slot);
  if (plan.finish_slot <= cfg_.num_slots)
    comp_events_[plan.finish_slot].push_back(f.task.id);
}

void World::assign_edge(InFlightTask& f, int slot) {
  MobileDevice& d = devices_[f.task.device];
  f.local = false;
  f.wait_slots = d.transmission_wait(slot);
  f.service_slots = transmission_slots(f.task.size_bits, cfg_.uplink_bps,
                                       cfg_.slot_seconds);
  ServicePlan plan =
      plan_service(slot, f.wait_slots, f.service_slots, f.task.deadline_slot);
  f.completes = plan.completed;
  f.finish_slot = plan.finish_slot;
  f.tx_energy_j = service_energy_j(
      capped_service_slots(f.service_slots, f.wait_slots, cfg_.deadline_slots),
      cfg_.tx_power_w, cfg_.slot_seconds);
  d.admit_transmission(plan.finish_slot);
  if (plan.finish_slot <= cfg_.num_slots)
    trans_events_[plan.finish_slot].push_back(f.task.id);
}

void World::finalize_task(InFlightTask& f, Outcome outcome, int finalize_slot,
                          double energy_j, SlotReport& report) {
  const MobileDevice& d = devices_[f.task.device];
  QoERecord rec =
      make_qoe_record(f.task, outcome, finalize_slot, energy_j, d.battery(), cost_);

  metrics_.finalized += 1;
  metrics_.energy_j += energy_j;
  metrics_.qoe_sum += rec.qoe;
  if (outcome == Outcome::kCompleted) {
    metrics_.completed += 1;
    metrics_.delay_sum_slots += rec.delay_slots;
  } else {
    metrics_.dropped += 1;
  }
  report.finalized += 1;
  report.energy_j += energy_j;
  report.qoe_sum += rec.qoe;
  if (outcome == Outcome::kCompleted) report.completed += 1; else report.dropped += 1;

  qoe_by_slot_[f.task.device][f.task.birth_slot - 1] += rec.qoe;
  completion_log_[f.task.device].push_back({f.task.birth_slot, finalize_slot});

  PendingEmission pe;
  pe.device = f.task.device;
  pe.task_id = f.task.id;
  pe.action = f.action_code;
  pe.qoe = rec.qoe;
  pe.state_flat = std::move(f.state_flat);
  awaiting_next_state_.push_back(std::move(pe));
}

SlotReport World::advance_slot(const DecideFn& decide,
                               std::vector<DeviceExperience>* experiences) {
  if (!episode_open_) throw std::logic_error("advance_slot: no open episode");
  if (current_slot_ > cfg_.num_slots)
    throw std::logic_error("advance_slot: episode already ran its slots");
  const int t = current_slot_;
  SlotReport report;
  report.slot = t;

  const double p_arrival = arrival_probability(cfg_);

  // Last slot's finalizations become experiences once the follow-up state
  // is observable, i.e. now.
  std::vector<PendingEmission> pending = std::move(awaiting_next_state_);
  awaiting_next_state_.clear();

  for (int i = 0; i < cfg_.num_devices; ++i) {
    RngStream& rng = arrival_rng_[i];
    bool arrived = rng.bernoulli(p_arrival);
    double size = 0.0, density = 0.0;
    if (arrived) {
      size = rng.uniform(cfg_.task_size_min_bits, cfg_.task_size_max_bits);
      density = cfg_.task_densities[rng.uniform_index(cfg_.task_densities.size())];
    }

    StateVector s = observe_state(i, size);
    std::vector<double> s_flat;
    bool s_flat_ready = false;
    for (PendingEmission& pe : pending) {
      if (pe.device != i) continue;
      if (!s_flat_ready) {
        s_flat = s.flatten();
        s_flat_ready = true;
      }
      Experience e;
      e.task_id = pe.task_id;
      e.state = std::move(pe.state_flat);
      e.action = pe.action;
      e.q = pe.qoe;
      e.next_state = s_flat;
      e.terminal = false;
      ++experiences_emitted_;
      ++metrics_.experiences;
      if (experiences) experiences->push_back({i, std::move(e)});
    }

    if (!arrived) continue;
    report.arrivals += 1;
    metrics_.arrivals += 1;

    Task task;
    task.id = next_task_id_++;
    task.device = i;
    task.birth_slot = t;
    task.size_bits = size;
    task.density = density;
    task.deadline_slot = t + cfg_.deadline_slots - 1;

    Action a = decide(i, s);
    if (a.code < 0 || a.code > cfg_.num_edges)
      throw std::invalid_argument("decision code " + std::to_string(a.code) +
                                  " out of range [0, " +
                                  std::to_string(cfg_.num_edges) + "]");

    InFlightTask f;
    f.task = task;
    f.action_code = a.code;
    f.state_flat = s.flatten();
    if (a.is_local()) {
      assign_local(f, t);
    } else {
      f.target_edge = a.edge_index();
      assign_edge(f, t);
    }
    inflight_.emplace(task.id, std::move(f));
  }

  // Device CPU finish events.
  for (long id : comp_events_[t]) {
    auto it = inflight_.find(id);
    if (it == inflight_.end()) throw std::logic_error("lost local task");
    InFlightTask& f = it->second;
    double burned = service_energy_j(
        capped_service_slots(f.service_slots, f.wait_slots, cfg_.deadline_slots),
        device_cpu_power_w(cfg_.device_cpu_hz), cfg_.slot_seconds);
    finalize_task(f, f.completes ? Outcome::kCompleted : Outcome::kDropped, t,
                  burned, report);
    inflight_.erase(it);
  }

  // Radio finish events: hand over to the edge or drop on the spot.
  for (long id : trans_events_[t]) {
    auto it = inflight_.find(id);
    if (it == inflight_.end()) throw std::logic_error("lost uplink task");
    InFlightTask& f = it->second;
    bool reaches_edge = f.completes && t + 1 <= f.task.deadline_slot;
    if (reaches_edge) {
      edges_[f.target_edge].deliver(f.task, t + 1);
    } else {
      finalize_task(f, Outcome::kDropped, t, f.tx_energy_j, report);
      inflight_.erase(it);
    }
  }

  // Edge scheduling; broadcast loads are recorded inside step().
  for (EdgeNode& e : edges_) {
    for (const EdgeOutcome& o : e.step(t)) {
      auto it = inflight_.find(o.task.id);
      if (it == inflight_.end()) throw std::logic_error("lost offloaded task");
      InFlightTask& f = it->second;
      double energy =
          offload_energy_total(f.tx_energy_j, o.busy_energy_j, o.idle_energy_j);
      finalize_task(f, o.completed ? Outcome::kCompleted : Outcome::kDropped, t,
                    energy, report);
      inflight_.erase(it);
    }
  }

  ++current_slot_;
  return report;
}

std::vector<DeviceExperience> World::end_episode() {
  if (!episode_open_) throw std::logic_error("end_episode: no open episode");
  if (current_slot_ <= cfg_.num_slots)
    throw std::logic_error("end_episode: episode has remaining slots");

  std::vector<DeviceExperience> out;
  const int flat =
      StateVector::flat_size(cfg_.num_edges, cfg_.agent.history_steps);
  for (PendingEmission& pe : awaiting_next_state_) {
    Experience e;
    e.task_id = pe.task_id;
    e.state = std::move(pe.state_flat);
    e.action = pe.action;
    e.q = pe.qoe;
    e.next_state.assign(flat, 0.0);
    e.terminal = true;
    ++experiences_emitted_;
    ++metrics_.experiences;
    out.push_back({pe.device, std::move(e)});
  }
  awaiting_next_state_.clear();

  metrics_.in_system = static_cast<long>(inflight_.size());
  if (metrics_.arrivals != metrics_.completed + metrics_.dropped + metrics_.in_system)
    throw std::logic_error("task conservation violated at episode end");

  double sum = 0.0;
  for (int i = 0; i < cfg_.num_devices; ++i)
    sum += discounted_return(qoe_by_slot_[i], cfg_.agent.gamma);
  metrics_.mean_discounted_return = sum / cfg_.num_devices;

  episode_open_ = false;
  return out;
}

std::vector<int> World::completion_set(int device, int slot) const {
  std::vector<int> out;
  for (const auto& [decision, finalize] : completion_log_.at(device))
    if (finalize == slot) out.push_back(decision);
  return out;
}

}  // namespace edgesim
