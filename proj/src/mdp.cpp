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

#include "edgesim/mdp.hpp"

#include <cstdio>
#include <stdexcept>

#include "edgesim/device.hpp"

namespace edgesim {

std::vector<double> StateVector::flatten() const {
  std::vector<double> flat;
  flat.reserve(4 + edge_backlog_bits.size() + history.size());
  flat.push_back(task_size_bits);
  flat.push_back(wait_comp_slots);
  flat.push_back(wait_trans_slots);
  flat.insert(flat.end(), edge_backlog_bits.begin(), edge_backlog_bits.end());
  flat.push_back(battery);
  flat.insert(flat.end(), history.begin(), history.end());
  return flat;
}

StateVector StateVector::unflatten(const std::vector<double>& flat, int num_edges,
                                   int history_steps) {
  if (static_cast<int>(flat.size()) != flat_size(num_edges, history_steps))
    throw std::invalid_argument("unflatten: layout mismatch");
  StateVector s;
  s.task_size_bits = flat[0];
  s.wait_comp_slots = flat[1];
  s.wait_trans_slots = flat[2];
  s.edge_backlog_bits.assign(flat.begin() + 3, flat.begin() + 3 + num_edges);
  s.battery = flat[3 + num_edges];
  s.history.assign(flat.begin() + 4 + num_edges, flat.end());
  return s;
}

CostParams make_cost_params(const SimConfig& cfg) {
  CostParams cp;
  cp.deadline_slots = cfg.deadline_slots;
  cp.energy_ref_j = device_cpu_power_w(cfg.device_cpu_hz) * cfg.slot_seconds *
                    cfg.deadline_slots;
  cp.completion_reward = cfg.completion_reward;
  return cp;
}

double task_delay(Outcome outcome, int decision_slot, int finalize_slot) {
  if (outcome == Outcome::kDropped) return 0.0;
  if (finalize_slot < decision_slot)
    throw std::invalid_argument("task_delay: finalize before decision");
  return finalize_slot - decision_slot + 1;
}

double task_cost(double delay_slots, double energy_j, double battery,
                 const CostParams& cp) {
  double delay_norm = delay_slots / cp.deadline_slots;
  double energy_norm = energy_j / cp.energy_ref_j;
  return battery * delay_norm + (1.0 - battery) * energy_norm;
}

double qoe(Outcome outcome, double cost, double energy_j, const CostParams& cp) {
  if (outcome == Outcome::kCompleted) return cp.completion_reward - cost;
  return -(energy_j / cp.energy_ref_j);
}

QoERecord make_qoe_record(const Task& task, Outcome outcome, int finalize_slot,
                          double energy_j, double battery, const CostParams& cp) {
  QoERecord r;
  r.task_id = task.id;
  r.outcome = outcome;
  r.decision_slot = task.birth_slot;
  r.finalize_slot = finalize_slot;
  r.delay_slots = task_delay(outcome, task.birth_slot, finalize_slot);
  r.energy_j = energy_j;
  r.cost = task_cost(r.delay_slots, energy_j, battery, cp);
  r.qoe = qoe(outcome, r.cost, energy_j, cp);
  return r;
}

std::string serialize_experience(const Experience& e) {
  auto append_list = [](std::string& out, const std::vector<double>& v) {
    char buf[32];
    for (double x : v) {
      std::snprintf(buf, sizeof(buf), ",%.17g", x);
      out += buf;
    }
  };
  char head[96];
  std::snprintf(head, sizeof(head), "%ld,%d,%.17g,%d", e.task_id, e.action, e.q,
                e.terminal ? 1 : 0);
  std::string out = head;
  append_list(out, e.state);
  append_list(out, e.next_state);
  return out;
}

double discounted_return(const std::vector<double>& qoe_by_slot, double gamma) {
  double total = 0.0;
  double weight = 1.0;
  for (double q : qoe_by_slot) {
    total += weight * q;
    weight *= gamma;
  }
  return total;
}

}  // namespace edgesim
