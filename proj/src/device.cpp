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

#include "edgesim/device.hpp"

#include <cmath>
#include <stdexcept>

namespace edgesim {

namespace {
// Shields ceil() against quotients like 5.000000000000001 that should be 5.
constexpr double kCeilSlack = 1e-9;
}  // namespace

int whole_slots(double span) {
  if (span <= 0.0) return 0;
  return static_cast<int>(std::ceil(span - kCeilSlack));
}

int queue_wait(int last_finish_slot, int slot) {
  return std::max(0, last_finish_slot - slot + 1);
}

double transmission_slots(double size_bits, double uplink_bps, double slot_seconds) {
  if (uplink_bps <= 0.0) throw std::invalid_argument("uplink_bps must be positive");
  if (slot_seconds <= 0.0) throw std::invalid_argument("slot_seconds must be positive");
  return size_bits / (uplink_bps * slot_seconds);
}

double local_processing_slots(double size_bits, double density, double cpu_hz,
                              double slot_seconds) {
  if (cpu_hz <= 0.0) throw std::invalid_argument("cpu_hz must be positive");
  if (slot_seconds <= 0.0) throw std::invalid_argument("slot_seconds must be positive");
  return size_bits * density / (cpu_hz * slot_seconds);
}

double device_cpu_power_w(double cpu_hz) { return 1e-27 * cpu_hz * cpu_hz * cpu_hz; }

ServicePlan plan_service(int slot, int wait_slots, double service_slots,
                         int deadline_slot) {
  ServicePlan plan;
  int ideal = slot + wait_slots + whole_slots(service_slots) - 1;
  plan.completed = ideal <= deadline_slot;
  plan.finish_slot = std::min(ideal, deadline_slot);
  return plan;
}

double capped_service_slots(double service_slots, int wait_slots,
                            int deadline_window) {
  double window = std::max(0, deadline_window - wait_slots);
  return std::min(service_slots, window);
}

double service_energy_j(double service_slots, double power_w, double slot_seconds) {
  return service_slots * power_w * slot_seconds;
}

}  // namespace edgesim
