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

#include <algorithm>

namespace edgesim {

// Smallest number of whole slots covering `span` slots of work. Values a
// hair below an integer (from float division) count as that integer.
int whole_slots(double span);

// Slots an arriving task waits behind a FIFO queue whose last admitted task
// finishes in `last_finish_slot` (0 when the queue never held a task).
int queue_wait(int last_finish_slot, int slot);

// Service demand in slots.
double transmission_slots(double size_bits, double uplink_bps, double slot_seconds);
double local_processing_slots(double size_bits, double density, double cpu_hz,
                              double slot_seconds);

// Dynamic CPU power at clock rate f, with the conventional 1e-27 switched
// capacitance coefficient.
double device_cpu_power_w(double cpu_hz);

// Where a task admitted at `slot` with `wait_slots` of queueing and
// `service_slots` of demand ends up, honouring the deadline cap.
struct ServicePlan {
  int finish_slot = 0;   // completion slot, or the drop slot when censored
  bool completed = false;
};
ServicePlan plan_service(int slot, int wait_slots, double service_slots,
                         int deadline_slot);

// Slots of service actually rendered before the deadline window closes.
// Equals `service_slots` for completed tasks.
double capped_service_slots(double service_slots, int wait_slots,
                            int deadline_window);

// Energy for `service_slots` of continuous draw at `power_w`.
double service_energy_j(double service_slots, double power_w, double slot_seconds);

// Device-side bookkeeping: one transmission queue and one computation
// queue, each summarised by the finish slot of its last admitted task.
// Queue contents themselves live in the event calendar of the caller.
class MobileDevice {
 public:
  MobileDevice(int index, double cpu_hz) : index_(index), cpu_hz_(cpu_hz) {}

  int index() const { return index_; }
  double cpu_hz() const { return cpu_hz_; }
  double battery() const { return battery_; }
  void set_battery(double level) { battery_ = level; }

  int computation_wait(int slot) const { return queue_wait(last_comp_finish_, slot); }
  int transmission_wait(int slot) const { return queue_wait(last_trans_finish_, slot); }

  // Admission updates the marker even for tasks that will be dropped: the
  // censored finish slot is when the queue position frees up.
  void admit_computation(int finish_slot) {
    last_comp_finish_ = std::max(last_comp_finish_, finish_slot);
  }
  void admit_transmission(int finish_slot) {
    last_trans_finish_ = std::max(last_trans_finish_, finish_slot);
  }

  int last_computation_finish() const { return last_comp_finish_; }
  int last_transmission_finish() const { return last_trans_finish_; }

  void reset() {
    last_comp_finish_ = 0;
    last_trans_finish_ = 0;
  }

 private:
  int index_;
  double cpu_hz_;
  double battery_ = 0.5;
  int last_comp_finish_ = 0;
  int last_trans_finish_ = 0;
};

}  // namespace edgesim
