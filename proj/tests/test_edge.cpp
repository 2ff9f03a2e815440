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

#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "edgesim/edge.hpp"
#include "edgesim/rng.hpp"

using namespace edgesim;

namespace {

constexpr double kEdgeHz = 4.28e10;
constexpr double kTau = 0.1;
constexpr double kBusyW = 5.0;
constexpr double kIdleW = 0.1;

Task make_task(long id, int device, int birth, double bits, double density,
               int deadline) {
  Task t;
  t.id = id;
  t.device = device;
  t.birth_slot = birth;
  t.size_bits = bits;
  t.density = density;
  t.deadline_slot = deadline;
  return t;
}

EdgeNode make_node(int devices) {
  return EdgeNode(0, devices, kEdgeHz, kBusyW, kIdleW, kTau);
}

}  // namespace

TEST_CASE("service-time estimate scales with the load snapshot") {
  // 2 Mbit at 197 cycles/bit needs 3.94e8 cycles; one slot offers 4.28e9.
  CHECK(edge_processing_slots_estimate(2e6, 197.0, 2, kEdgeHz, kTau) ==
        doctest::Approx(0.18411214953271028).epsilon(1e-12));
  CHECK(edge_processing_slots_estimate(2e6, 197.0, 1, kEdgeHz, kTau) ==
        doctest::Approx(0.09205607476635514).epsilon(1e-12));
  // An idle node serves as if one queue were active.
  CHECK(edge_processing_slots_estimate(2e6, 197.0, 0, kEdgeHz, kTau) ==
        edge_processing_slots_estimate(2e6, 197.0, 1, kEdgeHz, kTau));
}

TEST_CASE("offload energy composes radio, busy, and standby parts") {
  CHECK(offload_energy_total(0.1643, 1.0, 0.02) ==
        doctest::Approx(1.1843).epsilon(1e-12));
  CHECK(idle_energy_j(2, kIdleW, kTau) == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(idle_energy_j(0, kIdleW, kTau) == 0.0);
}

TEST_CASE("single small task completes in its first service slot") {
  EdgeNode node = make_node(2);
  node.deliver(make_task(1, 0, 1, 2e6, 197.0, 12), 3);
  CHECK(node.step(1).empty());
  CHECK(node.step(2).empty());
  auto out = node.step(3);
  REQUIRE(out.size() == 1);
  CHECK(out[0].completed);
  CHECK(out[0].start_slot == 3);
  CHECK(out[0].finish_slot == 3);
  CHECK(out[0].service_slots == 1);
  CHECK(out[0].busy_energy_j == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out[0].idle_energy_j == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(out[0].dropped_bits == 0.0);
  CHECK(node.load_at(1) == 0);
  CHECK(node.load_at(3) == 1);
  CHECK(node.backlog_bits(0) == 0.0);
}

TEST_CASE("large task runs across slots until its bits drain") {
  // 43.5 Mbit at 197 cycles/bit: one full-capacity slot drains
  // 4.28e9 / 197 = 21.726 Mbit, so completion lands in slot 3.
  EdgeNode node = make_node(1);
  node.deliver(make_task(1, 0, 1, 43.5e6, 197.0, 50), 1);
  CHECK(node.step(1).empty());
  CHECK(node.backlog_bits(0) ==
        doctest::Approx(43.5e6 - 4.28e9 / 197.0).epsilon(1e-9));
  CHECK(node.step(2).empty());
  auto out = node.step(3);
  REQUIRE(out.size() == 1);
  CHECK(out[0].completed);
  CHECK(out[0].service_slots == 3);
  CHECK(out[0].finish_slot == 3);
  CHECK(out[0].busy_energy_j == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(out[0].idle_energy_j == doctest::Approx(0.03).epsilon(1e-12));
}

TEST_CASE("two active queues split capacity equally") {
  EdgeNode node = make_node(2);
  node.deliver(make_task(1, 0, 1, 30e6, 197.0, 50), 1);
  node.deliver(make_task(2, 1, 1, 30e6, 197.0, 50), 1);
  CHECK(node.step(1).empty());
  const double half_share_bits = kEdgeHz * kTau / 2.0 / 197.0;
  CHECK(node.backlog_bits(0) ==
        doctest::Approx(30e6 - half_share_bits).epsilon(1e-9));
  CHECK(node.backlog_bits(1) ==
        doctest::Approx(30e6 - half_share_bits).epsilon(1e-9));
  CHECK(node.step(2).empty());
  auto out = node.step(3);
  REQUIRE(out.size() == 2);
  for (const auto& o : out) {
    CHECK(o.completed);
    CHECK(o.service_slots == 3);
    CHECK(o.busy_energy_j == doctest::Approx(0.75).epsilon(1e-12));
  }
  CHECK(node.load_at(1) == 2);
  CHECK(node.load_at(2) == 2);
  CHECK(node.load_at(3) == 2);
}

TEST_CASE("a queue leaving the active set raises the others' share") {
  EdgeNode node = make_node(2);
  node.deliver(make_task(1, 0, 1, 12e6, 197.0, 50), 1);
  node.deliver(make_task(2, 1, 1, 30e6, 197.0, 50), 1);
  CHECK(node.step(1).empty());
  auto out2 = node.step(2);
  REQUIRE(out2.size() == 1);  // the 12 Mbit task finishes under a half share
  CHECK(out2[0].task.id == 1);
  CHECK(out2[0].completed);
  CHECK(out2[0].service_slots == 2);
  CHECK(out2[0].busy_energy_j == doctest::Approx(0.5).epsilon(1e-12));
  auto out3 = node.step(3);  // survivor now gets the whole processor
  REQUIRE(out3.size() == 1);
  CHECK(out3[0].task.id == 2);
  CHECK(out3[0].completed);
  CHECK(out3[0].service_slots == 3);
  CHECK(out3[0].busy_energy_j == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(node.load_at(1) == 2);
  CHECK(node.load_at(2) == 2);
  CHECK(node.load_at(3) == 1);
}

TEST_CASE("a successor waits for the slot after its predecessor leaves") {
  EdgeNode node = make_node(1);
  node.deliver(make_task(1, 0, 1, 25e6, 197.0, 50), 1);
  node.deliver(make_task(2, 0, 2, 1e6, 197.0, 50), 2);
  CHECK(node.step(1).empty());
  // Slot 2: the head completes mid-slot; the leftover share is forfeited,
  // the 1 Mbit successor must not start until slot 3.
  auto out2 = node.step(2);
  REQUIRE(out2.size() == 1);
  CHECK(out2[0].task.id == 1);
  CHECK(out2[0].completed);
  CHECK(node.backlog_bits(0) == doctest::Approx(1e6).epsilon(1e-12));
  auto out3 = node.step(3);
  REQUIRE(out3.size() == 1);
  CHECK(out3[0].task.id == 2);
  CHECK(out3[0].start_slot == 3);
  CHECK(out3[0].finish_slot == 3);
  CHECK(out3[0].service_slots == 1);
}

TEST_CASE("deadline expiry drops the unfinished remainder") {
  // 50 Mbit with a two-slot window: two full-capacity slots of service,
  // then the residue expires at the deadline.
  EdgeNode node = make_node(1);
  node.deliver(make_task(1, 0, 1, 50e6, 197.0, 2), 1);
  CHECK(node.step(1).empty());
  auto out = node.step(2);
  REQUIRE(out.size() == 1);
  CHECK_FALSE(out[0].completed);
  CHECK(out[0].finish_slot == 2);
  CHECK(out[0].service_slots == 2);
  CHECK(out[0].busy_energy_j == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(out[0].idle_energy_j == doctest::Approx(0.02).epsilon(1e-12));
  CHECK(out[0].dropped_bits ==
        doctest::Approx(50e6 - 2.0 * kEdgeHz * kTau / 197.0).epsilon(1e-9));
  CHECK(node.backlog_bits(0) == 0.0);
}

TEST_CASE("a task delivered after its deadline is swept without service") {
  EdgeNode node = make_node(1);
  node.deliver(make_task(1, 0, 1, 3e6, 197.0, 3), 5);
  for (int s = 1; s <= 4; ++s) CHECK(node.step(s).empty());
  auto out = node.step(5);
  REQUIRE(out.size() == 1);
  CHECK_FALSE(out[0].completed);
  CHECK(out[0].start_slot == 0);
  CHECK(out[0].service_slots == 0);
  CHECK(out[0].busy_energy_j == 0.0);
  CHECK(out[0].dropped_bits == doctest::Approx(3e6));
  // Never-served entries do not count toward the load broadcast either.
  CHECK(node.load_at(5) == 0);
}

TEST_CASE("recent_loads zero-pads before the first slot") {
  EdgeNode node = make_node(2);
  // Slot 1 drains 21.7 of task 1's 30 Mbit; slot 2's half share covers the
  // rest, finishing both tasks, so slot 3 runs idle.
  node.deliver(make_task(1, 0, 1, 30e6, 197.0, 50), 1);
  node.deliver(make_task(2, 1, 1, 5e6, 197.0, 50), 2);
  node.step(1);
  node.step(2);
  node.step(3);
  auto loads = node.recent_loads(3, 5);
  REQUIRE(loads.size() == 5);
  CHECK(loads[0] == 0);
  CHECK(loads[1] == 0);
  CHECK(loads[2] == 1);
  CHECK(loads[3] == 2);
  CHECK(loads[4] == 0);
  CHECK(node.load_at(0) == 0);
  CHECK(node.load_at(99) == 0);
}

TEST_CASE("delivery and stepping reject inconsistent use") {
  EdgeNode node = make_node(2);
  CHECK_THROWS_AS(node.deliver(make_task(1, 7, 1, 1e6, 197.0, 5), 1),
                  std::out_of_range);
  node.step(1);
  CHECK_THROWS_AS(node.deliver(make_task(1, 0, 1, 1e6, 197.0, 5), 1),
                  std::logic_error);
  CHECK_THROWS_AS(node.step(3), std::logic_error);
  CHECK_THROWS_AS(node.step(1), std::logic_error);
}

TEST_CASE("reset restores a pristine node") {
  EdgeNode node = make_node(1);
  node.deliver(make_task(1, 0, 1, 30e6, 197.0, 50), 1);
  node.step(1);
  node.reset();
  CHECK(node.last_stepped_slot() == 0);
  CHECK(node.backlog_bits(0) == 0.0);
  CHECK(node.load_at(1) == 0);
  auto out = node.step(1);
  CHECK(out.empty());
}

// Randomized workload: bits in must equal bits finalized plus bits still
// queued, and each completed task's service interval must carry enough
// granted capacity to cover it, with the final slot being the first slot
// where the cumulative grant reaches the task size.
TEST_CASE("flow conservation and cumulative-grant completion on random load") {
  RngStream rng(77, Stream::kScenario, 1);
  for (int trial = 0; trial < 25; ++trial) {
    const int devices = 1 + static_cast<int>(rng.uniform_index(3));
    EdgeNode node(0, devices, kEdgeHz, kBusyW, kIdleW, kTau);
    node.set_flow_log_enabled(true);
    const int horizon = 30;
    double delivered = 0.0;
    long next_id = 1;
    std::vector<EdgeOutcome> outcomes;
    std::map<long, double> density_of;
    for (int slot = 1; slot <= horizon; ++slot) {
      for (int d = 0; d < devices; ++d) {
        if (!rng.bernoulli(0.4)) continue;
        const double bits = rng.uniform(1e6, 40e6);
        const double density = 197.0 + 100.0 * rng.uniform_index(3);
        const int window = rng.uniform_int(1, 10);
        Task t = make_task(next_id++, d, slot, bits, density, slot + window - 1);
        node.deliver(t, slot);
        delivered += bits;
        density_of[t.id] = density;
      }
      auto out = node.step(slot);  // throws on any internal flow imbalance
      outcomes.insert(outcomes.end(), out.begin(), out.end());
    }
    // Bit conservation from the flow log: everything that arrived was
    // served, expired, or still sits in a queue. Queued entries may hold
    // partial service, so outcome sizes alone cannot balance the books.
    double arrived = 0.0, served = 0.0, expired = 0.0;
    for (const auto& rec : node.flow_log()) {
      arrived += rec.arrived;
      served += rec.served;
      expired += rec.dropped;
    }
    double queued = 0.0;
    for (int d = 0; d < devices; ++d) queued += node.backlog_bits(d);
    CHECK(arrived == doctest::Approx(delivered).epsilon(1e-9));
    CHECK(delivered ==
          doctest::Approx(served + expired + queued).epsilon(1e-9));
    double outcome_dropped = 0.0;
    for (const auto& o : outcomes) outcome_dropped += o.dropped_bits;
    CHECK(outcome_dropped == doctest::Approx(expired).epsilon(1e-9));

    // Index the flow log by (device, slot) for the grant reconstruction.
    std::map<std::pair<int, int>, const QueueFlowRecord*> grid;
    for (const auto& rec : node.flow_log()) {
      grid[{rec.device, rec.slot}] = &rec;
    }
    for (const auto& o : outcomes) {
      if (!o.completed) continue;
      const double density = density_of[o.task.id];
      double cum_bits = 0.0;
      double last_grant = 0.0;
      for (int s = o.start_slot; s <= o.finish_slot; ++s) {
        auto it = grid.find({o.task.device, s});
        REQUIRE(it != grid.end());
        last_grant = it->second->share_cycles / density;
        cum_bits += last_grant;
      }
      const double tol = 1e-6 * o.task.size_bits;
      CHECK(cum_bits >= o.task.size_bits - tol);
      // One slot earlier the grant had not yet covered the task.
      CHECK(cum_bits - last_grant < o.task.size_bits + tol);
    }
  }
}
