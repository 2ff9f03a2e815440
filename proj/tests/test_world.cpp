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
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "edgesim/episode.hpp"
#include "edgesim/world.hpp"

using namespace edgesim;

namespace {

// One device, one edge, an arrival every slot. The workhorse scenario for
// hand-checkable accounting.
SimConfig lockstep_cfg() {
  SimConfig cfg;
  cfg.num_devices = 1;
  cfg.num_edges = 1;
  cfg.arrival_rate = 10.0;  // p = rate * tau / devices = 1
  cfg.battery_levels = {0.5};
  cfg.seed = 11;
  return cfg;
}

EpisodeMetrics run_policy_episode(World& world, const World::DecideFn& decide,
                                  int episode,
                                  std::vector<DeviceExperience>* exps = nullptr) {
  world.begin_episode(episode);
  for (int t = 0; t < world.config().num_slots; ++t)
    world.advance_slot(decide, exps);
  auto terminal = world.end_episode();
  if (exps)
    exps->insert(exps->end(), terminal.begin(), terminal.end());
  return world.episode_metrics();
}

}  // namespace

TEST_CASE("first-slot state is empty apart from the battery draw") {
  SimConfig cfg;
  World world(cfg);
  world.begin_episode(0);
  StateVector s = world.observe_state(2);
  CHECK(s.task_size_bits == 0.0);
  CHECK(s.wait_comp_slots == 0.0);
  CHECK(s.wait_trans_slots == 0.0);
  for (double b : s.edge_backlog_bits) CHECK(b == 0.0);
  for (double h : s.history) CHECK(h == 0.0);
  bool known_level = false;
  for (double lvl : cfg.battery_levels) known_level |= s.battery == lvl;
  CHECK(known_level);
  REQUIRE(s.num_edges() == cfg.num_edges);
  REQUIRE(s.history_steps() == cfg.agent.history_steps);
}

TEST_CASE("local-only lockstep: every task completes in its arrival slot") {
  SimConfig cfg = lockstep_cfg();
  cfg.num_slots = 5;
  cfg.task_size_min_bits = 1e6;
  cfg.task_size_max_bits = 1e6;
  cfg.task_densities = {197.0};  // 0.758 slots of compute, one whole slot
  World world(cfg);
  auto metrics = run_policy_episode(
      world, [](int, const StateVector&) { return Action{0}; }, 0);
  CHECK(metrics.arrivals == 5);
  CHECK(metrics.completed == 5);
  CHECK(metrics.dropped == 0);
  CHECK(metrics.in_system == 0);
  CHECK(metrics.delay_sum_slots == 5.0);  // one slot each
  const double e_task = 1e6 * 197.0 * 17.576 / 2.6e9;
  CHECK(metrics.energy_j == doctest::Approx(5.0 * e_task).epsilon(1e-9));
  // Every finalization lands in its own slot.
  for (int t = 1; t <= 5; ++t) {
    auto set = world.completion_set(0, t);
    REQUIRE(set.size() == 1);
    CHECK(set[0] == t);
  }
  CHECK(world.completion_set(0, 6).empty());
}

TEST_CASE("single offloaded task: hand-checked energy, delay, and QoE") {
  SimConfig cfg = lockstep_cfg();
  cfg.num_slots = 3;
  cfg.task_size_min_bits = 2e6;
  cfg.task_size_max_bits = 2e6;
  cfg.task_densities = {197.0};
  World world(cfg);
  std::vector<DeviceExperience> exps;
  auto metrics = run_policy_episode(
      world, [](int, const StateVector&) { return Action{1}; }, 0, &exps);

  // Task 1 uplinks for 2 slots (2/1.4 slots raw), reaches the edge at slot
  // 3, and its 2 Mbit fit into one full-capacity service slot. Tasks 2 and
  // 3 are still queued when the episode ends.
  CHECK(metrics.arrivals == 3);
  CHECK(metrics.completed == 1);
  CHECK(metrics.dropped == 0);
  CHECK(metrics.in_system == 2);
  CHECK(metrics.delay_sum_slots == 3.0);

  const double tx_e = (2e6 / 1.4e7) * 2.3;      // airtime seconds * power
  const double busy_e = 5.0 * 0.1;              // one solo service slot
  const double idle_e = 0.1 * 0.1;
  const double total_e = tx_e + busy_e + idle_e;
  CHECK(metrics.energy_j == doctest::Approx(total_e).epsilon(1e-12));

  const double cost = 0.5 * (3.0 / 10.0) + 0.5 * (total_e / 17.576);
  const double expect_qoe = 1.0 - cost;
  CHECK(metrics.qoe_sum == doctest::Approx(expect_qoe).epsilon(1e-12));
  // The decision happened in slot 1, so the discounted return weights it 1.
  CHECK(metrics.mean_discounted_return ==
        doctest::Approx(expect_qoe).epsilon(1e-12));

  // Finalized at the last slot: the experience is terminal with a zeroed
  // follow-up state.
  REQUIRE(exps.size() == 1);
  const Experience& e = exps[0].experience;
  CHECK(e.terminal);
  CHECK(e.action == 1);
  CHECK(e.q == doctest::Approx(expect_qoe).epsilon(1e-12));
  for (double v : e.next_state) CHECK(v == 0.0);
  CHECK(e.state[0] == 2e6);  // the decision saw the arriving task size
}

TEST_CASE("overloaded uplink drops tasks at the device before the edge") {
  SimConfig cfg = lockstep_cfg();
  cfg.num_slots = 20;
  cfg.task_size_min_bits = 7e6;  // five slots of airtime each
  cfg.task_size_max_bits = 7e6;
  World world(cfg);
  auto metrics = run_policy_episode(
      world, [](int, const StateVector&) { return Action{1}; }, 0);
  CHECK(metrics.arrivals == 20);
  CHECK(metrics.dropped > 0);
  CHECK(metrics.completed >= 2);
  CHECK(metrics.arrivals ==
        metrics.completed + metrics.dropped + metrics.in_system);
  // First uplink finishes at slot 5, so the edge sees nothing before 6.
  for (int t = 1; t <= 5; ++t) CHECK(world.edge(0).load_at(t) == 0);
  CHECK(world.edge(0).load_at(6) == 1);
}

TEST_CASE("device-side drops burn only the capped share of airtime") {
  // Third and later tasks of the lockstep 7 Mbit scenario can no longer
  // finish inside the deadline window; their radio energy must be capped at
  // the slots they actually occupy before the window closes.
  SimConfig cfg = lockstep_cfg();
  cfg.num_slots = 12;
  cfg.task_size_min_bits = 7e6;
  cfg.task_size_max_bits = 7e6;
  World world(cfg);
  std::vector<DeviceExperience> exps;
  auto metrics = run_policy_episode(
      world, [](int, const StateVector&) { return Action{1}; }, 0, &exps);
  (void)metrics;
  // Task decided at slot 3 waits 8 slots (queue busy through slot 10) and
  // only transmits in slots 11..12 of its window: 2 slots * 2.3 W * 0.1 s.
  bool found = false;
  for (const auto& de : exps) {
    if (de.experience.state[0] == 7e6 && de.experience.q < 0.0 && !found) {
      // Drop penalty = -E / E_ref for the first dropped task.
      const double first_drop_energy = 2.0 * 2.3 * 0.1;
      if (std::abs(de.experience.q + first_drop_energy / 17.576) < 1e-9) {
        found = true;
      }
    }
  }
  CHECK(found);
}

TEST_CASE("broadcast history mirrors the edge load log") {
  SimConfig cfg;
  cfg.seed = 41;
  World world(cfg);
  RngStream rng(42, Stream::kPolicy, 0);
  world.begin_episode(0);
  for (int t = 0; t < 12; ++t) {
    world.advance_slot([&](int, const StateVector&) {
      return Action{rng.uniform_int(0, cfg.num_edges)};
    });
  }
  StateVector s = world.observe_state(0);
  const int steps = cfg.agent.history_steps;
  for (int j = 0; j < cfg.num_edges; ++j) {
    auto loads = world.edge(j).recent_loads(world.current_slot() - 1, steps);
    for (int r = 0; r < steps; ++r) {
      CHECK(s.history[static_cast<std::size_t>(r) * cfg.num_edges + j] ==
            static_cast<double>(loads[static_cast<std::size_t>(r)]));
    }
  }
}

TEST_CASE(
    "experience emission: one per finalized task, next state follows") {
  SimConfig cfg = lockstep_cfg();
  cfg.num_slots = 15;
  World world(cfg);
  std::vector<DeviceExperience> exps;
  std::vector<std::vector<double>> seen_states;  // decide-time state per slot
  world.begin_episode(0);
  for (int t = 0; t < cfg.num_slots; ++t) {
    world.advance_slot(
        [&](int, const StateVector& s) {
          seen_states.push_back(s.flatten());
          return Action{1};
        },
        &exps);
  }
  auto terminal = world.end_episode();
  auto metrics = world.episode_metrics();
  CHECK(metrics.experiences ==
        static_cast<long>(exps.size() + terminal.size()));
  CHECK(metrics.experiences == metrics.finalized);
  CHECK(world.experiences_emitted() == metrics.experiences);
  REQUIRE(seen_states.size() == 15);  // lockstep arrivals every slot

  // Each non-terminal experience's follow-up state must be exactly the
  // state the policy saw on the next decision.
  for (const auto& de : exps) {
    const auto& e = de.experience;
    int decided_at = -1;
    for (int t = 0; t < 15; ++t) {
      if (seen_states[static_cast<std::size_t>(t)] == e.state) {
        decided_at = t + 1;
        break;
      }
    }
    REQUIRE(decided_at >= 1);
    CHECK_FALSE(e.terminal);
    // Find the finalize slot from the completion log, then match the
    // recorded decision state of the following slot.
    bool matched = false;
    for (int f = decided_at; f <= 14 && !matched; ++f) {
      if (seen_states[static_cast<std::size_t>(f)] == e.next_state) {
        matched = true;
      }
    }
    CHECK(matched);
  }
  for (const auto& de : terminal) {
    CHECK(de.experience.terminal);
    for (double v : de.experience.next_state) CHECK(v == 0.0);
  }
}

TEST_CASE("identical seeds replay identical episodes") {
  SimConfig cfg;
  cfg.num_slots = 40;
  cfg.seed = 97;
  auto drive = [&](World& world) {
    BaselineDriver driver(PolicyKind::kRandom, cfg.num_edges, 123);
    return run_episode(world, driver, 0);
  };
  World a(cfg);
  World b(cfg);
  auto ma = drive(a);
  auto mb = drive(b);
  CHECK(ma.arrivals == mb.arrivals);
  CHECK(ma.completed == mb.completed);
  CHECK(ma.dropped == mb.dropped);
  CHECK(ma.energy_j == mb.energy_j);  // bitwise equality expected
  CHECK(ma.qoe_sum == mb.qoe_sum);
  CHECK(ma.mean_discounted_return == mb.mean_discounted_return);

  SimConfig other = cfg;
  other.seed = 98;
  World c(other);
  auto mc = drive(c);
  // A different seed realizes a different workload; the continuous energy
  // total cannot collide.
  CHECK((ma.arrivals != mc.arrivals || ma.energy_j != mc.energy_j));
}

TEST_CASE("the arrival workload is invariant across policies") {
  SimConfig cfg;
  cfg.num_slots = 50;
  cfg.seed = 55;
  World a(cfg);
  World b(cfg);
  auto ma = run_policy_episode(
      a, [](int, const StateVector&) { return Action{0}; }, 0);
  auto mb = run_policy_episode(
      b, [](int, const StateVector&) { return Action{1}; }, 0);
  CHECK(ma.arrivals == mb.arrivals);
  CHECK(a.tasks_spawned() == b.tasks_spawned());
}

TEST_CASE("task conservation holds across consecutive episodes") {
  SimConfig cfg;
  cfg.num_slots = 30;
  cfg.seed = 7;
  World world(cfg);
  BaselineDriver driver(PolicyKind::kRandom, cfg.num_edges, 9);
  long total_finalized = 0;
  for (int ep = 0; ep < 4; ++ep) {
    auto m = run_episode(world, driver, ep);  // end_episode audits internally
    CHECK(m.arrivals == m.completed + m.dropped + m.in_system);
    CHECK(m.finalized == m.completed + m.dropped);
    CHECK(m.experiences == m.finalized);
    total_finalized += m.finalized;
  }
  CHECK(world.experiences_emitted() == total_finalized);
}

TEST_CASE("slot reports sum to the episode totals") {
  SimConfig cfg;
  cfg.num_slots = 25;
  cfg.seed = 31;
  World world(cfg);
  RngStream rng(1, Stream::kPolicy, 0);
  world.begin_episode(0);
  long arrivals = 0, completed = 0, dropped = 0;
  double energy = 0.0, qoe = 0.0;
  for (int t = 0; t < cfg.num_slots; ++t) {
    SlotReport r = world.advance_slot([&](int, const StateVector&) {
      return Action{rng.uniform_int(0, cfg.num_edges)};
    });
    CHECK(r.slot == t + 1);
    arrivals += r.arrivals;
    completed += r.completed;
    dropped += r.dropped;
    energy += r.energy_j;
    qoe += r.qoe_sum;
  }
  world.end_episode();
  auto m = world.episode_metrics();
  CHECK(m.arrivals == arrivals);
  CHECK(m.completed == completed);
  CHECK(m.dropped == dropped);
  CHECK(m.energy_j == doctest::Approx(energy).epsilon(1e-12));
  CHECK(m.qoe_sum == doctest::Approx(qoe).epsilon(1e-12));
}

TEST_CASE("world rejects out-of-range decisions and misuse") {
  SimConfig cfg = lockstep_cfg();
  World world(cfg);
  CHECK_THROWS_AS(world.advance_slot([](int, const StateVector&) {
    return Action{0};
  }),
                  std::logic_error);
  world.begin_episode(0);
  CHECK_THROWS_AS(world.begin_episode(1), std::logic_error);
  CHECK_THROWS_AS(world.advance_slot([](int, const StateVector&) {
    return Action{7};
  }),
                  std::invalid_argument);
}

TEST_CASE("eval-mode learner leaves its parameters untouched") {
  SimConfig cfg;
  cfg.num_devices = 3;
  cfg.num_edges = 2;
  cfg.arrival_rate = 9.0;
  cfg.num_slots = 30;
  cfg.agent.lstm_hidden = 8;
  cfg.agent.dense1_units = 16;
  cfg.agent.dense2_units = 8;
  cfg.agent.history_steps = 2;
  World world(cfg);
  DqnDriver driver(cfg, 5);
  driver.set_mode(AgentMode::kEval);
  std::vector<std::string> before;
  for (const auto& a : driver.agents()) {
    std::stringstream buf;
    save_params(buf, a.online_net().params());
    before.push_back(buf.str());
  }
  run_episode(world, driver, 0);
  CHECK(driver.epsilon() == cfg.agent.eps_final);
  CHECK(driver.total_train_steps() == 0);
  for (std::size_t k = 0; k < driver.agents().size(); ++k) {
    std::stringstream buf;
    save_params(buf, driver.agents()[k].online_net().params());
    CHECK(buf.str() == before[k]);
  }
}

TEST_CASE("train-mode learner takes one step per consumed experience") {
  SimConfig cfg;
  cfg.num_devices = 2;
  cfg.num_edges = 1;
  cfg.arrival_rate = 6.0;
  cfg.num_slots = 60;
  cfg.agent.lstm_hidden = 8;
  cfg.agent.dense1_units = 16;
  cfg.agent.dense2_units = 8;
  cfg.agent.history_steps = 2;
  cfg.agent.batch_size = 4;
  cfg.seed = 3;
  World world(cfg);
  DqnDriver driver(cfg, 3);
  long steps_before = driver.total_train_steps();
  CHECK(steps_before == 0);
  auto m1 = run_episode(world, driver, 0);
  auto m2 = run_episode(world, driver, 1);
  // Buffers need batch_size experiences before stepping, so the step count
  // trails the experience count by at most that warm-up per agent.
  long experiences = m1.experiences + m2.experiences;
  long steps = driver.total_train_steps();
  CHECK(steps > 0);
  CHECK(steps <= experiences);
  CHECK(steps >= experiences - 2 * (cfg.agent.batch_size - 1));
  // Epsilon decayed between episodes.
  CHECK(driver.epsilon() < 1.0);
}

TEST_CASE("a workload without arrivals produces no experiences or steps") {
  SimConfig cfg;
  cfg.num_devices = 2;
  cfg.num_edges = 1;
  cfg.arrival_rate = 0.0;
  cfg.num_slots = 30;
  cfg.agent.lstm_hidden = 8;
  cfg.agent.dense1_units = 16;
  cfg.agent.dense2_units = 8;
  cfg.agent.history_steps = 2;
  cfg.seed = 5;
  World world(cfg);
  DqnDriver driver(cfg, 5);
  driver.set_mode(AgentMode::kTrain);
  EpisodeMetrics m = run_episode(world, driver, 0);
  CHECK(m.arrivals == 0);
  CHECK(m.completed == 0);
  CHECK(m.dropped == 0);
  CHECK(m.experiences == 0);
  CHECK(m.energy_j == 0.0);
  CHECK(m.qoe_sum == 0.0);
  CHECK(driver.total_train_steps() == 0);
  CHECK(world.experiences_emitted() == 0);
}
