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

#include "edgesim/episode.hpp"

namespace edgesim {

DqnDriver::DqnDriver(const SimConfig& cfg, std::uint64_t root_seed)
    : cfg_(cfg),
      shared_(cfg.agent.share_network),
      schedule_(EpsilonSchedule::from_config(cfg.agent, cfg.num_episodes)),
      epsilon_(cfg.agent.eps_start) {
  int count = shared_ ? 1 : cfg.num_devices;
  agents_.reserve(count);
  for (int i = 0; i < count; ++i) agents_.emplace_back(cfg, root_seed, i);
}

void DqnDriver::begin_episode(int episode_index) {
  // Evaluation keeps the schedule's floor; the anneal itself is train-only.
  epsilon_ = mode_ == AgentMode::kTrain ? schedule_.at(episode_index)
                                        : schedule_.final_value;
  loss_sum_ = 0.0;
  loss_count_ = 0;
}

Action DqnDriver::decide(int device, const StateVector& state) {
  return agent_for(device).select_action(state, epsilon_);
}

void DqnDriver::on_experience(const DeviceExperience& de) {
  if (mode_ != AgentMode::kTrain) return;
  DqnAgent& agent = agent_for(de.device);
  agent.push_experience(de.experience);
  if (agent.ready()) {
    loss_sum_ += agent.train_step();
    ++loss_count_;
  }
}

long DqnDriver::total_train_steps() const {
  long total = 0;
  for (const DqnAgent& a : agents_) total += a.train_steps();
  return total;
}

EpisodeMetrics run_episode(World& world, PolicyDriver& policy, int episode_index) {
  world.begin_episode(episode_index);
  policy.begin_episode(episode_index);
  std::vector<DeviceExperience> experiences;
  auto decide = [&policy](int device, const StateVector& s) {
    return policy.decide(device, s);
  };
  for (int t = 1; t <= world.config().num_slots; ++t) {
    experiences.clear();
    world.advance_slot(decide, &experiences);
    for (const DeviceExperience& de : experiences) policy.on_experience(de);
  }
  for (const DeviceExperience& de : world.end_episode()) policy.on_experience(de);
  return world.episode_metrics();
}

}  // namespace edgesim
