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

#include <cstdint>
#include <vector>

#include "edgesim/agent.hpp"
#include "edgesim/world.hpp"

namespace edgesim {

// Routes decisions during an episode and consumes emitted experiences.
class PolicyDriver {
 public:
  virtual ~PolicyDriver() = default;
  virtual void begin_episode(int episode_index) { (void)episode_index; }
  virtual Action decide(int device, const StateVector& state) = 0;
  virtual void on_experience(const DeviceExperience& de) { (void)de; }
};

// LC / FO / RD.
class BaselineDriver : public PolicyDriver {
 public:
  BaselineDriver(PolicyKind kind, int num_edges, std::uint64_t root_seed)
      : kind_(kind), num_edges_(num_edges),
        rng_(root_seed, Stream::kPolicy) {}

  Action decide(int, const StateVector&) override {
    return baseline_policy(kind_, num_edges_, rng_);
  }

 private:
  PolicyKind kind_;
  int num_edges_;
  RngStream rng_;
};

enum class AgentMode { kTrain, kEval };

// One learner per device (or one shared, per config). In train mode every
// consumed experience triggers an optimization step once the buffer can
// fill a batch; in eval mode parameters are frozen and exploration sits at
// the schedule floor.
class DqnDriver : public PolicyDriver {
 public:
  DqnDriver(const SimConfig& cfg, std::uint64_t root_seed);

  void set_mode(AgentMode mode) { mode_ = mode; }
  AgentMode mode() const { return mode_; }

  void begin_episode(int episode_index) override;
  Action decide(int device, const StateVector& state) override;
  void on_experience(const DeviceExperience& de) override;

  double epsilon() const { return epsilon_; }
  long total_train_steps() const;
  double episode_loss_mean() const {
    return loss_count_ ? loss_sum_ / loss_count_ : 0.0;
  }

  std::vector<DqnAgent>& agents() { return agents_; }
  const std::vector<DqnAgent>& agents() const { return agents_; }

 private:
  DqnAgent& agent_for(int device) {
    return shared_ ? agents_[0] : agents_[device];
  }

  SimConfig cfg_;
  bool shared_;
  std::vector<DqnAgent> agents_;
  EpsilonSchedule schedule_;
  AgentMode mode_ = AgentMode::kTrain;
  double epsilon_ = 1.0;
  double loss_sum_ = 0.0;
  long loss_count_ = 0;
};

// Runs one full episode of `world` under `policy`, wiring experiences
// through to the policy driver.
EpisodeMetrics run_episode(World& world, PolicyDriver& policy, int episode_index);

}  // namespace edgesim
