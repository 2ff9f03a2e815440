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

#include <iosfwd>
#include <vector>

#include "edgesim/config.hpp"
#include "edgesim/mdp.hpp"
#include "edgesim/nn.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

// Bounded FIFO of experiences with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Experience e);
  std::size_t size() const { return store_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Experience& at(std::size_t i) const { return store_[i]; }

  // `n` independent uniform draws (with replacement).
  std::vector<std::size_t> sample_indices(std::size_t n, RngStream& rng) const;

  // Contents and overwrite cursor; capacity stays as constructed.
  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // overwrite cursor once full
  std::vector<Experience> store_;
};

struct EpsilonSchedule {
  double start = 1.0;
  double final_value = 0.01;
  int decay_episodes = 1;  // linear ramp length; clamped afterwards

  static EpsilonSchedule from_config(const AgentConfig& a, int total_episodes);
  double at(int episode) const;  // episode is 0-based
};

enum class PolicyKind { kLocalOnly, kFullOffload, kRandom, kLearned };
const char* policy_token(PolicyKind kind);
PolicyKind parse_policy(const std::string& token);

// Static decision rules used as comparison points.
Action baseline_policy(PolicyKind kind, int num_edges, RngStream& rng);

// One learner: online and target networks, replay buffer, optimizer.
class DqnAgent {
 public:
  DqnAgent(const SimConfig& cfg, std::uint64_t root_seed, std::uint64_t agent_index);

  // Greedy on the online network with probability 1-eps, uniform
  // otherwise; Q-ties resolve to the lowest action code.
  Action select_action(const StateVector& state, double eps);

  Eigen::VectorXd q_values(const StateVector& state) const;

  void push_experience(const Experience& e) { buffer_.push(e); }
  bool ready() const {
    return buffer_.size() >= static_cast<std::size_t>(batch_size_);
  }

  // Bootstrapped regression target: the online network picks the next
  // action, the target network prices it. Terminal experiences collapse
  // to the observed payoff.
  double target_q(const Experience& e) const;

  // One optimization step on a uniformly sampled batch; returns the loss.
  double train_step();
  double train_step(const std::vector<const Experience*>& batch);

  void sync_target();
  long train_steps() const { return train_steps_; }
  const ReplayBuffer& buffer() const { return buffer_; }
  const QNetwork& online_net() const { return online_; }
  const QNetwork& target_net() const { return target_; }
  QNetwork& mutable_online_net() { return online_; }
  const StateEncoder& encoder() const { return encoder_; }

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  NetShape shape_;
  StateEncoder encoder_;
  QNetwork online_;
  QNetwork target_;
  RmsProp optimizer_;
  ReplayBuffer buffer_;
  RngStream explore_rng_;
  RngStream sample_rng_;
  int batch_size_;
  double gamma_;
  int replace_threshold_;
  long train_steps_ = 0;
};

// Versioned checkpoint of a set of agents: network parameters, optimizer
// state, step counters, replay contents, and RNG engine states. A reloaded
// agent continues training bit-identically to one that never stopped, on
// the same platform.
void save_checkpoint(std::ostream& out, const std::vector<DqnAgent>& agents);
void load_checkpoint(std::istream& in, std::vector<DqnAgent>& agents);

}  // namespace edgesim
