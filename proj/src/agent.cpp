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

#include "edgesim/agent.hpp"

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace edgesim {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::invalid_argument("replay capacity must be > 0");
  store_.reserve(std::min<std::size_t>(capacity_, 4096));
}

void ReplayBuffer::push(Experience e) {
  if (store_.size() < capacity_) {
    store_.push_back(std::move(e));
  } else {
    store_[next_] = std::move(e);
    next_ = (next_ + 1) % capacity_;
  }
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n,
                                                      RngStream& rng) const {
  if (store_.empty()) throw std::logic_error("sampling from empty replay buffer");
  std::vector<std::size_t> out(n);
  for (std::size_t& i : out) i = rng.uniform_index(store_.size());
  return out;
}

EpsilonSchedule EpsilonSchedule::from_config(const AgentConfig& a,
                                             int total_episodes) {
  EpsilonSchedule s;
  s.start = a.eps_start;
  s.final_value = a.eps_final;
  s.decay_episodes =
      std::max(1, static_cast<int>(a.eps_decay_fraction * total_episodes));
  return s;
}

double EpsilonSchedule::at(int episode) const {
  if (episode >= decay_episodes) return final_value;
  double frac = static_cast<double>(episode) / decay_episodes;
  return start - (start - final_value) * frac;
}

const char* policy_token(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kLocalOnly: return "lc";
    case PolicyKind::kFullOffload: return "fo";
    case PolicyKind::kRandom: return "rd";
    case PolicyKind::kLearned: return "dqn";
  }
  return "?";
}

PolicyKind parse_policy(const std::string& token) {
  if (token == "lc") return PolicyKind::kLocalOnly;
  if (token == "fo") return PolicyKind::kFullOffload;
  if (token == "rd") return PolicyKind::kRandom;
  if (token == "dqn") return PolicyKind::kLearned;
  throw std::invalid_argument("unknown policy '" + token +
                              "' (expected lc, fo, rd, or dqn)");
}

Action baseline_policy(PolicyKind kind, int num_edges, RngStream& rng) {
  switch (kind) {
    case PolicyKind::kLocalOnly:
      return Action{0};
    case PolicyKind::kFullOffload:
      return Action{rng.uniform_int(1, num_edges)};
    case PolicyKind::kRandom:
      return Action{rng.uniform_int(0, num_edges)};
    case PolicyKind::kLearned:
      break;
  }
  throw std::invalid_argument("baseline_policy: not a static policy");
}

DqnAgent::DqnAgent(const SimConfig& cfg, std::uint64_t root_seed,
                   std::uint64_t agent_index)
    : shape_(shape_from_config(cfg)),
      encoder_(StateEncoder::from_config(cfg)),
      buffer_(cfg.agent.replay_capacity),
      explore_rng_(root_seed, Stream::kExplore, agent_index),
      sample_rng_(root_seed, Stream::kReplaySample, agent_index),
      batch_size_(cfg.agent.batch_size),
      gamma_(cfg.agent.gamma),
      replace_threshold_(cfg.agent.replace_threshold) {
  RngStream init_rng(root_seed, Stream::kNetInit, agent_index);
  online_ = QNetwork(shape_, init_rng);
  target_ = online_;
  optimizer_ = RmsProp(cfg.agent.learning_rate, cfg.agent.rmsprop_decay,
                       cfg.agent.rmsprop_epsilon);
}

namespace {

int argmax_lowest(const Eigen::VectorXd& v) {
  int best = 0;
  for (int i = 1; i < v.size(); ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

}  // namespace

Action DqnAgent::select_action(const StateVector& state, double eps) {
  if (explore_rng_.uniform() < eps)
    return Action{explore_rng_.uniform_int(0, shape_.actions - 1)};
  return Action{argmax_lowest(q_values(state))};
}

Eigen::VectorXd DqnAgent::q_values(const StateVector& state) const {
  auto [sc, hi] = encoder_.encode_state(state);
  return online_.forward_one(sc, hi);
}

double DqnAgent::target_q(const Experience& e) const {
  if (e.terminal) return e.q;
  Eigen::VectorXd sc(encoder_.scalar_inputs());
  Eigen::VectorXd hi(encoder_.history_inputs());
  encoder_.encode_flat(e.next_state, sc.data(), hi.data());
  Eigen::VectorXd online_next = online_.forward_one(sc, hi);
  int pick = argmax_lowest(online_next);
  Eigen::VectorXd target_next = target_.forward_one(sc, hi);
  return e.q + gamma_ * target_next(pick);
}

double DqnAgent::train_step() {
  std::vector<std::size_t> idx = buffer_.sample_indices(batch_size_, sample_rng_);
  std::vector<const Experience*> batch(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) batch[k] = &buffer_.at(idx[k]);
  return train_step(batch);
}

double DqnAgent::train_step(const std::vector<const Experience*>& batch) {
  if (batch.empty()) throw std::invalid_argument("train_step: empty batch");
  const int B = static_cast<int>(batch.size());

  // Regression targets; batched like the main pass for speed.
  std::vector<const std::vector<double>*> next_flats;
  std::vector<int> next_rows(B, -1);
  for (int n = 0; n < B; ++n) {
    if (!batch[n]->terminal) {
      next_rows[n] = static_cast<int>(next_flats.size());
      next_flats.push_back(&batch[n]->next_state);
    }
  }
  Eigen::VectorXd targets(B);
  if (!next_flats.empty()) {
    auto [nsc, nhi] = encoder_.encode_batch(next_flats);
    Eigen::MatrixXd online_next = online_.forward(nsc, nhi);
    Eigen::MatrixXd target_next = target_.forward(nsc, nhi);
    for (int n = 0; n < B; ++n) {
      if (next_rows[n] < 0) {
        targets(n) = batch[n]->q;
      } else {
        Eigen::VectorXd row = online_next.row(next_rows[n]).transpose();
        int pick = argmax_lowest(row);
        targets(n) = batch[n]->q + gamma_ * target_next(next_rows[n], pick);
      }
    }
  } else {
    for (int n = 0; n < B; ++n) targets(n) = batch[n]->q;
  }

  std::vector<const std::vector<double>*> flats(B);
  for (int n = 0; n < B; ++n) flats[n] = &batch[n]->state;
  auto [sc, hi] = encoder_.encode_batch(flats);
  ForwardCache cache;
  Eigen::MatrixXd q = online_.forward(sc, hi, &cache);

  double loss = 0.0;
  Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(B, shape_.actions);
  for (int n = 0; n < B; ++n) {
    int a = batch[n]->action;
    if (a < 0 || a >= shape_.actions)
      throw std::out_of_range("train_step: action code out of range");
    double err = q(n, a) - targets(n);
    loss += err * err;
    dq(n, a) = 2.0 * err / B;
  }
  loss /= B;

  NetworkParams grads = online_.backward(cache, dq);
  optimizer_.apply(online_.mutable_params(), grads);
  ++train_steps_;
  if (train_steps_ % replace_threshold_ == 0) sync_target();
  return loss;
}

void DqnAgent::sync_target() { target_ = online_; }

namespace {

constexpr char kCheckpointMagic[8] = {'E', 'S', 'C', 'K', 'P', 'T', '0', '2'};

void write_u64(std::ostream& out, std::uint64_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& in) {
  std::uint64_t v = 0;
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw std::runtime_error("truncated checkpoint");
  return v;
}

void write_vec(std::ostream& out, const std::vector<double>& v) {
  write_u64(out, v.size());
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * v.size()));
}

void read_vec(std::istream& in, std::vector<double>& v) {
  std::uint64_t n = read_u64(in);
  if (n > (1u << 24)) throw std::runtime_error("corrupt checkpoint");
  v.resize(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(sizeof(double) * n));
  if (!in) throw std::runtime_error("truncated checkpoint");
}

// The engine's textual form round-trips its state exactly on one platform.
void write_engine(std::ostream& out, const std::mt19937_64& engine) {
  std::ostringstream text;
  text << engine;
  const std::string s = text.str();
  write_u64(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void read_engine(std::istream& in, std::mt19937_64& engine) {
  std::uint64_t n = read_u64(in);
  if (n > (1u << 16)) throw std::runtime_error("corrupt checkpoint");
  std::string s(n, '\0');
  in.read(s.data(), static_cast<std::streamsize>(n));
  if (!in) throw std::runtime_error("truncated checkpoint");
  std::istringstream text(s);
  text >> engine;
  if (!text) throw std::runtime_error("corrupt checkpoint");
}

}  // namespace

void ReplayBuffer::save(std::ostream& out) const {
  write_u64(out, store_.size());
  write_u64(out, next_);
  for (const Experience& e : store_) {
    std::int64_t id = e.task_id;
    out.write(reinterpret_cast<const char*>(&id), sizeof(id));
    write_vec(out, e.state);
    std::int32_t action = e.action;
    out.write(reinterpret_cast<const char*>(&action), sizeof(action));
    out.write(reinterpret_cast<const char*>(&e.q), sizeof(e.q));
    write_vec(out, e.next_state);
    const char terminal = e.terminal ? 1 : 0;
    out.write(&terminal, 1);
  }
}

void ReplayBuffer::load(std::istream& in) {
  const std::uint64_t n = read_u64(in);
  const std::uint64_t next = read_u64(in);
  if (n > capacity_ || next >= std::max<std::uint64_t>(n, 1))
    throw std::runtime_error("corrupt checkpoint");
  store_.assign(n, Experience{});
  next_ = next;
  for (Experience& e : store_) {
    std::int64_t id = 0;
    in.read(reinterpret_cast<char*>(&id), sizeof(id));
    e.task_id = id;
    read_vec(in, e.state);
    std::int32_t action = 0;
    in.read(reinterpret_cast<char*>(&action), sizeof(action));
    e.action = action;
    in.read(reinterpret_cast<char*>(&e.q), sizeof(e.q));
    read_vec(in, e.next_state);
    char terminal = 0;
    in.read(&terminal, 1);
    e.terminal = terminal != 0;
  }
  if (!in) throw std::runtime_error("truncated checkpoint");
}

void DqnAgent::save(std::ostream& out) const {
  save_params(out, online_.params());
  save_params(out, target_.params());
  optimizer_.save(out);
  out.write(reinterpret_cast<const char*>(&train_steps_), sizeof(train_steps_));
  buffer_.save(out);
  write_engine(out, explore_rng_.engine());
  write_engine(out, sample_rng_.engine());
}

void DqnAgent::load(std::istream& in) {
  load_params(in, online_.mutable_params());
  NetworkParams tgt = target_.params();
  load_params(in, tgt);
  target_.mutable_params() = tgt;
  optimizer_.load(in);
  in.read(reinterpret_cast<char*>(&train_steps_), sizeof(train_steps_));
  if (!in) throw std::runtime_error("truncated checkpoint");
  buffer_.load(in);
  read_engine(in, explore_rng_.engine());
  read_engine(in, sample_rng_.engine());
}

void save_checkpoint(std::ostream& out, const std::vector<DqnAgent>& agents) {
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  std::int64_t n = static_cast<std::int64_t>(agents.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const DqnAgent& a : agents) a.save(out);
  if (!out) throw std::runtime_error("checkpoint write failed");
}

void load_checkpoint(std::istream& in, std::vector<DqnAgent>& agents) {
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || !std::equal(magic, magic + 8, kCheckpointMagic))
    throw std::runtime_error("not a checkpoint file");
  std::int64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n != static_cast<std::int64_t>(agents.size()))
    throw std::runtime_error("checkpoint agent count mismatch");
  for (DqnAgent& a : agents) a.load(in);
}

}  // namespace edgesim
