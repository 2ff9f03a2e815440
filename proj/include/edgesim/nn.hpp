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

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "edgesim/config.hpp"
#include "edgesim/mdp.hpp"
#include "edgesim/rng.hpp"

namespace edgesim {

// Architecture: the load-history matrix runs through an LSTM row by row;
// its final hidden state, concatenated with the scalar features, feeds two
// ReLU layers and then separate advantage and value heads.
struct NetShape {
  int history_width = 0;   // LSTM input width (one load per edge node)
  int history_steps = 0;   // unrolled steps
  int scalar_inputs = 0;   // task size, two waits, backlogs, battery
  int lstm_hidden = 0;
  int dense1 = 0;
  int dense2 = 0;
  int actions = 0;

  bool operator==(const NetShape&) const = default;
};
NetShape shape_from_config(const SimConfig& cfg);

// All learnable parameters. Biases are column matrices so that one
// traversal order covers everything (optimizer slots, copies, checkpoints,
// finite-difference probes).
struct NetworkParams {
  // LSTM gate blocks stacked along rows in the order
  // [input; forget; cell candidate; output], each lstm_hidden rows.
  Eigen::MatrixXd lstm_wx;  // 4H x history_width
  Eigen::MatrixXd lstm_wh;  // 4H x H
  Eigen::MatrixXd lstm_b;   // 4H x 1
  Eigen::MatrixXd w1, b1;   // dense1 x (scalar_inputs + H), dense1 x 1
  Eigen::MatrixXd w2, b2;   // dense2 x dense1, dense2 x 1
  Eigen::MatrixXd wa, ba;   // actions x dense2, actions x 1
  Eigen::MatrixXd wv, bv;   // 1 x dense2, 1 x 1

  static NetworkParams zeros(const NetShape& shape);
  // Uniform Glorot fan-in/fan-out init; forget-gate bias starts at 1.
  static NetworkParams glorot(const NetShape& shape, RngStream& rng);

  template <typename F>
  void for_each(F&& f) {
    f(lstm_wx); f(lstm_wh); f(lstm_b);
    f(w1); f(b1); f(w2); f(b2);
    f(wa); f(ba); f(wv); f(bv);
  }
  template <typename F>
  void for_each(F&& f) const {
    f(lstm_wx); f(lstm_wh); f(lstm_b);
    f(w1); f(b1); f(w2); f(b2);
    f(wa); f(ba); f(wv); f(bv);
  }

  std::size_t parameter_count() const;
  void accumulate(const NetworkParams& other);  // this += other
  bool same_shape(const NetworkParams& other) const;
};

// Intermediate activations kept for the backward pass. Batch rows are
// independent samples.
struct ForwardCache {
  Eigen::MatrixXd scalars;             // B x scalar_inputs
  std::vector<Eigen::MatrixXd> x;      // steps of B x history_width
  std::vector<Eigen::MatrixXd> gi, gf, gg, go;  // gate activations, B x H
  std::vector<Eigen::MatrixXd> c, tanh_c, h_prev, c_prev;
  Eigen::MatrixXd h_last;
  Eigen::MatrixXd concat;              // B x (scalar_inputs + H)
  Eigen::MatrixXd p1, d1, p2, d2;      // pre/post activation dense layers
  Eigen::MatrixXd adv;                 // B x actions
  Eigen::MatrixXd val;                 // B x 1
  Eigen::MatrixXd q;                   // B x actions
};

class QNetwork {
 public:
  QNetwork() = default;
  QNetwork(const NetShape& shape, RngStream& rng)
      : shape_(shape), params_(NetworkParams::glorot(shape, rng)) {}

  // scalars: B x scalar_inputs; history: B x (steps*width), step-major
  // (columns [s*width, (s+1)*width) hold step s). Returns Q, B x actions.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& scalars,
                          const Eigen::MatrixXd& history,
                          ForwardCache* cache = nullptr) const;
  Eigen::VectorXd forward_one(const Eigen::VectorXd& scalars,
                              const Eigen::VectorXd& history) const;

  // Gradient of a scalar loss with upstream dL/dQ. Requires the cache of
  // the matching forward call.
  NetworkParams backward(const ForwardCache& cache,
                         const Eigen::MatrixXd& dq) const;

  const NetShape& shape() const { return shape_; }
  const NetworkParams& params() const { return params_; }
  NetworkParams& mutable_params() { return params_; }

 private:
  NetShape shape_;
  NetworkParams params_;
};

// Q-values for one state; `params` must match the encoder-produced
// layout described by `shape`.
Eigen::VectorXd forward_q(const QNetwork& net, const Eigen::VectorXd& scalars,
                          const Eigen::VectorXd& history);

// Maps raw state vectors to O(1)-scaled network inputs.
struct StateEncoder {
  int num_edges = 0;
  int history_steps = 0;
  double size_scale = 1.0;     // largest task size
  double wait_scale = 1.0;     // deadline window
  double backlog_scale = 1.0;  // one slot of full-capacity service
  double load_scale = 1.0;     // device count

  static StateEncoder from_config(const SimConfig& cfg);

  int scalar_inputs() const { return 4 + num_edges; }
  int history_inputs() const { return history_steps * num_edges; }

  // Writes scalar_inputs() and history_inputs() doubles respectively.
  void encode_flat(const std::vector<double>& flat, double* scalars,
                   double* history) const;
  std::pair<Eigen::VectorXd, Eigen::VectorXd> encode_state(const StateVector& s) const;
  // Batch of flattened states, one row each.
  std::pair<Eigen::MatrixXd, Eigen::MatrixXd> encode_batch(
      const std::vector<const std::vector<double>*>& flats) const;
};

// Per-parameter adaptive step sizes with an exponentially decayed second
// moment.
class RmsProp {
 public:
  RmsProp() = default;
  RmsProp(double learning_rate, double decay, double epsilon)
      : lr_(learning_rate), decay_(decay), eps_(epsilon) {}

  void apply(NetworkParams& params, const NetworkParams& grads);
  void reset();

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  double lr_ = 1e-3;
  double decay_ = 0.95;
  double eps_ = 1e-6;
  std::vector<Eigen::MatrixXd> cache_;
};

void save_params(std::ostream& out, const NetworkParams& p);
void load_params(std::istream& in, NetworkParams& p);

}  // namespace edgesim
