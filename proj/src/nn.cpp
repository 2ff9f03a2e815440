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

#include "edgesim/nn.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace edgesim {

namespace {

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

Eigen::MatrixXd glorot_matrix(int rows, int cols, RngStream& rng) {
  double limit = std::sqrt(6.0 / (rows + cols));
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.uniform(-limit, limit);
  return m;
}

}  // namespace

NetShape shape_from_config(const SimConfig& cfg) {
  NetShape s;
  s.history_width = cfg.num_edges;
  s.history_steps = cfg.agent.history_steps;
  s.scalar_inputs = 4 + cfg.num_edges;
  s.lstm_hidden = cfg.agent.lstm_hidden;
  s.dense1 = cfg.agent.dense1_units;
  s.dense2 = cfg.agent.dense2_units;
  s.actions = cfg.num_edges + 1;
  return s;
}

NetworkParams NetworkParams::zeros(const NetShape& shape) {
  NetworkParams p;
  int H = shape.lstm_hidden;
  p.lstm_wx = Eigen::MatrixXd::Zero(4 * H, shape.history_width);
  p.lstm_wh = Eigen::MatrixXd::Zero(4 * H, H);
  p.lstm_b = Eigen::MatrixXd::Zero(4 * H, 1);
  p.w1 = Eigen::MatrixXd::Zero(shape.dense1, shape.scalar_inputs + H);
  p.b1 = Eigen::MatrixXd::Zero(shape.dense1, 1);
  p.w2 = Eigen::MatrixXd::Zero(shape.dense2, shape.dense1);
  p.b2 = Eigen::MatrixXd::Zero(shape.dense2, 1);
  p.wa = Eigen::MatrixXd::Zero(shape.actions, shape.dense2);
  p.ba = Eigen::MatrixXd::Zero(shape.actions, 1);
  p.wv = Eigen::MatrixXd::Zero(1, shape.dense2);
  p.bv = Eigen::MatrixXd::Zero(1, 1);
  return p;
}

NetworkParams NetworkParams::glorot(const NetShape& shape, RngStream& rng) {
  NetworkParams p = zeros(shape);
  int H = shape.lstm_hidden;
  p.lstm_wx = glorot_matrix(4 * H, shape.history_width, rng);
  p.lstm_wh = glorot_matrix(4 * H, H, rng);
  // Forget gate starts open so early training does not wipe the cell state.
  p.lstm_b.block(H, 0, H, 1).setConstant(1.0);
  p.w1 = glorot_matrix(shape.dense1, shape.scalar_inputs + H, rng);
  p.w2 = glorot_matrix(shape.dense2, shape.dense1, rng);
  p.wa = glorot_matrix(shape.actions, shape.dense2, rng);
  p.wv = glorot_matrix(1, shape.dense2, rng);
  return p;
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for_each([&](const Eigen::MatrixXd& m) { n += m.size(); });
  return n;
}

void NetworkParams::accumulate(const NetworkParams& other) {
  lstm_wx += other.lstm_wx; lstm_wh += other.lstm_wh; lstm_b += other.lstm_b;
  w1 += other.w1; b1 += other.b1; w2 += other.w2; b2 += other.b2;
  wa += other.wa; ba += other.ba; wv += other.wv; bv += other.bv;
}

bool NetworkParams::same_shape(const NetworkParams& other) const {
  bool ok = true;
  auto check = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    ok = ok && a.rows() == b.rows() && a.cols() == b.cols();
  };
  check(lstm_wx, other.lstm_wx); check(lstm_wh, other.lstm_wh);
  check(lstm_b, other.lstm_b);
  check(w1, other.w1); check(b1, other.b1);
  check(w2, other.w2); check(b2, other.b2);
  check(wa, other.wa); check(ba, other.ba);
  check(wv, other.wv); check(bv, other.bv);
  return ok;
}

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd& scalars,
                                  const Eigen::MatrixXd& history,
                                  ForwardCache* cache) const {
  const int B = static_cast<int>(scalars.rows());
  const int H = shape_.lstm_hidden;
  const int W = shape_.history_width;
  const int T = shape_.history_steps;
  if (scalars.cols() != shape_.scalar_inputs)
    throw std::invalid_argument("forward: scalar feature width mismatch");
  if (history.rows() != B || history.cols() != static_cast<long>(T) * W)
    throw std::invalid_argument("forward: history width mismatch");

  const NetworkParams& p = params_;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(B, H);
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(B, H);
  if (cache) {
    cache->scalars = scalars;
    cache->x.resize(T);
    cache->gi.resize(T); cache->gf.resize(T);
    cache->gg.resize(T); cache->go.resize(T);
    cache->c.resize(T); cache->tanh_c.resize(T);
    cache->h_prev.resize(T); cache->c_prev.resize(T);
  }
  for (int s = 0; s < T; ++s) {
    Eigen::MatrixXd x = history.middleCols(static_cast<long>(s) * W, W);
    Eigen::MatrixXd z = x * p.lstm_wx.transpose() + h * p.lstm_wh.transpose();
    z.rowwise() += p.lstm_b.col(0).transpose();
    Eigen::MatrixXd gi = sigmoid(z.middleCols(0, H));
    Eigen::MatrixXd gf = sigmoid(z.middleCols(H, H));
    Eigen::MatrixXd gg = z.middleCols(2 * H, H).array().tanh().matrix();
    Eigen::MatrixXd go = sigmoid(z.middleCols(3 * H, H));
    Eigen::MatrixXd c_next =
        (gf.array() * c.array() + gi.array() * gg.array()).matrix();
    Eigen::MatrixXd tanh_c = c_next.array().tanh().matrix();
    Eigen::MatrixXd h_next = (go.array() * tanh_c.array()).matrix();
    if (cache) {
      cache->x[s] = std::move(x);
      cache->gi[s] = gi; cache->gf[s] = gf;
      cache->gg[s] = gg; cache->go[s] = go;
      cache->c_prev[s] = c; cache->c[s] = c_next;
      cache->tanh_c[s] = tanh_c; cache->h_prev[s] = h;
    }
    h = std::move(h_next);
    c = std::move(c_next);
  }

  Eigen::MatrixXd concat(B, shape_.scalar_inputs + H);
  concat << scalars, h;
  Eigen::MatrixXd p1 = concat * p.w1.transpose();
  p1.rowwise() += p.b1.col(0).transpose();
  Eigen::MatrixXd d1 = p1.cwiseMax(0.0);
  Eigen::MatrixXd p2 = d1 * p.w2.transpose();
  p2.rowwise() += p.b2.col(0).transpose();
  Eigen::MatrixXd d2 = p2.cwiseMax(0.0);
  Eigen::MatrixXd adv = d2 * p.wa.transpose();
  adv.rowwise() += p.ba.col(0).transpose();
  Eigen::MatrixXd val = d2 * p.wv.transpose();
  val.rowwise() += p.bv.col(0).transpose();

  // Advantage is centered so value and advantage are identifiable.
  Eigen::VectorXd adv_mean = adv.rowwise().mean();
  Eigen::MatrixXd q = adv;
  q.colwise() -= adv_mean;
  q.colwise() += val.col(0);

  if (cache) {
    cache->h_last = h;
    cache->concat = std::move(concat);
    cache->p1 = std::move(p1); cache->d1 = std::move(d1);
    cache->p2 = std::move(p2); cache->d2 = std::move(d2);
    cache->adv = std::move(adv); cache->val = std::move(val);
    cache->q = q;
  }
  return q;
}

Eigen::VectorXd QNetwork::forward_one(const Eigen::VectorXd& scalars,
                                      const Eigen::VectorXd& history) const {
  Eigen::MatrixXd q = forward(scalars.transpose(), history.transpose());
  return q.row(0).transpose();
}

NetworkParams QNetwork::backward(const ForwardCache& cache,
                                 const Eigen::MatrixXd& dq) const {
  const NetworkParams& p = params_;
  const int H = shape_.lstm_hidden;
  const int T = shape_.history_steps;
  NetworkParams g = NetworkParams::zeros(shape_);

  // Dueling recombination: dV collects the whole row, the advantage sees
  // its own slot minus the row mean.
  Eigen::VectorXd dval = dq.rowwise().sum();
  Eigen::VectorXd row_mean = dq.rowwise().mean();
  Eigen::MatrixXd dadv = dq;
  dadv.colwise() -= row_mean;

  g.wa = dadv.transpose() * cache.d2;
  g.ba = dadv.colwise().sum().transpose();
  g.wv = dval.transpose() * cache.d2;
  g.bv(0, 0) = dval.sum();

  Eigen::MatrixXd dd2 = dadv * p.wa + dval * p.wv;
  Eigen::MatrixXd dp2 =
      (dd2.array() * (cache.p2.array() > 0.0).cast<double>()).matrix();
  g.w2 = dp2.transpose() * cache.d1;
  g.b2 = dp2.colwise().sum().transpose();

  Eigen::MatrixXd dd1 = dp2 * p.w2;
  Eigen::MatrixXd dp1 =
      (dd1.array() * (cache.p1.array() > 0.0).cast<double>()).matrix();
  g.w1 = dp1.transpose() * cache.concat;
  g.b1 = dp1.colwise().sum().transpose();

  Eigen::MatrixXd dconcat = dp1 * p.w1;
  Eigen::MatrixXd dh = dconcat.rightCols(H);
  Eigen::MatrixXd dc = Eigen::MatrixXd::Zero(dh.rows(), H);

  for (int s = T - 1; s >= 0; --s) {
    const Eigen::MatrixXd& gi = cache.gi[s];
    const Eigen::MatrixXd& gf = cache.gf[s];
    const Eigen::MatrixXd& gg = cache.gg[s];
    const Eigen::MatrixXd& go = cache.go[s];
    const Eigen::MatrixXd& tc = cache.tanh_c[s];

    Eigen::MatrixXd dgo = (dh.array() * tc.array()).matrix();
    dc.array() += dh.array() * go.array() * (1.0 - tc.array().square());
    Eigen::MatrixXd dgi = (dc.array() * gg.array()).matrix();
    Eigen::MatrixXd dgg = (dc.array() * gi.array()).matrix();
    Eigen::MatrixXd dgf = (dc.array() * cache.c_prev[s].array()).matrix();
    Eigen::MatrixXd dc_prev = (dc.array() * gf.array()).matrix();

    Eigen::MatrixXd dz(dh.rows(), 4 * H);
    dz.middleCols(0, H) =
        (dgi.array() * gi.array() * (1.0 - gi.array())).matrix();
    dz.middleCols(H, H) =
        (dgf.array() * gf.array() * (1.0 - gf.array())).matrix();
    dz.middleCols(2 * H, H) = (dgg.array() * (1.0 - gg.array().square())).matrix();
    dz.middleCols(3 * H, H) =
        (dgo.array() * go.array() * (1.0 - go.array())).matrix();

    g.lstm_wx += dz.transpose() * cache.x[s];
    g.lstm_wh += dz.transpose() * cache.h_prev[s];
    g.lstm_b += dz.colwise().sum().transpose();

    dh = dz * p.lstm_wh;
    dc = std::move(dc_prev);
  }
  return g;
}

Eigen::VectorXd forward_q(const QNetwork& net, const Eigen::VectorXd& scalars,
                          const Eigen::VectorXd& history) {
  return net.forward_one(scalars, history);
}

StateEncoder StateEncoder::from_config(const SimConfig& cfg) {
  StateEncoder e;
  e.num_edges = cfg.num_edges;
  e.history_steps = cfg.agent.history_steps;
  e.size_scale = cfg.task_size_max_bits;
  e.wait_scale = cfg.deadline_slots;
  double min_density = cfg.task_densities[0];
  for (double d : cfg.task_densities) min_density = std::min(min_density, d);
  e.backlog_scale = cfg.edge_cpu_hz * cfg.slot_seconds / min_density;
  e.load_scale = cfg.num_devices;
  return e;
}

void StateEncoder::encode_flat(const std::vector<double>& flat, double* scalars,
                               double* history) const {
  if (static_cast<int>(flat.size()) != StateVector::flat_size(num_edges, history_steps))
    throw std::invalid_argument("encode_flat: layout mismatch");
  scalars[0] = flat[0] / size_scale;
  scalars[1] = flat[1] / wait_scale;
  scalars[2] = flat[2] / wait_scale;
  for (int j = 0; j < num_edges; ++j) scalars[3 + j] = flat[3 + j] / backlog_scale;
  scalars[3 + num_edges] = flat[3 + num_edges];
  const int base = 4 + num_edges;
  for (int k = 0; k < history_steps * num_edges; ++k)
    history[k] = flat[base + k] / load_scale;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> StateEncoder::encode_state(
    const StateVector& s) const {
  std::vector<double> flat = s.flatten();
  Eigen::VectorXd sc(scalar_inputs());
  Eigen::VectorXd hi(history_inputs());
  encode_flat(flat, sc.data(), hi.data());
  return {sc, hi};
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> StateEncoder::encode_batch(
    const std::vector<const std::vector<double>*>& flats) const {
  // Filled transposed: columns of a column-major matrix are contiguous.
  Eigen::MatrixXd sc_t(scalar_inputs(), flats.size());
  Eigen::MatrixXd hi_t(history_inputs(), flats.size());
  for (std::size_t n = 0; n < flats.size(); ++n)
    encode_flat(*flats[n], sc_t.col(n).data(), hi_t.col(n).data());
  return {sc_t.transpose(), hi_t.transpose()};
}

void RmsProp::apply(NetworkParams& params, const NetworkParams& grads) {
  if (cache_.empty()) {
    grads.for_each([&](const Eigen::MatrixXd& g) {
      cache_.push_back(Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    });
  }
  // Walk both parameter sets in the shared traversal order.
  std::vector<Eigen::MatrixXd*> targets;
  params.for_each([&](Eigen::MatrixXd& m) { targets.push_back(&m); });
  std::vector<const Eigen::MatrixXd*> gmats;
  grads.for_each([&](const Eigen::MatrixXd& m) { gmats.push_back(&m); });
  for (std::size_t k = 0; k < targets.size(); ++k) {
    Eigen::MatrixXd& acc = cache_[k];
    const Eigen::MatrixXd& g = *gmats[k];
    acc = decay_ * acc + (1.0 - decay_) * g.cwiseProduct(g);
    targets[k]->array() -= lr_ * g.array() / (acc.array().sqrt() + eps_);
  }
}

void RmsProp::reset() { cache_.clear(); }

namespace {

void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  std::int64_t rows = m.rows(), cols = m.cols();
  out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
  out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
  out.write(reinterpret_cast<const char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * m.size()));
}

void read_matrix(std::istream& in, Eigen::MatrixXd& m) {
  std::int64_t rows = 0, cols = 0;
  in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
  in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
  if (!in || rows < 0 || cols < 0 || rows > (1 << 24) || cols > (1 << 24))
    throw std::runtime_error("corrupt parameter stream");
  m.resize(rows, cols);
  in.read(reinterpret_cast<char*>(m.data()),
          static_cast<std::streamsize>(sizeof(double) * m.size()));
  if (!in) throw std::runtime_error("truncated parameter stream");
}

}  // namespace

void save_params(std::ostream& out, const NetworkParams& p) {
  p.for_each([&](const Eigen::MatrixXd& m) { write_matrix(out, m); });
}

void load_params(std::istream& in, NetworkParams& p) {
  p.for_each([&](Eigen::MatrixXd& m) { read_matrix(in, m); });
}

void RmsProp::save(std::ostream& out) const {
  std::int64_t n = static_cast<std::int64_t>(cache_.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  for (const Eigen::MatrixXd& m : cache_) write_matrix(out, m);
}

void RmsProp::load(std::istream& in) {
  std::int64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (!in || n < 0 || n > 64) throw std::runtime_error("corrupt optimizer stream");
  cache_.resize(n);
  for (Eigen::MatrixXd& m : cache_) read_matrix(in, m);
}

}  // namespace edgesim
