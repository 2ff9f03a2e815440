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

#include "edgesim/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "edgesim/charts.hpp"
#include "edgesim/episode.hpp"

namespace edgesim {

SweepAxis parse_axis(const std::string& token) {
  if (token == "arrival_rate") return SweepAxis::kArrivalRate;
  if (token == "num_devices") return SweepAxis::kNumDevices;
  throw std::invalid_argument("unknown sweep axis '" + token +
                              "' (expected arrival_rate or num_devices)");
}

const char* axis_token(SweepAxis axis) {
  return axis == SweepAxis::kArrivalRate ? "arrival_rate" : "num_devices";
}

SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value) {
  SimConfig cfg = base;
  switch (axis) {
    case SweepAxis::kArrivalRate:
      cfg.arrival_rate = value;
      break;
    case SweepAxis::kNumDevices: {
      double rounded = std::round(value);
      if (std::abs(rounded - value) > 1e-9 || rounded < 1.0)
        throw std::invalid_argument("num_devices sweep value must be a positive integer");
      cfg.num_devices = static_cast<int>(rounded);
      break;
    }
  }
  validate(cfg);
  return cfg;
}

namespace {

// Forwards to an inner driver while appending every experience to a dump
// file, one serialized line each.
class DumpingDriver : public PolicyDriver {
 public:
  DumpingDriver(PolicyDriver& inner, std::ofstream& out) : inner_(inner), out_(out) {}
  void begin_episode(int episode_index) override { inner_.begin_episode(episode_index); }
  Action decide(int device, const StateVector& state) override {
    return inner_.decide(device, state);
  }
  void on_experience(const DeviceExperience& de) override {
    out_ << de.device << ',' << serialize_experience(de.experience) << '\n';
    inner_.on_experience(de);
  }

 private:
  PolicyDriver& inner_;
  std::ofstream& out_;
};

}  // namespace

RunResult run_point(const SimConfig& cfg, PolicyKind policy, const RunOptions& opt) {
  validate(cfg);
  RunResult result;

  SimConfig eval_cfg = cfg;
  eval_cfg.seed = derive_seed(cfg.seed, Stream::kEvalPhase);

  std::unique_ptr<PolicyDriver> driver;
  DqnDriver* learner = nullptr;
  if (policy == PolicyKind::kLearned) {
    auto d = std::make_unique<DqnDriver>(cfg, cfg.seed);
    learner = d.get();
    driver = std::move(d);
  } else {
    driver = std::make_unique<BaselineDriver>(policy, cfg.num_edges, cfg.seed);
  }

  if (learner && !opt.load_checkpoint_path.empty()) {
    std::ifstream in(opt.load_checkpoint_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint " + opt.load_checkpoint_path);
    load_checkpoint(in, learner->agents());
  } else if (learner) {
    SimConfig train_cfg = cfg;
    train_cfg.seed = derive_seed(cfg.seed, Stream::kTrainPhase);
    World train_world(train_cfg);
    learner->set_mode(AgentMode::kTrain);
    for (int ep = 0; ep < cfg.num_episodes; ++ep) {
      EpisodeMetrics em = run_episode(train_world, *learner, ep);
      if (opt.keep_episode_logs) {
        TrainEpisodeLog log;
        log.episode = ep;
        log.epsilon = learner->epsilon();
        log.loss_mean = learner->episode_loss_mean();
        log.qoe_sum = em.qoe_sum;
        log.completed = em.completed;
        result.train_episodes.push_back(log);
      }
    }
    if (!opt.save_checkpoint_path.empty()) {
      std::ofstream out(opt.save_checkpoint_path, std::ios::binary);
      if (!out)
        throw std::runtime_error("cannot write checkpoint " + opt.save_checkpoint_path);
      save_checkpoint(out, learner->agents());
    }
  }

  if (learner) learner->set_mode(AgentMode::kEval);

  std::ofstream dump;
  std::unique_ptr<DumpingDriver> dumper;
  PolicyDriver* eval_driver = driver.get();
  if (!opt.dump_experiences_path.empty()) {
    dump.open(opt.dump_experiences_path);
    if (!dump)
      throw std::runtime_error("cannot write " + opt.dump_experiences_path);
    dumper = std::make_unique<DumpingDriver>(*driver, dump);
    eval_driver = dumper.get();
  }

  World eval_world(eval_cfg);
  EvalAccumulator acc;
  for (int ep = 0; ep < cfg.eval_episodes; ++ep) {
    EpisodeMetrics em = run_episode(eval_world, *eval_driver, ep);
    acc.add(em);
    if (opt.keep_episode_logs) result.eval_episodes.push_back(em);
  }

  result.row = acc.finish(cfg.arrival_rate, policy_token(policy), cfg.num_devices,
                          cfg.seed, config_fingerprint(cfg));
  return result;
}

std::vector<RunResult> run_sweep(const SimConfig& base, const SweepRequest& req) {
  if (req.values.empty()) throw std::invalid_argument("sweep needs at least one value");
  if (req.policies.empty()) throw std::invalid_argument("sweep needs at least one policy");

  struct Point {
    SimConfig cfg;
    PolicyKind policy;
    double value;
  };
  std::vector<Point> points;
  for (double v : req.values) {
    SimConfig cfg = apply_axis(base, req.axis, v);
    for (PolicyKind p : req.policies) points.push_back({cfg, p, v});
  }

  std::vector<RunResult> results(points.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto work = [&]() {
    while (!failed.load()) {
      std::size_t k = next.fetch_add(1);
      if (k >= points.size()) return;
      try {
        RunOptions opt;
        opt.keep_episode_logs = req.keep_episode_logs;
        results[k] = run_point(points[k].cfg, points[k].policy, opt);
        results[k].row.axis_value = points[k].value;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };

  int jobs = std::max(1, std::min<int>(req.jobs, static_cast<int>(points.size())));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

void write_text_file_atomic(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

namespace {

struct MetricSpec {
  const char* key;
  const char* label;
  bool higher_better;
};
constexpr MetricSpec kMetricSpecs[] = {
    {"completed", "completed tasks", true},
    {"energy_j", "energy (J)", false},
    {"avg_delay_slots", "average delay (slots)", false},
    {"avg_qoe", "average QoE", true},
};

bool metric_value(const MetricsRow& row, const std::string& key, double* out) {
  if (key == "completed") { *out = static_cast<double>(row.completed); return true; }
  if (key == "energy_j") { *out = row.energy_j; return true; }
  if (key == "avg_delay_slots") {
    *out = row.avg_delay_slots;
    return row.has_avg_delay;
  }
  if (key == "avg_qoe") { *out = row.avg_qoe; return true; }
  return false;
}

}  // namespace

void write_sweep_outputs(const std::string& out_dir, SweepAxis axis,
                         const std::vector<RunResult>& results, bool charts) {
  std::filesystem::create_directories(out_dir);

  std::vector<MetricsRow> rows;
  rows.reserve(results.size());
  for (const RunResult& r : results) rows.push_back(r.row);
  write_text_file_atomic(out_dir + "/metrics.csv", render_metrics_csv(rows));

  // Policy order: first appearance; axis values: first appearance.
  std::vector<std::string> policies;
  std::vector<double> values;
  for (const MetricsRow& r : rows) {
    bool seen = false;
    for (const std::string& p : policies) seen = seen || p == r.policy;
    if (!seen) policies.push_back(r.policy);
    bool val_seen = false;
    for (double v : values) val_seen = val_seen || v == r.axis_value;
    if (!val_seen) values.push_back(r.axis_value);
  }

  auto find_row = [&](double value, const std::string& policy) -> const MetricsRow* {
    for (const MetricsRow& r : rows)
      if (r.axis_value == value && r.policy == policy) return &r;
    return nullptr;
  };

  for (const MetricSpec& spec : kMetricSpecs) {
    std::ostringstream csv;
    csv << kMetricsSchema << '\n' << "axis_value";
    for (const std::string& p : policies) csv << ',' << p;
    csv << '\n';
    std::vector<ChartSeries> series(policies.size());
    for (std::size_t pi = 0; pi < policies.size(); ++pi) series[pi].name = policies[pi];
    for (double v : values) {
      csv << format_double(v);
      for (std::size_t pi = 0; pi < policies.size(); ++pi) {
        const MetricsRow* r = find_row(v, policies[pi]);
        double x = 0.0;
        if (r && metric_value(*r, spec.key, &x)) {
          csv << ',' << format_double(x);
          series[pi].points.push_back({v, x});
        } else {
          csv << ',';
        }
      }
      csv << '\n';
    }
    write_text_file_atomic(out_dir + "/" + spec.key + ".csv", csv.str());
    if (charts) {
      std::string svg = render_line_chart_svg(spec.label, axis_token(axis),
                                              spec.label, series);
      write_text_file_atomic(out_dir + "/" + spec.key + ".svg", svg);
    }
  }

  bool any_logs = false;
  for (const RunResult& r : results)
    any_logs = any_logs || !r.eval_episodes.empty() || !r.train_episodes.empty();
  if (any_logs) {
    std::ostringstream ep;
    ep << kMetricsSchema << '\n'
       << "axis_value,policy,phase,episode,arrivals,completed,dropped,in_system,"
          "finalized,energy_j,qoe_sum,delay_sum_slots,experiences,"
          "mean_discounted_return,epsilon,loss_mean\n";
    for (const RunResult& r : results) {
      for (const TrainEpisodeLog& t : r.train_episodes) {
        ep << format_double(r.row.axis_value) << ',' << r.row.policy << ",train,"
           << t.episode << ",,,,,,," << format_double(t.qoe_sum) << ",,,,"
           << format_double(t.epsilon) << ',' << format_double(t.loss_mean) << '\n';
      }
      for (const EpisodeMetrics& m : r.eval_episodes) {
        ep << format_double(r.row.axis_value) << ',' << r.row.policy << ",eval,"
           << m.episode << ',' << m.arrivals << ',' << m.completed << ','
           << m.dropped << ',' << m.in_system << ',' << m.finalized << ','
           << format_double(m.energy_j) << ',' << format_double(m.qoe_sum) << ','
           << format_double(m.delay_sum_slots) << ',' << m.experiences << ','
           << format_double(m.mean_discounted_return) << ",,\n";
      }
    }
    write_text_file_atomic(out_dir + "/episodes.csv", ep.str());
  }
}

SummaryReport summarize_metrics(const std::vector<MetricsRow>& rows) {
  const std::string learned = policy_token(PolicyKind::kLearned);
  std::vector<double> values;
  std::vector<std::string> baselines;
  for (const MetricsRow& r : rows) {
    bool val_seen = false;
    for (double v : values) val_seen = val_seen || v == r.axis_value;
    if (!val_seen) values.push_back(r.axis_value);
    if (r.policy != learned) {
      bool seen = false;
      for (const std::string& b : baselines) seen = seen || b == r.policy;
      if (!seen) baselines.push_back(r.policy);
    }
  }

  auto find_row = [&](double value, const std::string& policy) -> const MetricsRow* {
    for (const MetricsRow& r : rows)
      if (r.axis_value == value && r.policy == policy) return &r;
    return nullptr;
  };

  std::ostringstream text, csv;
  csv << kMetricsSchema << '\n'
      << "axis_value,baseline,metric,dqn_value,baseline_value,improvement_pct,"
         "status\n";
  int regressions = 0;
  for (double v : values) {
    const MetricsRow* mine = find_row(v, learned);
    text << "axis value " << format_double(v) << ":\n";
    if (!mine) {
      text << "  no " << learned << " row (absent)\n";
      for (const std::string& b : baselines)
        for (const MetricSpec& spec : kMetricSpecs)
          csv << format_double(v) << ',' << b << ',' << spec.key
              << ",,,,absent\n";
      continue;
    }
    for (const std::string& b : baselines) {
      const MetricsRow* other = find_row(v, b);
      for (const MetricSpec& spec : kMetricSpecs) {
        double my_val = 0, other_val = 0;
        bool have_mine = metric_value(*mine, spec.key, &my_val);
        bool have_other = other && metric_value(*other, spec.key, &other_val);
        if (!have_mine || !have_other || other_val == 0.0) {
          csv << format_double(v) << ',' << b << ',' << spec.key << ','
              << (have_mine ? format_double(my_val) : std::string()) << ','
              << (have_other ? format_double(other_val) : std::string())
              << ",,absent\n";
          text << "  vs " << b << " on " << spec.label << ": absent\n";
          continue;
        }
        double gain = spec.higher_better
                          ? (my_val - other_val) / std::abs(other_val) * 100.0
                          : (other_val - my_val) / std::abs(other_val) * 100.0;
        bool worse = gain < 0.0;
        if (worse) ++regressions;
        csv << format_double(v) << ',' << b << ',' << spec.key << ','
            << format_double(my_val) << ',' << format_double(other_val) << ','
            << format_double(gain) << ',' << (worse ? "worse" : "ok") << '\n';
        char line[160];
        std::snprintf(line, sizeof(line), "  vs %-3s on %-22s %+.2f%%%s\n",
                      b.c_str(), spec.label, gain, worse ? "  [WORSE]" : "");
        text << line;
      }
    }
  }
  text << (regressions ? "regressions flagged: " + std::to_string(regressions) + "\n"
                       : "no regressions\n");
  SummaryReport rep;
  rep.text = text.str();
  rep.csv = csv.str();
  return rep;
}

}  // namespace edgesim
