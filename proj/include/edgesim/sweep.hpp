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

#include <string>
#include <vector>

#include "edgesim/agent.hpp"
#include "edgesim/metrics.hpp"

namespace edgesim {

enum class SweepAxis { kArrivalRate, kNumDevices };
SweepAxis parse_axis(const std::string& token);
const char* axis_token(SweepAxis axis);

// Copy of `base` with the axis value applied (validated).
SimConfig apply_axis(const SimConfig& base, SweepAxis axis, double value);

struct TrainEpisodeLog {
  int episode = 0;
  double epsilon = 0.0;
  double loss_mean = 0.0;
  double qoe_sum = 0.0;
  long completed = 0;
};

struct RunOptions {
  bool keep_episode_logs = false;
  std::string load_checkpoint_path;  // learned policy: skip training
  std::string save_checkpoint_path;  // learned policy: persist after training
  std::string dump_experiences_path; // write eval-phase experiences
};

struct RunResult {
  MetricsRow row;
  std::vector<EpisodeMetrics> eval_episodes;     // when keep_episode_logs
  std::vector<TrainEpisodeLog> train_episodes;   // learned policy, verbose
};

// Trains (learned policy only) and evaluates one configuration. All
// policies evaluate against the same derived workload seed, so comparisons
// share identical arrival sequences.
RunResult run_point(const SimConfig& cfg, PolicyKind policy,
                    const RunOptions& opt = {});

struct SweepRequest {
  SweepAxis axis = SweepAxis::kArrivalRate;
  std::vector<double> values;
  std::vector<PolicyKind> policies;
  int jobs = 1;
  bool keep_episode_logs = false;
};

// Runs every (value, policy) combination; result order is values-major in
// request order regardless of worker scheduling.
std::vector<RunResult> run_sweep(const SimConfig& base, const SweepRequest& req);

void write_text_file_atomic(const std::string& path, const std::string& content);

// metrics.csv, one pivot CSV and one SVG chart per metric, and per-episode
// logs when kept.
void write_sweep_outputs(const std::string& out_dir, SweepAxis axis,
                         const std::vector<RunResult>& results, bool charts);

// Relative improvement of the learned policy against each baseline, per
// sweep point and metric; flags regressions and missing rows.
struct SummaryReport {
  std::string text;  // human-readable
  std::string csv;
};
SummaryReport summarize_metrics(const std::vector<MetricsRow>& rows);

}  // namespace edgesim
