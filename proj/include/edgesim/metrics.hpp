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
#include <string>
#include <vector>

#include "edgesim/world.hpp"

namespace edgesim {

// One evaluated (sweep value, policy) combination. Totals cover all eval
// episodes; avg_delay_slots averages completed tasks and is absent when
// nothing completed; avg_qoe is QoE accumulated per device per episode.
struct MetricsRow {
  double axis_value = 0.0;
  std::string policy;
  long completed = 0;
  double energy_j = 0.0;
  bool has_avg_delay = false;
  double avg_delay_slots = 0.0;
  double avg_qoe = 0.0;
  int episodes = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Running totals over evaluation episodes.
struct EvalAccumulator {
  long completed = 0;
  long dropped = 0;
  long finalized = 0;
  long arrivals = 0;
  int episodes = 0;
  double energy_j = 0.0;
  double qoe_sum = 0.0;
  double delay_sum_slots = 0.0;
  double discounted_return_sum = 0.0;

  void add(const EpisodeMetrics& em);
  MetricsRow finish(double axis_value, const std::string& policy, int num_devices,
                    std::uint64_t seed, const std::string& config_hash) const;
};

extern const char kMetricsSchema[];  // versioned first line of every CSV

std::string metrics_csv_header();
std::string metrics_csv_row(const MetricsRow& row);
std::string render_metrics_csv(const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> parse_metrics_csv(const std::string& text);

// Stable numeric formatting shared by all CSV/chart output.
std::string format_double(double v);

}  // namespace edgesim
