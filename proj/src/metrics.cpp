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

#include "edgesim/metrics.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace edgesim {

const char kMetricsSchema[] = "# edgesim-metrics-v1";

void EvalAccumulator::add(const EpisodeMetrics& em) {
  completed += em.completed;
  dropped += em.dropped;
  finalized += em.finalized;
  arrivals += em.arrivals;
  episodes += 1;
  energy_j += em.energy_j;
  qoe_sum += em.qoe_sum;
  delay_sum_slots += em.delay_sum_slots;
  discounted_return_sum += em.mean_discounted_return;
}

MetricsRow EvalAccumulator::finish(double axis_value, const std::string& policy,
                                   int num_devices, std::uint64_t seed,
                                   const std::string& config_hash) const {
  MetricsRow row;
  row.axis_value = axis_value;
  row.policy = policy;
  row.completed = completed;
  row.energy_j = energy_j;
  row.has_avg_delay = completed > 0;
  row.avg_delay_slots = completed > 0 ? delay_sum_slots / completed : 0.0;
  row.avg_qoe =
      episodes > 0 ? qoe_sum / (static_cast<double>(episodes) * num_devices) : 0.0;
  row.episodes = episodes;
  row.seed = seed;
  row.config_hash = config_hash;
  return row;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string metrics_csv_header() {
  return "axis_value,policy,completed,energy_j,avg_delay_slots,avg_qoe,episodes,"
         "seed,config_hash";
}

std::string metrics_csv_row(const MetricsRow& row) {
  std::ostringstream out;
  out << format_double(row.axis_value) << ',' << row.policy << ',' << row.completed
      << ',' << format_double(row.energy_j) << ','
      << (row.has_avg_delay ? format_double(row.avg_delay_slots) : std::string())
      << ',' << format_double(row.avg_qoe) << ',' << row.episodes << ',' << row.seed
      << ',' << row.config_hash;
  return out.str();
}

std::string render_metrics_csv(const std::vector<MetricsRow>& rows) {
  std::ostringstream out;
  out << kMetricsSchema << '\n' << metrics_csv_header() << '\n';
  for (const MetricsRow& r : rows) out << metrics_csv_row(r) << '\n';
  return out.str();
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::vector<MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::vector<MetricsRow> rows;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_header) {
      if (line != metrics_csv_header())
        throw std::runtime_error("unrecognized metrics CSV header: " + line);
      saw_header = true;
      continue;
    }
    std::vector<std::string> f = split_fields(line);
    if (f.size() != 9)
      throw std::runtime_error("malformed metrics CSV row: " + line);
    MetricsRow r;
    r.axis_value = std::stod(f[0]);
    r.policy = f[1];
    r.completed = std::stol(f[2]);
    r.energy_j = std::stod(f[3]);
    r.has_avg_delay = !f[4].empty();
    r.avg_delay_slots = r.has_avg_delay ? std::stod(f[4]) : 0.0;
    r.avg_qoe = std::stod(f[5]);
    r.episodes = std::stoi(f[6]);
    r.seed = std::stoull(f[7]);
    r.config_hash = f[8];
    rows.push_back(std::move(r));
  }
  if (!saw_header) throw std::runtime_error("metrics CSV has no header row");
  return rows;
}

}  // namespace edgesim
