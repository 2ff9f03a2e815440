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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "edgesim/sweep.hpp"

namespace {

using namespace edgesim;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool paper_scale = false;
  int episodes = 0;
  int eval_episodes = 0;
};

SimConfig build_config(const CommonArgs& args) {
  SimConfig cfg = args.paper_scale ? paper_scale_config() : SimConfig{};
  if (!args.config_path.empty()) {
    SimConfig from_file = load_config_file(args.config_path);
    if (args.paper_scale)
      throw std::invalid_argument("--paper-scale and --config are mutually exclusive");
    cfg = from_file;
  }
  if (args.seed_set) cfg.seed = args.seed;
  if (args.episodes > 0) cfg.num_episodes = args.episodes;
  if (args.eval_episodes > 0) cfg.eval_episodes = args.eval_episodes;
  validate(cfg);
  return cfg;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--seed", args.seed, "root RNG seed")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_flag("--paper-scale", args.paper_scale,
                "large-scale profile (50 devices, 5 edge nodes, 1000 episodes)");
  cmd->add_option("--episodes", args.episodes, "training episodes override");
  cmd->add_option("--eval-episodes", args.eval_episodes,
                  "evaluation episodes override");
}

std::vector<PolicyKind> parse_policy_list(const std::string& csv) {
  std::vector<PolicyKind> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(parse_policy(tok));
  }
  if (out.empty()) throw std::invalid_argument("empty policy list");
  return out;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size())
      throw std::invalid_argument("bad sweep value '" + tok + "'");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

int cmd_simulate(const CommonArgs& common, const std::string& policy_token_str,
                 const std::string& out_dir, bool verbose,
                 const std::string& dump_path, const std::string& save_ckpt,
                 const std::string& load_ckpt) {
  SimConfig cfg = build_config(common);
  PolicyKind policy = parse_policy(policy_token_str);
  RunOptions opt;
  opt.keep_episode_logs = verbose;
  opt.dump_experiences_path = dump_path;
  opt.save_checkpoint_path = save_ckpt;
  opt.load_checkpoint_path = load_ckpt;

  RunResult result = run_point(cfg, policy, opt);

  std::filesystem::create_directories(out_dir);
  std::vector<RunResult> results{result};
  write_sweep_outputs(out_dir, SweepAxis::kArrivalRate, results, /*charts=*/false);

  std::cout << metrics_csv_header() << '\n'
            << metrics_csv_row(result.row) << '\n';
  if (verbose) {
    std::cout << "eval episodes: " << result.eval_episodes.size() << '\n';
    for (const EpisodeMetrics& em : result.eval_episodes)
      std::cout << "  episode " << em.episode << ": arrivals " << em.arrivals
                << ", completed " << em.completed << ", dropped " << em.dropped
                << ", qoe " << format_double(em.qoe_sum) << ", energy "
                << format_double(em.energy_j) << " J\n";
  }
  std::cout << "outputs written to " << out_dir << '\n';
  return 0;
}

int cmd_sweep(const CommonArgs& common, const std::string& axis_str,
              const std::string& values_csv, const std::string& policies_csv,
              const std::string& out_dir, int jobs, bool verbose, bool no_charts) {
  SimConfig base = build_config(common);
  SweepRequest req;
  req.axis = parse_axis(axis_str);
  req.values = parse_value_list(values_csv);
  req.policies = parse_policy_list(policies_csv);
  req.jobs = jobs;
  req.keep_episode_logs = verbose;

  std::vector<RunResult> results = run_sweep(base, req);
  write_sweep_outputs(out_dir, req.axis, results, !no_charts);

  std::cout << metrics_csv_header() << '\n';
  for (const RunResult& r : results) std::cout << metrics_csv_row(r.row) << '\n';
  std::cout << "outputs written to " << out_dir << '\n';
  return 0;
}

int cmd_summarize(const std::string& csv_path, const std::string& out_dir) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("cannot open " + csv_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  SummaryReport rep = summarize_metrics(parse_metrics_csv(buf.str()));
  std::cout << rep.text;
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    write_text_file_atomic(out_dir + "/summary.csv", rep.csv);
    std::cout << "summary written to " << out_dir << "/summary.csv\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge offloading simulator and learner"};
  app.require_subcommand(1);

  CommonArgs sim_common;
  std::string sim_policy = "dqn";
  std::string sim_out = "out";
  std::string sim_dump, sim_save_ckpt, sim_load_ckpt;
  bool sim_verbose = false;
  CLI::App* sim = app.add_subcommand("simulate", "train/evaluate one configuration");
  add_common(sim, sim_common);
  sim->add_option("--policy", sim_policy, "lc, fo, rd, or dqn");
  sim->add_option("--out", sim_out, "output directory");
  sim->add_flag("--verbose", sim_verbose, "keep per-episode logs");
  sim->add_option("--dump-experiences", sim_dump,
                  "write evaluation experiences to this file");
  sim->add_option("--save-checkpoint", sim_save_ckpt,
                  "write trained agent parameters to this file");
  sim->add_option("--load-checkpoint", sim_load_ckpt,
                  "load agent parameters instead of training");

  CommonArgs sweep_common;
  std::string sweep_axis = "arrival_rate";
  std::string sweep_values;
  std::string sweep_policies = "dqn,lc,fo,rd";
  std::string sweep_out = "out";
  int sweep_jobs = 1;
  bool sweep_verbose = false, sweep_no_charts = false;
  CLI::App* swp = app.add_subcommand("sweep", "run a policy comparison over an axis");
  add_common(swp, sweep_common);
  swp->add_option("--axis", sweep_axis, "arrival_rate or num_devices");
  swp->add_option("--values", sweep_values, "comma-separated axis values")
      ->required();
  swp->add_option("--policies", sweep_policies, "comma-separated policy list");
  swp->add_option("--out", sweep_out, "output directory");
  swp->add_option("--jobs", sweep_jobs, "parallel workers");
  swp->add_flag("--verbose", sweep_verbose, "keep per-episode logs");
  swp->add_flag("--no-charts", sweep_no_charts, "skip SVG chart generation");

  std::string sum_csv;
  std::string sum_out;
  CLI::App* sum = app.add_subcommand("summarize", "compare policies in a metrics CSV");
  sum->add_option("--csv", sum_csv, "metrics.csv produced by sweep/simulate")
      ->required();
  sum->add_option("--out", sum_out, "directory for summary.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed())
      return cmd_simulate(sim_common, sim_policy, sim_out, sim_verbose, sim_dump,
                          sim_save_ckpt, sim_load_ckpt);
    if (swp->parsed())
      return cmd_sweep(sweep_common, sweep_axis, sweep_values, sweep_policies,
                       sweep_out, sweep_jobs, sweep_verbose, sweep_no_charts);
    if (sum->parsed()) return cmd_summarize(sum_csv, sum_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
