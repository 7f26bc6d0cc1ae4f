// Copyright 2026 The Sylvan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// sylvan: GTP engine, match runner, throughput benchmark and pattern-table
// export.

#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sylvan/gtp.hpp"
#include "sylvan/harness.hpp"
#include "sylvan/patterns.hpp"
#include "sylvan/policy.hpp"
#include "sylvan/wire.hpp"

namespace {

struct EngineFlags {
  sylvan::SearchConfig search;
  std::string evaluator = "builtin";
  std::string feature_set = "extended";
  std::string log_search;
  std::uint64_t seed = 1;
};

void add_search_flags(CLI::App* app, EngineFlags& f) {
  app->add_option("--rollouts", f.search.rollouts, "Rollouts per move")->capture_default_str();
  app->add_option("--threads", f.search.threads, "Search threads")->capture_default_str();
  app->add_option("--sigma", f.search.sigma, "Upper end of the uniform noise on win rates")->capture_default_str();
  app->add_option("--topk", f.search.max_children, "Maximum children per node")->capture_default_str();
  app->add_option("--min-moves", f.search.min_children, "Minimum children per node")->capture_default_str();
  app->add_option("--threshold", f.search.cumulative_threshold, "Cumulative probability cutoff for expansion")
      ->capture_default_str();
  app->add_option("--komi", f.search.komi, "Komi")->capture_default_str();
  app->add_option("--seed", f.seed, "Master seed")->capture_default_str();
}

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) return line.substr(line.find_first_not_of(' ', colon + 1));
    }
  }
  return "unknown";
}

int run_gtp(EngineFlags& f) {
  std::unique_ptr<sylvan::Evaluator> evaluator;
  if (f.evaluator == "builtin") {
    evaluator = std::make_unique<sylvan::BuiltinEvaluator>();
  } else {
    evaluator = std::make_unique<sylvan::RemoteEvaluator>(sylvan::wire::parse_endpoint(f.evaluator),
                                                          sylvan::wire::parse_feature_set(f.feature_set));
  }
  std::ofstream log;
  sylvan::EngineOptions options;
  options.search = f.search;
  options.seed = f.seed;
  if (!f.log_search.empty()) {
    log.open(f.log_search, std::ios::app);
    if (!log) throw std::runtime_error("cannot open search log " + f.log_search);
    options.search_log = &log;
  }
  sylvan::GtpEngine engine(options, *evaluator);
  engine.serve(std::cin, std::cout);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sylvan: Monte Carlo tree search Go engine"};
  app.require_subcommand(1);

  EngineFlags gtp_flags;
  CLI::App* gtp = app.add_subcommand("gtp", "Speak GTP on stdin/stdout");
  add_search_flags(gtp, gtp_flags);
  gtp->add_option("--evaluator", gtp_flags.evaluator, "builtin or tcp://host:port")->capture_default_str();
  gtp->add_option("--feature-set", gtp_flags.feature_set, "Planes sent to a remote evaluator")
      ->check(CLI::IsMember({"standard", "extended"}))
      ->capture_default_str();
  gtp->add_flag("--ponder", gtp_flags.search.ponder, "Search between commands");
  gtp->add_option("--log-search", gtp_flags.log_search, "Append one JSON line per genmove to this file");

  std::string spec_a = "mcts";
  std::string spec_b = "policy";
  std::string out_dir = "match";
  sylvan::MatchOptions match_options;
  CLI::App* match = app.add_subcommand("match", "Play engine A against engine B");
  match->add_option("--a", spec_a, "Engine A: mcts[:key=value,...] | policy | random | gtp:<command>")
      ->capture_default_str();
  match->add_option("--b", spec_b, "Engine B")->capture_default_str();
  match->add_option("--groups", match_options.groups, "Groups of games")->capture_default_str();
  match->add_option("--games", match_options.games_per_group, "Games per group")->capture_default_str();
  match->add_option("--size", match_options.game.size, "Board size")->capture_default_str();
  match->add_option("--komi", match_options.game.komi, "Komi")->capture_default_str();
  match->add_option("--opening-moves", match_options.game.opening_moves, "Opening moves drawn from the policy")
      ->capture_default_str();
  match->add_option("--seed", match_options.seed, "Master seed")->capture_default_str();
  match->add_option("--jobs", match_options.jobs, "Games played at once")->capture_default_str();
  match->add_option("--out", out_dir, "Directory for report.json and the SGF records")->capture_default_str();

  int bench_threads = 1;
  double bench_seconds = 5.0;
  EngineFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "Measure rollouts per second on a 19x19 mid-game position");
  bench->add_option("--threads", bench_threads, "Search threads")->capture_default_str();
  bench->add_option("--seconds", bench_seconds, "Duration of each measurement")->capture_default_str();
  bench->add_option("--topk", bench_flags.search.max_children, "Maximum children per node")->capture_default_str();

  std::string patterns_out;
  CLI::App* patterns = app.add_subcommand("patterns", "Print the builtin 3x3 pattern table");
  patterns->add_option("--out", patterns_out, "Write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gtp) return run_gtp(gtp_flags);
    if (*match) {
      auto a = sylvan::AgentSpec::parse(spec_a);
      auto b = sylvan::AgentSpec::parse(spec_b);
      auto report = sylvan::run_match(a, b, match_options);
      report.write(out_dir);
      std::cout << "A " << a.text << " vs B " << b.text << ": mean " << report.mean << " std " << report.stddev
                << " forfeits " << report.forfeits << "\n";
      return 0;
    }
    if (*bench) {
      sylvan::BuiltinEvaluator evaluator;
      auto r = sylvan::bench_rollouts(bench_threads, bench_seconds, evaluator, bench_flags.search);
      nlohmann::ordered_json j;
      j["threads"] = r.threads;
      j["seconds"] = r.seconds;
      j["rollouts"] = r.rollouts;
      j["rollouts_per_sec"] = r.rollouts_per_sec;
      j["playouts"] = r.playouts;
      j["playouts_per_sec"] = r.playouts_per_sec;
      j["hardware_threads"] = std::thread::hardware_concurrency();
      j["cpu"] = cpu_model();
      std::cout << j.dump() << "\n";
      return 0;
    }
    if (*patterns) {
      std::string text = sylvan::default_pattern_text();
      if (patterns_out.empty()) {
        std::cout << text;
      } else {
        std::ofstream(patterns_out) << text;
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "sylvan: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
