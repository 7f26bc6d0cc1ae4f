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

// Acceptance run: one PASS/FAIL line per primary criterion, each with its
// measured numbers and runtime. Thresholds and runtime limits are fixed
// here. The exit status is 0 once every criterion has been evaluated,
// whatever the verdicts; it is non-zero only if the run itself breaks.
//
// Usage: acceptance [--report FILE] [criterion ...]

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "feature_oracle.hpp"
#include "gtp_golden.hpp"
#include "ladder_suite.hpp"
#include "sylvan/features.hpp"
#include "sylvan/harness.hpp"
#include "sylvan/ladder.hpp"
#include "sylvan/mcts.hpp"
#include "sylvan/sgf.hpp"
#include "tactical_suite.hpp"
#include "test_util.hpp"

namespace sylvan {
namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, a);
  return buf;
}

// Rules: 1,000 positions from uniform random games compared with the
// flood-fill oracles (liberties, group sizes, hash, ko, area score, and
// the legality and captures of every move), then the 100-game corpus
// replayed through the rules. Limit 60 s.
Verdict rules_oracle() {
  auto start = Clock::now();
  Rng rng(20260001);
  int positions = 0;
  int mismatches = 0;
  std::string first;
  const int sizes[] = {9, 13, 19};
  for (int game = 0; positions < 1000; ++game) {
    const int size = sizes[game % 3];
    auto line = testing::random_game(size, 3 * size * size, rng);
    std::set<testing::Grid> seen;
    // Every fourth position of the game, all of them compared.
    for (std::size_t i = 0; i < line.size() && positions < 1000; ++i) {
      seen.insert(testing::grid_of(line[i]));
      if (i % 4 != 0) continue;
      std::string why = testing::oracle_mismatch(line[i], seen, true);
      if (!why.empty()) {
        ++mismatches;
        if (first.empty()) first = why;
      }
      ++positions;
    }
  }
  int files = 0;
  int illegal = 0;
  for (const auto& e : std::filesystem::directory_iterator(std::string(SYLVAN_DATA_DIR) + "/corpus")) {
    if (e.path().extension() != ".sgf") continue;
    ++files;
    try {
      replay(parse_sgf(testing::read_file(e.path().string())));
    } catch (const std::exception&) {
      ++illegal;
    }
  }
  double t = seconds_since(start);
  Verdict v;
  v.pass = positions == 1000 && mismatches == 0 && files == 100 && illegal == 0 && t < 60;
  v.detail = std::to_string(positions) + " positions, " + std::to_string(mismatches) + " oracle mismatches" +
             (first.empty() ? "" : " (" + first + ")") + "; corpus " + std::to_string(files) + " games, " +
             std::to_string(illegal) + " with illegal moves; " + fmt("%.1f s (limit 60 s)", t);
  return v;
}

// Features: all 25 planes of 200 random positions against the reference
// extractor (binary planes exactly, real-valued ones within 1e-6), and
// exact equivariance under all 8 symmetries. Limit 60 s.
Verdict feature_oracle() {
  auto start = Clock::now();
  auto positions = testing::sample_positions(200, 20260002);
  int plane_mismatches = 0;
  int symmetry_mismatches = 0;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const Position& pos = positions[k];
    Player perspective = k % 2 ? Player::White : Player::Black;
    int rank = static_cast<int>(k % 10);
    auto fast = extract(pos, perspective, rank, FeatureSet::Extended);
    auto ref = testing::reference_extract(pos, perspective, rank);
    for (int p = 0; p < 25; ++p) {
      bool real_valued = p == planes::kOurHistory || p == planes::kOpponentHistory || p == planes::kPositionMask;
      for (int i = 0; i < pos.area(); ++i) {
        Coord c = Coord::from_index(i, pos.size());
        bool same = real_valued ? std::abs(fast.at(p, c) - ref.at(p, c)) <= 1e-6 : fast.at(p, c) == ref.at(p, c);
        if (!same) {
          ++plane_mismatches;
          break;
        }
      }
    }
    for (Symmetry s : kAllSymmetries) {
      if (extract(transform_position(pos, s), perspective, rank) != transform(fast, s)) ++symmetry_mismatches;
    }
  }
  double t = seconds_since(start);
  Verdict v;
  v.pass = plane_mismatches == 0 && symmetry_mismatches == 0 && t < 60;
  v.detail = "200 positions x 25 planes: " + std::to_string(plane_mismatches) + " plane mismatches; 8 symmetries: " +
             std::to_string(symmetry_mismatches) + " mismatches; " + fmt("%.1f s (limit 60 s)", t);
  return v;
}

// Ladders: 200 generated ladder / ladder-breaker positions, read_ladder
// against exhaustive alternating search. Limit 60 s.
Verdict ladder_suite() {
  auto start = Clock::now();
  auto cases = testing::generated_ladder_suite(200, 20260101);
  int agree = 0;
  int captured = 0;
  for (const auto& c : cases) {
    bool oracle = testing::oracle_ladder_captures(c.position, c.target);
    captured += oracle;
    agree += (read_ladder(c.position, c.target) == LadderResult::CapturedByLadder) == oracle;
  }
  double t = seconds_since(start);
  Verdict v;
  v.pass = cases.size() == 200 && agree == 200 && t < 60;
  v.detail = std::to_string(agree) + "/" + std::to_string(cases.size()) + " agree (" + std::to_string(captured) +
             " captured by ladder); " + fmt("%.1f s (limit 60 s)", t);
  return v;
}

Position midgame_9x9() {
  Rng rng(9);
  Position pos(9);
  for (int i = 0; i < 10; ++i) pos.apply(default_policy_move(pos, rng));
  return pos;
}

// Search invariants: n = 1 + sum of children's n on every node after
// 10,000 rollouts with 1 and 4 threads; two single-thread runs with the
// same seed give byte-identical trees.
Verdict mcts_invariants() {
  auto start = Clock::now();
  BuiltinEvaluator evaluator;
  SearchConfig cfg;
  cfg.rollouts = 10000;
  std::string detail;
  bool pass = true;
  for (int threads : {1, 4}) {
    cfg.threads = threads;
    Tree tree(midgame_9x9(), cfg, evaluator);
    tree.search(3);
    int violations = audit_tree(tree.root());
    pass = pass && violations == 0 && tree.root().visits() == 10000;
    detail += std::to_string(threads) + " thread(s): " + std::to_string(tree.root().visits()) + " root visits, " +
              std::to_string(count_nodes(tree.root())) + " nodes, " + std::to_string(violations) + " violations; ";
  }
  cfg.threads = 1;
  std::string dumps[2];
  for (auto& dump : dumps) {
    Tree tree(midgame_9x9(), cfg, evaluator);
    tree.search(77);
    dump_tree(tree.root(), 9, dump);
  }
  bool same = dumps[0] == dumps[1];
  pass = pass && same;
  detail += std::string("determinism: ") + (same ? "identical" : "DIFFERENT") + " (" + std::to_string(dumps[0].size()) +
            " bytes); " + fmt("%.1f s", seconds_since(start));
  return {pass, detail};
}

// Tactics: 50 constructed positions; search at 5,000 rollouts must solve at
// least 45, the raw policy at most 35. Limit 10 min.
Verdict tactical_strength() {
  auto start = Clock::now();
  auto cases = testing::tactical_suite();
  int raw = 0;
  for (const auto& c : cases) raw += c.solved_by(testing::raw_policy_move(c.position));
  int small = testing::solved_by_search(cases, 500);
  int large = testing::solved_by_search(cases, 5000);
  double t = seconds_since(start);
  Verdict v;
  v.pass = cases.size() == 50 && large >= 45 && raw <= 35 && t < 600;
  v.detail = "search(5000) " + std::to_string(large) + "/50 (need >= 45), raw policy " + std::to_string(raw) +
             "/50 (need <= 35), search(500) " + std::to_string(small) + "/50; " + fmt("%.0f s (limit 600 s)", t);
  return v;
}

std::string match_detail(const MatchReport& r) {
  std::ostringstream s;
  s.precision(3);
  s << "win rate " << r.mean << " +- " << r.stddev << " over " << r.games.size() << " games (groups";
  for (double m : r.group_means) s << " " << m;
  s << "), " << r.forfeits << " forfeits";
  return s.str();
}

MatchOptions acceptance_match() {
  MatchOptions o;
  o.groups = 2;
  o.games_per_group = 100;
  o.game.size = 9;
  o.game.komi = 7.5;
  o.seed = 20260003;
  return o;
}

// Search vs raw policy: MCTS with 1,000 rollouts against the raw builtin
// policy, 200 games on 9x9 at komi 7.5; win rate >= 0.70. Limit 30 min.
Verdict search_beats_policy() {
  auto start = Clock::now();
  MatchReport r = run_match(AgentSpec::parse("mcts:rollouts=1000"), AgentSpec::parse("policy"), acceptance_match());
  double t = seconds_since(start);
  return {r.mean >= 0.70 && r.forfeits == 0 && t < 1800,
          "mcts:rollouts=1000 vs policy: " + match_detail(r) + " (need >= 0.70); " + fmt("%.0f s (limit 1800 s)", t)};
}

// Expansion width: top-3 against top-20 at the same 1,000 rollouts, 200
// games on 9x9; top-3 win rate >= 0.55. Limit 30 min.
Verdict expansion_top3_vs_top20() {
  auto start = Clock::now();
  MatchOptions o = acceptance_match();
  o.seed = 20260004;
  MatchReport r = run_match(AgentSpec::parse("mcts:rollouts=1000,topk=3"), AgentSpec::parse("mcts:rollouts=1000,topk=20"), o);
  double t = seconds_since(start);
  return {r.mean >= 0.55 && r.forfeits == 0 && t < 1800,
          "top-3 vs top-20 at 1000 rollouts: " + match_detail(r) + " (need >= 0.55); " +
              fmt("%.0f s (limit 1800 s)", t)};
}

std::string cpu_model() {
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) return line.substr(line.find(':') + 2);
  }
  return "unknown cpu";
}

// Throughput: >= 5,000 full rollouts per second with 16 threads on 19x19.
Verdict throughput() {
  BuiltinEvaluator evaluator;
  BenchResult one = bench_rollouts(1, 3.0, evaluator);
  BenchResult sixteen = bench_rollouts(16, 5.0, evaluator);
  std::ostringstream s;
  s.precision(0);
  s << std::fixed << "16 threads: " << sixteen.rollouts_per_sec << " rollouts/s (need >= 5000; playout-only "
    << sixteen.playouts_per_sec << "/s); 1 thread: " << one.rollouts_per_sec << " rollouts/s (playout-only "
    << one.playouts_per_sec << "/s); hardware: " << std::thread::hardware_concurrency() << " hardware thread(s), "
    << cpu_model();
  return {sixteen.rollouts_per_sec >= 5000, s.str()};
}

// GTP: the scripted 20-command session reproduces the golden transcript.
Verdict gtp_golden() {
  const std::string dir = SYLVAN_TEST_DATA;
  std::string got = testing::run_golden_session(dir + "/gtp_session.gtp");
  std::string want = testing::read_file(dir + "/gtp_session.golden");
  bool same = !want.empty() && got == want;
  return {same, std::string(same ? "byte-identical" : "differs from") + " golden transcript (" +
                    std::to_string(want.size()) + " bytes)"};
}

struct Criterion {
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace
}  // namespace sylvan

int main(int argc, char** argv) {
  using namespace sylvan;
  const std::vector<Criterion> criteria = {
      {"rules-oracle", rules_oracle},
      {"feature-oracle", feature_oracle},
      {"ladder-suite", ladder_suite},
      {"mcts-invariants", mcts_invariants},
      {"tactical-strength", tactical_strength},
      {"search-beats-policy", search_beats_policy},
      {"expansion-top3-vs-top20", expansion_top3_vs_top20},
      {"throughput", throughput},
      {"gtp-golden", gtp_golden},
  };
  std::string report_path;
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    std::string arg = argv[i];
    if (arg == "--report" && i + 1 < argc) {
      report_path = argv[++i];
    } else {
      only.insert(arg);
    }
  }
  std::ostringstream report;
  int passed = 0;
  int run = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && !only.count(c.name)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      std::cerr << c.name << ": " << e.what() << "\n";
      return 2;
    }
    ++run;
    passed += v.pass;
    std::string line = std::string(v.pass ? "PASS " : "FAIL ") + c.name + ": " + v.detail;
    std::cout << line << std::endl;
    report << line << "\n";
  }
  std::string summary = "acceptance: " + std::to_string(passed) + "/" + std::to_string(run) + " criteria pass";
  std::cout << summary << std::endl;
  report << summary << "\n";
  if (!report_path.empty()) std::ofstream(report_path) << report.str();
  return 0;
}
