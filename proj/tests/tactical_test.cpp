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


#include <map>
#include <set>

#include "gtest/gtest.h"
#include "sylvan/mcts.hpp"
#include "tactical_suite.hpp"
#include "test_util.hpp"

namespace sylvan {
namespace {

using testing::Grid;

// Capture-within-d search on plain grids: every empty point plus pass for
// both sides, no repeated grid along a line.
bool grid_attacker_wins(const Grid& g, int n, int target, char color, int plies, bool attacker_to_move,
                        std::vector<Grid>& line) {
  if (g[target] != color) return true;
  if (plies == 0) return false;
  const int attacker_moves = attacker_to_move ? (plies + 1) / 2 : plies / 2;
  if (static_cast<int>(testing::flood_group(g, n, target).liberties.size()) > attacker_moves) return false;
  const char mover = attacker_to_move ? (color == 'X' ? 'O' : 'X') : color;
  auto try_next = [&](const Grid& next) {
    line.push_back(next);
    bool win = grid_attacker_wins(next, n, target, color, plies - 1, !attacker_to_move, line);
    line.pop_back();
    return win;
  };
  // Points next to the target first: only the order of the cut-offs
  // changes, every point is still tried.
  std::vector<int> order;
  std::vector<bool> queued(g.size(), false);
  for (int s : testing::flood_group(g, n, target).stones) {
    for (int u : testing::grid_neighbours(s, n)) {
      if (!queued[u]) order.push_back(u), queued[u] = true;
    }
  }
  for (int idx = 0; idx < n * n; ++idx) {
    if (!queued[idx]) order.push_back(idx);
  }
  for (int idx : order) {
    Grid next = testing::brute_force_play(g, n, idx, mover);
    if (next.empty() || std::find(line.begin(), line.end(), next) != line.end()) continue;
    bool win = try_next(next);
    if (attacker_to_move && win) return true;
    if (!attacker_to_move && !win) return false;
  }
  return try_next(g);  // pass
}

std::vector<Move> grid_solutions(const testing::TacticalCase& c) {
  const int n = c.position.size();
  const Grid root = testing::grid_of(c.position);
  const int target = c.target.index(n);
  const char color = root[target];
  const char me = c.position.to_move() == Player::Black ? 'X' : 'O';
  const bool capture = c.goal == testing::TacticalGoal::Capture;
  std::vector<Move> out;
  auto judge = [&](const Grid& next, Move m) {
    std::vector<Grid> line{root, next};
    bool captured = grid_attacker_wins(next, n, target, color, c.plies, !capture, line);
    if (capture == captured) out.push_back(m);
  };
  for (int idx = 0; idx < n * n; ++idx) {
    Grid next = testing::brute_force_play(root, n, idx, me);
    if (!next.empty()) judge(next, Move::place(Coord::from_index(idx, n)));
  }
  judge(root, Move::pass());
  return out;
}

const std::vector<testing::TacticalCase>& suite() {
  static const auto* cases = new std::vector<testing::TacticalCase>(testing::tactical_suite());
  return *cases;
}

TEST(TacticalSuiteTest, ShapeAndDeterminism) {
  const auto& cases = suite();
  ASSERT_EQ(cases.size(), 50u);
  std::map<std::string, int> families;
  std::set<std::uint64_t> hashes;
  for (const auto& c : cases) {
    ++families[c.family];
    hashes.insert(c.position.hash());
    EXPECT_EQ(c.position.size(), 9);
    EXPECT_FALSE(c.solutions.empty());
    EXPECT_LE(c.solutions.size(), 3u);
    EXPECT_NE(c.position.at(c.target), Stone::Empty);
    EXPECT_EQ(c.komi, std::floor(c.komi) + 0.5);
    for (Move m : c.solutions) EXPECT_TRUE(c.position.is_legal(m));
  }
  EXPECT_EQ(hashes.size(), 50u);
  EXPECT_EQ(families["capture"], 15);
  EXPECT_EQ(families["escape"], 15);
  EXPECT_EQ(families["ladder"], 10);
  EXPECT_EQ(families["counter-capture"], 10);

  auto again = testing::tactical_suite();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    EXPECT_EQ(again[i].position.hash(), cases[i].position.hash());
    EXPECT_EQ(again[i].solutions, cases[i].solutions);
    EXPECT_EQ(again[i].komi, cases[i].komi);
  }
}

TEST(TacticalSuiteTest, AnswersMatchGridMinimax) {
  for (const auto& c : suite()) {
    EXPECT_EQ(grid_solutions(c), c.solutions) << c.family << "\n" << c.position.to_string();
  }
}

TEST(TacticalSuiteTest, RawPolicyMissesEscapesAndLadderDirections) {
  std::map<std::string, int> solved;
  for (const auto& c : suite()) solved[c.family] += c.solved_by(testing::raw_policy_move(c.position));
  EXPECT_EQ(solved["capture"], 15);
  EXPECT_EQ(solved["counter-capture"], 10);
  // The decoy capture always outranks the escape.
  EXPECT_EQ(solved["escape"], 0);
}

int solved_by_search(int rollouts) { return testing::solved_by_search(suite(), rollouts); }

TEST(TacticalSuiteTest, MoreRolloutsSolveAtLeastAsMany) {
  const int small = solved_by_search(500);
  const int large = solved_by_search(5000);
  EXPECT_GE(large, small);
  std::cout << "tactical suite: 500 rollouts " << small << "/50, 5000 rollouts " << large << "/50\n";
}

}  // namespace
}  // namespace sylvan
