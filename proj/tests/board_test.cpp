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

#include "sylvan/board.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "gtest/gtest.h"
#include "sylvan/score.hpp"
#include "test_util.hpp"

namespace sylvan {
namespace {

using testing::brute_force_play;
using testing::flood_group;
using testing::Grid;
using testing::grid_of;
using testing::random_game;

// Fig. 2(a)-style ko: black captures at C2 (col 2,row 1), white may not
// retake at B2 immediately.
constexpr char kKoShape[] = R"(
    .XO..
    XO.O.
    .XO..
    .....
    .....)";

TEST(BoardTest, EmptyBoardHasAllPointsAndPass) {
  Position pos(19);
  auto moves = pos.legal_moves();
  EXPECT_EQ(moves.size(), 362u);
  EXPECT_TRUE(moves.back().is_pass());
}

TEST(BoardTest, KoRecaptureIsForbidden) {
  Position pos = Position::from_diagram(kKoShape, Player::Black);
  Position after = pos.play(Move::place(2, 1));
  EXPECT_EQ(after.at(Coord{1, 1}), Stone::Empty);
  ASSERT_TRUE(after.ko_point().has_value());
  EXPECT_EQ(*after.ko_point(), (Coord{1, 1}));
  EXPECT_EQ(after.legality(Move::place(1, 1)), IllegalReason::Ko);
  auto legal = after.legal_moves();
  EXPECT_EQ(std::count(legal.begin(), legal.end(), Move::place(1, 1)), 0);
  EXPECT_THROW(after.play(Move::place(1, 1)), IllegalMove);

  // After an exchange elsewhere the ko may be retaken.
  Position later = after.play(Move::place(4, 4)).play(Move::place(4, 3));
  EXPECT_FALSE(later.ko_point().has_value());
  EXPECT_TRUE(later.is_legal(Move::place(1, 1)));
}

TEST(BoardTest, CaptureRemovesGroupInAtari) {
  Position pos = Position::from_diagram(R"(
      .X...
      XOOX.
      .XX..
      .....
      .....)",
                                        Player::Black);
  ASSERT_EQ(pos.liberties_at(Coord{1, 1}), 1);
  Position captured = pos.play(Move::place(2, 0));
  EXPECT_EQ(captured.at(Coord{1, 1}), Stone::Empty);
  EXPECT_EQ(captured.at(Coord{2, 1}), Stone::Empty);
  EXPECT_EQ(captured.captures_by(Player::Black), 2);
  // (1,0)-(2,0) now touches (0,0), (3,0) and both captured points.
  EXPECT_EQ(captured.liberties_at(Coord{2, 0}), 4);
}

TEST(BoardTest, OwnEyeFillLegalButSuicideIllegal) {
  Position pos = Position::from_diagram(R"(
      .X.O.
      XX.OO
      .....
      .....
      .....)",
                                        Player::Black);
  // (0,0) is black's single eye: filling it leaves the group with libs.
  EXPECT_TRUE(pos.is_legal(Move::place(0, 0)));
  Position white_turn = Position::from_diagram(R"(
      .X.O.
      XX.OO
      .....
      .....
      .....)",
                                               Player::White);
  EXPECT_EQ(white_turn.legality(Move::place(0, 0)), IllegalReason::Suicide);
  EXPECT_EQ(white_turn.legality(Move::place(1, 0)), IllegalReason::Occupied);
  EXPECT_EQ(white_turn.legality(Move::place(9, 0)), IllegalReason::OutOfBounds);
}

TEST(BoardTest, SetupStonesKeepPlayerToMove) {
  Position pos(9);
  pos.add_setup_stone(Coord{2, 2}, Player::Black);
  pos.add_setup_stone(Coord{6, 6}, Player::Black);
  EXPECT_EQ(pos.to_move(), Player::Black);
  EXPECT_EQ(pos.stone_count(Player::Black), 2);
  EXPECT_THROW(pos.add_setup_stone(Coord{2, 2}, Player::White), IllegalMove);
}

TEST(BoardTest, GtpVertexRoundTrip) {
  EXPECT_EQ(to_gtp_vertex(Move::place(15, 3), 19), "Q16");
  EXPECT_EQ(to_gtp_vertex(Move::place(8, 0), 19), "J19");
  EXPECT_EQ(parse_gtp_vertex("q16", 19), Move::place(15, 3));
  EXPECT_EQ(parse_gtp_vertex("PASS", 19), Move::pass());
  EXPECT_FALSE(parse_gtp_vertex("I5", 19).has_value());
  EXPECT_FALSE(parse_gtp_vertex("A20", 19).has_value());
  for (int col = 0; col < 19; ++col) {
    for (int row = 0; row < 19; ++row) {
      Move m = Move::place(col, row);
      EXPECT_EQ(parse_gtp_vertex(to_gtp_vertex(m, 19), 19), m);
    }
  }
}

// Every cached group liberty equals a flood-fill recount; no group is left
// without liberties; the ko point is empty; the incremental hash matches a
// from-scratch recomputation; every seventh position also has the engine's
// legality and capture results compared with the brute-force checker under
// full-history repetition.
TEST(BoardTest, IncrementalStateMatchesOracles) {
  Rng rng(12345);
  int positions = 0;
  for (int game = 0; positions < 1000; ++game) {
    int size = game % 2 == 0 ? 9 : 13;
    auto line = random_game(size, 3 * size * size, rng);
    std::set<Grid> seen_grids;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const Position& pos = line[i];
      Grid g = grid_of(pos);
      bool passed = i > 0 && pos.last_move().is_pass();
      if (!passed) {
        EXPECT_FALSE(seen_grids.count(g)) << "superko violated at ply " << i;
      }
      seen_grids.insert(g);
      ASSERT_EQ(testing::oracle_mismatch(pos, seen_grids, i % 7 == 0), "") << "ply " << i << "\n" << pos.to_string();
      ++positions;
    }
  }
}

TEST(BoardTest, HashIgnoresMoveOrderButIncludesPlayerToMove) {
  Position a = Position(9).play(Move::place(2, 2)).play(Move::place(6, 6)).play(Move::place(2, 6));
  Position b = Position(9).play(Move::place(2, 6)).play(Move::place(6, 6)).play(Move::place(2, 2));
  EXPECT_EQ(a.hash(), b.hash());
  Position black_empty(9);
  Position white_empty = black_empty.play(Move::pass());
  EXPECT_NE(black_empty.hash(), white_empty.hash());
  EXPECT_EQ(black_empty.grid_hash(), white_empty.grid_hash());
}

TEST(BoardTest, NoHashCollisionsAmongDistinctGrids) {
  Rng rng(777);
  std::vector<std::pair<std::uint64_t, std::pair<Grid, int>>> entries;
  entries.reserve(1'000'000);
  while (entries.size() < 1'000'000) {
    for (const auto& pos : random_game(9, 400, rng)) {
      entries.push_back({pos.hash(), {grid_of(pos), static_cast<int>(pos.to_move())}});
      if (entries.size() == 1'000'000) break;
    }
  }
  std::sort(entries.begin(), entries.end());
  int collisions = 0;
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].first == entries[i - 1].first && entries[i].second != entries[i - 1].second) {
      ++collisions;
    }
  }
  EXPECT_EQ(collisions, 0);
}

TEST(ScoreTest, EmptyBoardAndSingleStone) {
  Position empty(19);
  ScoreResult s = tromp_taylor_score(empty, 7.5);
  EXPECT_EQ(s.black_points, 0);
  EXPECT_EQ(s.white_points, 0);
  EXPECT_DOUBLE_EQ(s.margin, -7.5);

  Position one = empty.play(Move::place(3, 3));
  s = tromp_taylor_score(one, 7.5);
  EXPECT_EQ(s.black_points, 361);
  EXPECT_EQ(s.white_points, 0);
  EXPECT_DOUBLE_EQ(s.margin, 353.5);
  EXPECT_EQ(format_score(s.margin), "B+353.5");
  EXPECT_EQ(format_score(-0.5), "W+0.5");
}

TEST(ScoreTest, FinalPositionsMatchRegionOracle) {
  Rng rng(99);
  for (int game = 0; game < 50; ++game) {
    int size = game % 3 == 0 ? 13 : 9;
    auto line = random_game(size, 4 * size * size, rng);
    const Position& final_pos = line.back();
    auto oracle = testing::oracle_score(grid_of(final_pos), size);
    ScoreResult s = tromp_taylor_score(final_pos, 7.5);
    EXPECT_EQ(s.black_points, oracle.black);
    EXPECT_EQ(s.white_points, oracle.white);
    EXPECT_EQ(s.neutral_points(final_pos.area()), oracle.neutral);
    EXPECT_DOUBLE_EQ(s.margin, oracle.black - oracle.white - 7.5);
  }
}

TEST(ScoreTest, ColorSwapSwapsPoints) {
  Rng rng(5);
  for (int game = 0; game < 20; ++game) {
    auto line = random_game(9, 60 + game * 5, rng);
    const Position& pos = line.back();
    Grid g = grid_of(pos);
    for (char& ch : g) ch = ch == 'X' ? 'O' : ch == 'O' ? 'X' : ch;
    std::string diagram;
    for (int row = 0; row < 9; ++row) diagram += g.substr(row * 9, 9) + "\n";
    Position swapped = Position::from_diagram(diagram, opponent(pos.to_move()));
    ScoreResult a = tromp_taylor_score(pos, 0.0);
    ScoreResult b = tromp_taylor_score(swapped, 0.0);
    EXPECT_EQ(a.black_points, b.white_points);
    EXPECT_EQ(a.white_points, b.black_points);
    EXPECT_LE(a.black_points + a.white_points, 81);
  }
}

}  // namespace
}  // namespace sylvan
