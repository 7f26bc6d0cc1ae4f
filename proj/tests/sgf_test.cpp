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

#include "sylvan/sgf.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gtest/gtest.h"
#include "sylvan/score.hpp"
#include "test_util.hpp"

namespace sylvan {
namespace {

TEST(SgfTest, ParsesLiteralRecord) {
  auto r = parse_sgf("(;SZ[19]KM[7.5];B[pd];W[dp])");
  EXPECT_EQ(r.board_size, 19);
  EXPECT_DOUBLE_EQ(r.komi, 7.5);
  ASSERT_EQ(r.moves.size(), 2u);
  EXPECT_EQ(r.moves[0], std::make_pair(Player::Black, Move::place(15, 3)));
  EXPECT_EQ(r.moves[1], std::make_pair(Player::White, Move::place(3, 15)));
}

TEST(SgfTest, IgnoresCommentsMarkupAndSideVariations) {
  auto r = parse_sgf(R"((;GM[1]FF[4]SZ[9]C[a comment with \] bracket]PB[Alice]BR[3d]
      ;B[ee]C[]LB[dd:A]
      (;W[cc];B[gg])
      (;W[gc];B[cg])))");
  EXPECT_EQ(r.board_size, 9);
  EXPECT_EQ(r.black_name, "Alice");
  EXPECT_EQ(r.black_rank, "3d");
  ASSERT_EQ(r.moves.size(), 3u);
  EXPECT_EQ(r.moves[1].second, Move::place(2, 2));
  EXPECT_EQ(r.moves[2].second, Move::place(6, 6));
}

TEST(SgfTest, PassConventions) {
  auto r = parse_sgf("(;SZ[19];B[];W[tt];B[aa])");
  ASSERT_EQ(r.moves.size(), 3u);
  EXPECT_TRUE(r.moves[0].second.is_pass());
  EXPECT_TRUE(r.moves[1].second.is_pass());
  EXPECT_EQ(r.moves[2].second, Move::place(0, 0));
}

TEST(SgfTest, ParseErrorsCarryOffset) {
  try {
    parse_sgf("(;SZ[19];B[pd]");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 14u);
  }
  EXPECT_THROW(parse_sgf(";B[pd])"), ParseError);
  EXPECT_THROW(parse_sgf("(;SZ[9];B[zz])"), ParseError);
  EXPECT_THROW(parse_sgf("(;SZ[abc])"), ParseError);
  EXPECT_THROW(parse_sgf("(;B[pd"), ParseError);
}

TEST(SgfTest, HandicapSetupAndReplay) {
  auto r = parse_sgf("(;SZ[9]HA[2]KM[0.5]AB[cc][gg];W[gc];B[cg])");
  EXPECT_EQ(r.handicap, 2);
  ASSERT_EQ(r.setup.size(), 2u);
  Position pos = replay(r);
  EXPECT_EQ(pos.stone_count(Player::Black), 3);
  EXPECT_EQ(pos.stone_count(Player::White), 1);
  EXPECT_EQ(pos.to_move(), Player::White);
}

TEST(SgfTest, IllegalRecordIsReported) {
  auto occupied = parse_sgf("(;SZ[9];B[ee];W[ee])");
  try {
    replay(occupied);
    FAIL();
  } catch (const IllegalMoveInRecord& e) {
    EXPECT_EQ(e.move_index(), 1u);
  }
  EXPECT_THROW(replay(parse_sgf("(;SZ[9];B[ee];B[cc])")), IllegalMoveInRecord);
}

// Round-trip is a fixed point and replay bookkeeping holds on random games:
// stones on the board = stones placed - stones captured.
TEST(SgfTest, RoundTripAndReplayBookkeeping) {
  Rng rng(4242);
  for (int game = 0; game < 30; ++game) {
    int size = game % 2 ? 19 : 9;
    auto line = testing::random_game(size, size == 19 ? 200 : 120, rng);
    GameRecord r;
    r.board_size = size;
    r.komi = 7.5;
    r.result = "W+R";
    r.white_name = "a]b\\c";
    for (std::size_t i = 1; i < line.size(); ++i) {
      r.moves.emplace_back(line[i - 1].to_move(), line[i].last_move());
    }
    std::string text = serialize_sgf(r);
    GameRecord parsed = parse_sgf(text);
    EXPECT_EQ(parsed, r);
    EXPECT_EQ(serialize_sgf(parsed), text);

    Position end = replay(parsed);
    int placed_black = 0;
    int placed_white = 0;
    for (const auto& [who, m] : parsed.moves) {
      if (!m.is_place()) continue;
      (who == Player::Black ? placed_black : placed_white)++;
    }
    EXPECT_EQ(end.stone_count(Player::Black), placed_black - end.captures_by(Player::White));
    EXPECT_EQ(end.stone_count(Player::White), placed_white - end.captures_by(Player::Black));
    EXPECT_EQ(end.hash(), line.back().hash());
  }
}

// The checked-in corpus: 100 self-play games from the match harness on
// 9x9, 13x13 and 19x19. Each is replayed through the rules and, move by
// move, through the flood-fill oracle, which also checks positional
// superko by remembering every grid.
TEST(SgfCorpusTest, HundredGamesReplayWithoutIllegalMoves) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(std::string(SYLVAN_DATA_DIR) + "/corpus")) {
    if (e.path().extension() == ".sgf") files.push_back(e.path());
  }
  ASSERT_EQ(files.size(), 100u);
  std::set<int> sizes;
  int captures = 0;
  for (const auto& path : files) {
    std::ifstream in(path);
    std::stringstream text;
    text << in.rdbuf();
    GameRecord rec = parse_sgf(text.str());
    sizes.insert(rec.board_size);
    Position end;
    ASSERT_NO_THROW(end = replay(rec)) << path;

    const int n = rec.board_size;
    testing::Grid grid(static_cast<std::size_t>(n * n), '.');
    std::set<testing::Grid> seen{grid};
    for (const auto& [who, m] : rec.moves) {
      if (!m.is_place()) continue;
      testing::Grid next = testing::brute_force_play(grid, n, m.coord.index(n), who == Player::Black ? 'X' : 'O');
      ASSERT_FALSE(next.empty()) << path << ": occupied or suicide";
      ASSERT_TRUE(seen.insert(next).second) << path << ": repeats an earlier position";
      captures += static_cast<int>(std::count(grid.begin(), grid.end(), '.')) + 1 -
                  static_cast<int>(std::count(next.begin(), next.end(), '.'));
      grid = std::move(next);
    }
    EXPECT_EQ(testing::grid_of(end), grid) << path;
    const std::string& re = rec.result;
    if (!re.empty() && re.back() != 'R' && re.back() != 'F') {
      auto oracle = testing::oracle_score(grid, n);
      EXPECT_EQ(format_score(oracle.black - oracle.white - rec.komi), re) << path;
    }
  }
  EXPECT_EQ(sizes, (std::set<int>{9, 13, 19}));
  EXPECT_GT(captures, 100);  // the corpus exercises captures
}

}  // namespace
}  // namespace sylvan
