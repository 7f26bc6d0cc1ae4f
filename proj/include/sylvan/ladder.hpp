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

#pragma once

// Ladder reading: the attacker keeps the target in atari, the defender
// extends from atari (or captures an adjacent attacker group in atari), and
// the ladder works if the target runs out of liberties before it reaches
// three or the depth cap.

#include <algorithm>
#include <array>
#include <optional>
#include <stdexcept>

#include "sylvan/board.hpp"

namespace sylvan {

enum class LadderResult { CapturedByLadder, Escapes, NotALadder };

inline const char* to_string(LadderResult r) {
  switch (r) {
    case LadderResult::CapturedByLadder:
      return "captured";
    case LadderResult::Escapes:
      return "escapes";
    default:
      return "not-a-ladder";
  }
}

inline constexpr int kLadderDepthCap = 64;

namespace detail {

inline int sorted_liberties(const Position& pos, Vertex v, std::array<Vertex, 4>& out) {
  int n = pos.group_liberties(v, out.data(), static_cast<int>(out.size()));
  std::sort(out.begin(), out.begin() + n);
  return n;
}

bool ladder_attack(const Position& pos, Vertex target, int depth, int cap);

// Defender to move, target in atari. True if every defence fails.
inline bool ladder_defence_fails(const Position& pos, Vertex target, int depth, int cap) {
  if (depth >= cap) return false;
  const Stone defender = pos.stone(target);
  const Stone attacker = opposite(defender);
  std::array<Vertex, 8> moves{};
  int n = 0;
  auto add = [&](Vertex v) {
    if (std::find(moves.begin(), moves.begin() + n, v) == moves.begin() + n && n < static_cast<int>(moves.size())) {
      moves[n++] = v;
    }
  };
  std::array<Vertex, 4> libs{};
  if (sorted_liberties(pos, target, libs) >= 1) add(libs[0]);
  // Counter-captures of attacker groups touching the target.
  const Vertex root = pos.group_root(target);
  Vertex s = root;
  do {
    for (int d : pos.dirs()) {
      Vertex u = static_cast<Vertex>(s + d);
      if (pos.stone(u) == attacker && pos.group_libs(u) == 1) {
        std::array<Vertex, 4> lib{};
        sorted_liberties(pos, u, lib);
        add(lib[0]);
      }
    }
    s = pos.next_in_group(s);
  } while (s != root);
  std::sort(moves.begin(), moves.begin() + n);

  for (int i = 0; i < n; ++i) {
    if (!pos.is_legal_vertex(moves[i])) continue;
    Position next = pos;
    next.apply_place(moves[i]);
    int after = next.group_libs(target);
    if (after >= 3) return false;
    if (after == 2 && !ladder_attack(next, target, depth + 1, cap)) return false;
  }
  return true;
}

// Attacker to move, target with two liberties. True if some atari works.
inline bool ladder_attack(const Position& pos, Vertex target, int depth, int cap) {
  if (depth >= cap) return false;
  std::array<Vertex, 4> libs{};
  int n = sorted_liberties(pos, target, libs);
  for (int i = 0; i < n; ++i) {
    if (!pos.is_legal_vertex(libs[i])) continue;
    Position next = pos;
    next.apply_place(libs[i]);
    if (next.stone(target) == Stone::Empty) return true;
    if (next.group_libs(target) == 1 && ladder_defence_fails(next, target, depth + 1, cap)) return true;
  }
  return false;
}

inline Vertex checked_target(const Position& pos, Coord target) {
  if (!target.in_bounds(pos.size())) throw std::invalid_argument("ladder target off the board");
  Vertex v = pos.vertex(target);
  if (!Position::is_stone(pos.stone(v))) throw std::invalid_argument("ladder target is not a stone");
  return v;
}

}  // namespace detail

// Reads the ladder on the group at `target`. With two liberties the
// attacker moves first; with one the defender does. The side to move in
// `pos` is ignored and `pos` is not modified.
inline LadderResult read_ladder(const Position& pos, Coord target, int depth_cap = kLadderDepthCap) {
  Vertex v = detail::checked_target(pos, target);
  const Stone defender = pos.stone(v);
  const Player defender_player = defender == Stone::Black ? Player::Black : Player::White;
  int libs = pos.group_libs(v);
  if (libs < 1 || libs > 2) return LadderResult::NotALadder;
  Position scratch = pos;
  if (libs == 1) {
    scratch.set_to_move(defender_player);
    return detail::ladder_defence_fails(scratch, v, 0, depth_cap) ? LadderResult::CapturedByLadder
                                                                  : LadderResult::Escapes;
  }
  scratch.set_to_move(opponent(defender_player));
  return detail::ladder_attack(scratch, v, 0, depth_cap) ? LadderResult::CapturedByLadder : LadderResult::Escapes;
}

// The first atari (by point index) that captures the two-liberty group at
// `target` in a ladder, if any.
inline std::optional<Move> ladder_capture_move(const Position& pos, Coord target, int depth_cap = kLadderDepthCap) {
  Vertex v = detail::checked_target(pos, target);
  if (pos.group_libs(v) != 2) return std::nullopt;
  Position scratch = pos;
  scratch.set_to_move(pos.stone(v) == Stone::Black ? Player::White : Player::Black);
  std::array<Vertex, 4> libs{};
  int n = detail::sorted_liberties(scratch, v, libs);
  for (int i = 0; i < n; ++i) {
    if (!scratch.is_legal_vertex(libs[i])) continue;
    Position next = scratch;
    next.apply_place(libs[i]);
    if (next.group_libs(v) == 1 && detail::ladder_defence_fails(next, v, 1, depth_cap)) {
      return Move::place(pos.coord(libs[i]));
    }
  }
  return std::nullopt;
}

}  // namespace sylvan
