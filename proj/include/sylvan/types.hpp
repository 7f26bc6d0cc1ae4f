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

#include <cctype>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sylvan {

inline constexpr int kMaxBoardSize = 19;

enum class Player : std::uint8_t { Black = 0, White = 1 };

constexpr Player opponent(Player p) {
  return p == Player::Black ? Player::White : Player::Black;
}

constexpr char player_char(Player p) { return p == Player::Black ? 'B' : 'W'; }

// Contents of one intersection. Off marks the padding ring around the board.
enum class Stone : std::uint8_t { Empty = 0, Black = 1, White = 2, Off = 3 };

constexpr Stone stone_of(Player p) {
  return p == Player::Black ? Stone::Black : Stone::White;
}

constexpr Stone opposite(Stone s) {
  switch (s) {
    case Stone::Black:
      return Stone::White;
    case Stone::White:
      return Stone::Black;
    default:
      return s;
  }
}

struct Coord {
  int col = 0;
  int row = 0;  // 0 is the top row, matching SGF letter order.

  constexpr bool in_bounds(int size) const {
    return col >= 0 && col < size && row >= 0 && row < size;
  }
  constexpr int index(int size) const { return row * size + col; }
  static constexpr Coord from_index(int index, int size) {
    return Coord{index % size, index / size};
  }
  friend constexpr bool operator==(Coord, Coord) = default;
};

enum class MoveKind : std::uint8_t { Place, Pass, Resign };

struct Move {
  MoveKind kind = MoveKind::Pass;
  Coord coord{};

  static constexpr Move place(Coord c) { return Move{MoveKind::Place, c}; }
  static constexpr Move place(int col, int row) {
    return Move{MoveKind::Place, Coord{col, row}};
  }
  static constexpr Move pass() { return Move{MoveKind::Pass, {}}; }
  static constexpr Move resign() { return Move{MoveKind::Resign, {}}; }

  constexpr bool is_place() const { return kind == MoveKind::Place; }
  constexpr bool is_pass() const { return kind == MoveKind::Pass; }
  constexpr bool is_resign() const { return kind == MoveKind::Resign; }

  friend constexpr bool operator==(const Move& a, const Move& b) {
    if (a.kind != b.kind) return false;
    return a.kind != MoveKind::Place || a.coord == b.coord;
  }
};

// GTP vertex letters skip 'I'.
inline std::string to_gtp_vertex(Move m, int size) {
  if (m.is_pass()) return "pass";
  if (m.is_resign()) return "resign";
  char letter = static_cast<char>('A' + m.coord.col);
  if (letter >= 'I') ++letter;
  return std::string(1, letter) + std::to_string(size - m.coord.row);
}

inline std::optional<Move> parse_gtp_vertex(std::string_view text, int size) {
  std::string s;
  for (char ch : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (s == "pass") return Move::pass();
  if (s == "resign") return Move::resign();
  if (s.size() < 2 || s.size() > 3) return std::nullopt;
  char letter = s[0];
  if (letter < 'a' || letter > 'z' || letter == 'i') return std::nullopt;
  int col = letter - 'a';
  if (letter > 'i') --col;
  int number = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    number = number * 10 + (s[i] - '0');
  }
  Coord c{col, size - number};
  if (number < 1 || !c.in_bounds(size)) return std::nullopt;
  return Move::place(c);
}

enum class IllegalReason : std::uint8_t {
  OutOfBounds,
  Occupied,
  Suicide,
  Ko,
  Superko,
  NotAPlay,
};

constexpr const char* to_string(IllegalReason r) {
  switch (r) {
    case IllegalReason::OutOfBounds:
      return "out of bounds";
    case IllegalReason::Occupied:
      return "occupied";
    case IllegalReason::Suicide:
      return "suicide";
    case IllegalReason::Ko:
      return "ko";
    case IllegalReason::Superko:
      return "superko";
    case IllegalReason::NotAPlay:
      return "not a board move";
  }
  return "unknown";
}

class IllegalMove : public std::runtime_error {
 public:
  explicit IllegalMove(IllegalReason reason)
      : std::runtime_error(std::string("illegal move: ") + to_string(reason)),
        reason_(reason) {}
  IllegalReason reason() const { return reason_; }

 private:
  IllegalReason reason_;
};

}  // namespace sylvan
