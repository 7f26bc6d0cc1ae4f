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

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sylvan/random.hpp"
#include "sylvan/types.hpp"

namespace sylvan {

// Vertices index a board padded with one ring of Off points, so every
// on-board point has four in-range neighbours.
using Vertex = std::int16_t;

inline constexpr int kMaxStride = kMaxBoardSize + 2;
inline constexpr int kMaxVertices = kMaxStride * kMaxStride;
inline constexpr int kMaxPoints = kMaxBoardSize * kMaxBoardSize;
// Vertex 0 is a padding corner on every board size.
inline constexpr Vertex kNoVertex = 0;

namespace detail {

struct ZobristKeys {
  std::array<std::array<std::uint64_t, kMaxVertices>, 2> stone{};
  std::uint64_t white_to_move = 0;
  std::uint64_t empty_board = 0;
};

inline ZobristKeys make_zobrist_keys() {
  ZobristKeys keys;
  Rng rng(0x9a7e5b0a2d1f4c63ULL);
  for (auto& color : keys.stone) {
    for (auto& k : color) k = rng();
  }
  keys.white_to_move = rng();
  keys.empty_board = rng();
  return keys;
}

inline const ZobristKeys kZobrist = make_zobrist_keys();

inline std::uint64_t stone_key(Stone s, int v) {
  return kZobrist.stone[s == Stone::Black ? 0 : 1][v];
}

}  // namespace detail

// Open-addressing set of grid hashes seen earlier in the game, used for
// positional superko. Copying is a flat vector copy.
class HashHistory {
 public:
  HashHistory() : slots_(64, 0) {}

  bool contains(std::uint64_t h) const {
    if (h == 0) return has_zero_;
    std::size_t mask = slots_.size() - 1;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      if (slots_[i] == h) return true;
      if (slots_[i] == 0) return false;
    }
  }

  void insert(std::uint64_t h) {
    if (h == 0) {
      has_zero_ = true;
      return;
    }
    if (2 * (count_ + 1) > slots_.size()) grow();
    if (insert_slot(slots_, h)) ++count_;
  }

  std::size_t size() const { return count_ + (has_zero_ ? 1 : 0); }

 private:
  static bool insert_slot(std::vector<std::uint64_t>& slots, std::uint64_t h) {
    std::size_t mask = slots.size() - 1;
    for (std::size_t i = h & mask;; i = (i + 1) & mask) {
      if (slots[i] == h) return false;
      if (slots[i] == 0) {
        slots[i] = h;
        return true;
      }
    }
  }

  void grow() {
    std::vector<std::uint64_t> bigger(slots_.size() * 2, 0);
    for (auto h : slots_) {
      if (h != 0) insert_slot(bigger, h);
    }
    slots_.swap(bigger);
  }

  std::vector<std::uint64_t> slots_;
  std::size_t count_ = 0;
  bool has_zero_ = false;
};

// Full game state. Groups are circular stone lists with an exact liberty
// count cached at the group root. Copying is cheap enough to use
// copy-on-play in the search tree; apply() mutates in place for playouts.
class Position {
 public:
  explicit Position(int size = kMaxBoardSize) : size_(size), stride_(size + 2) {
    if (size < 2 || size > kMaxBoardSize) {
      throw std::invalid_argument("board size must be in [2, 19]");
    }
    board_.fill(Stone::Off);
    parent_.fill(kNoVertex);
    next_.fill(kNoVertex);
    libs_.fill(0);
    stones_.fill(0);
    age_.fill(0);
    empty_idx_.fill(-1);
    dirs_ = {static_cast<int>(-stride_), -1, 1, static_cast<int>(stride_)};
    diags_ = {-stride_ - 1, -stride_ + 1, stride_ - 1, stride_ + 1};
    for (int row = 0; row < size_; ++row) {
      for (int col = 0; col < size_; ++col) {
        Vertex v = vertex(Coord{col, row});
        board_[v] = Stone::Empty;
        empty_idx_[v] = static_cast<std::int16_t>(empty_count_);
        empty_[empty_count_++] = v;
      }
    }
    grid_hash_ = detail::kZobrist.empty_board;
    history_.insert(grid_hash_);
  }

  // Builds a position from rows of 'X' (black), 'O' (white) and '.'.
  // Whitespace is ignored; the board must be square.
  static Position from_diagram(std::string_view diagram, Player to_move) {
    std::vector<std::string> rows;
    std::string current;
    for (char ch : diagram) {
      if (ch == '\n') {
        if (!current.empty()) rows.push_back(current);
        current.clear();
      } else if (ch != ' ' && ch != '\t' && ch != '\r') {
        current.push_back(ch);
      }
    }
    if (!current.empty()) rows.push_back(current);
    int size = static_cast<int>(rows.size());
    Position pos(size);
    for (int row = 0; row < size; ++row) {
      if (static_cast<int>(rows[row].size()) != size) {
        throw std::invalid_argument("diagram is not square");
      }
      for (int col = 0; col < size; ++col) {
        char ch = rows[row][col];
        Stone s = Stone::Empty;
        if (ch == 'X' || ch == 'x' || ch == 'B') {
          s = Stone::Black;
        } else if (ch == 'O' || ch == 'o' || ch == 'W') {
          s = Stone::White;
        } else if (ch != '.' && ch != '+') {
          throw std::invalid_argument("unexpected diagram character");
        }
        if (s != Stone::Empty) pos.set_stone(pos.vertex(Coord{col, row}), s);
      }
    }
    pos.to_move_ = to_move;
    pos.rebuild_groups();
    pos.history_ = HashHistory();
    pos.history_.insert(pos.grid_hash_);
    return pos;
  }

  // Free placement (handicap / SGF setup). Does not change the player to
  // move. Throws if the point is occupied or the result has a dead group.
  void add_setup_stone(Coord c, Player p) {
    if (!c.in_bounds(size_)) throw IllegalMove(IllegalReason::OutOfBounds);
    Vertex v = vertex(c);
    if (board_[v] != Stone::Empty) throw IllegalMove(IllegalReason::Occupied);
    set_stone(v, stone_of(p));
    age_[v] = move_number_;
    rebuild_groups();
    ko_ = kNoVertex;
    history_.insert(grid_hash_);
  }

  // Setup only: chooses who moves next after free placement.
  void set_to_move(Player p) { to_move_ = p; }

  // --- Whole-board queries ---------------------------------------------

  int size() const { return size_; }
  int area() const { return size_ * size_; }
  Player to_move() const { return to_move_; }
  int move_number() const { return move_number_; }
  int consecutive_passes() const { return passes_; }
  Move last_move() const { return last_move_; }

  std::optional<Coord> ko_point() const {
    if (ko_ == kNoVertex) return std::nullopt;
    return coord(ko_);
  }

  Stone at(Coord c) const { return board_[vertex(c)]; }
  int age_at(Coord c) const { return age_[vertex(c)]; }

  int liberties_at(Coord c) const {
    Vertex v = vertex(c);
    if (!is_stone(board_[v])) return 0;
    return libs_[parent_[v]];
  }

  int group_size_at(Coord c) const {
    Vertex v = vertex(c);
    if (!is_stone(board_[v])) return 0;
    return stones_[parent_[v]];
  }

  int stone_count(Player p) const {
    Stone s = stone_of(p);
    int n = 0;
    for (int row = 0; row < size_; ++row) {
      for (int col = 0; col < size_; ++col) n += board_[vertex(Coord{col, row})] == s;
    }
    return n;
  }

  int captures_by(Player p) const { return captures_[static_cast<int>(p)]; }

  // Hash of (grid, player to move).
  std::uint64_t hash() const {
    return grid_hash_ ^ (to_move_ == Player::White ? detail::kZobrist.white_to_move : 0);
  }
  std::uint64_t grid_hash() const { return grid_hash_; }
  const HashHistory& hash_history() const { return history_; }

  std::optional<IllegalReason> legality(Move m) const {
    if (m.is_pass()) return std::nullopt;
    if (m.is_resign()) return IllegalReason::NotAPlay;
    if (!m.coord.in_bounds(size_)) return IllegalReason::OutOfBounds;
    return legality(vertex(m.coord));
  }

  bool is_legal(Move m) const { return !legality(m).has_value(); }

  // All legal board moves for the player to move, followed by Pass.
  std::vector<Move> legal_moves() const {
    std::vector<Move> moves;
    moves.reserve(empty_count_ + 1);
    for (int row = 0; row < size_; ++row) {
      for (int col = 0; col < size_; ++col) {
        Vertex v = vertex(Coord{col, row});
        if (!legality(v)) moves.push_back(Move::place(col, row));
      }
    }
    moves.push_back(Move::pass());
    return moves;
  }

  Position play(Move m) const {
    Position next = *this;
    next.apply(m);
    return next;
  }

  void apply(Move m) {
    if (auto reason = legality(m)) throw IllegalMove(*reason);
    if (m.is_pass()) {
      apply_pass();
    } else {
      apply_place(vertex(m.coord));
    }
  }

  // Copy of the position with every coordinate sent through `map`, which
  // must be a bijection of the board (e.g. a dihedral symmetry), and
  // optionally with stone colors and the player to move exchanged.
  template <typename MapCoord>
  Position remapped(MapCoord&& map, bool swap_colors = false) const {
    Position out(size_);
    for (int row = 0; row < size_; ++row) {
      for (int col = 0; col < size_; ++col) {
        Vertex v = vertex(Coord{col, row});
        if (is_stone(board_[v])) {
          Vertex w = out.vertex(map(Coord{col, row}));
          out.set_stone(w, swap_colors ? opposite(board_[v]) : board_[v]);
          out.age_[w] = age_[v];
        }
      }
    }
    out.to_move_ = swap_colors ? opponent(to_move_) : to_move_;
    out.move_number_ = move_number_;
    out.passes_ = passes_;
    out.rebuild_groups();
    out.history_ = HashHistory();
    out.history_.insert(out.grid_hash_);
    if (ko_ != kNoVertex) out.ko_ = out.vertex(map(coord(ko_)));
    if (last_move_.is_place()) out.last_move_ = Move::place(map(last_move_.coord));
    else out.last_move_ = last_move_;
    if (prev_vertex_ != kNoVertex) out.prev_vertex_ = out.vertex(map(coord(prev_vertex_)));
    if (last_vertex_ != kNoVertex) out.last_vertex_ = out.vertex(map(coord(last_vertex_)));
    return out;
  }

  std::string to_string() const {
    std::string out;
    for (int row = 0; row < size_; ++row) {
      for (int col = 0; col < size_; ++col) {
        Stone s = at(Coord{col, row});
        out.push_back(s == Stone::Black ? 'X' : s == Stone::White ? 'O' : '.');
      }
      out.push_back('\n');
    }
    return out;
  }

  // --- Vertex-level interface for the playout and search kernels --------

  int stride() const { return stride_; }
  Vertex vertex(Coord c) const {
    return static_cast<Vertex>((c.row + 1) * stride_ + c.col + 1);
  }
  Coord coord(Vertex v) const { return Coord{v % stride_ - 1, v / stride_ - 1}; }
  const std::array<int, 4>& dirs() const { return dirs_; }
  const std::array<int, 4>& diagonals() const { return diags_; }

  Stone stone(Vertex v) const { return board_[v]; }
  Vertex group_root(Vertex v) const { return parent_[v]; }
  int group_libs(Vertex v) const { return libs_[parent_[v]]; }
  int group_stones(Vertex v) const { return stones_[parent_[v]]; }
  Vertex next_in_group(Vertex v) const { return next_[v]; }
  int age(Vertex v) const { return age_[v]; }
  Stone to_move_stone() const { return stone_of(to_move_); }

  std::span<const Vertex> empty_points() const {
    return std::span<const Vertex>(empty_.data(), static_cast<std::size_t>(empty_count_));
  }

  Vertex ko_vertex() const { return ko_; }
  // Last board move (by the player not to move), and the one before it.
  Vertex last_vertex() const { return last_vertex_; }
  Vertex previous_vertex() const { return prev_vertex_; }

  static constexpr bool is_stone(Stone s) { return s == Stone::Black || s == Stone::White; }

  std::optional<IllegalReason> legality(Vertex v) const {
    if (board_[v] != Stone::Empty) return IllegalReason::Occupied;
    if (v == ko_) return IllegalReason::Ko;
    Stone c = stone_of(to_move_);
    if (is_suicide(v, c)) return IllegalReason::Suicide;
    if (history_.contains(hash_after(v, c))) return IllegalReason::Superko;
    return std::nullopt;
  }

  bool is_legal_vertex(Vertex v) const { return !legality(v).has_value(); }

  bool is_suicide(Vertex v, Stone c) const {
    Stone opp = opposite(c);
    for (int d : dirs_) {
      Vertex u = static_cast<Vertex>(v + d);
      Stone s = board_[u];
      if (s == Stone::Empty) return false;
      if (s == c) {
        if (libs_[parent_[u]] > 1) return false;
      } else if (s == opp) {
        if (libs_[parent_[u]] == 1) return false;
      }
    }
    return true;
  }

  bool captures_any(Vertex v, Stone c) const {
    Stone opp = opposite(c);
    for (int d : dirs_) {
      Vertex u = static_cast<Vertex>(v + d);
      if (board_[u] == opp && libs_[parent_[u]] == 1) return true;
    }
    return false;
  }

  // Grid hash after `c` plays at empty point v, including captures.
  std::uint64_t hash_after(Vertex v, Stone c) const {
    std::uint64_t h = grid_hash_ ^ detail::stone_key(c, v);
    Stone opp = opposite(c);
    std::array<Vertex, 4> seen{};
    int n = 0;
    for (int d : dirs_) {
      Vertex u = static_cast<Vertex>(v + d);
      if (board_[u] != opp) continue;
      Vertex g = parent_[u];
      if (libs_[g] != 1 || contains(seen, n, g)) continue;
      seen[n++] = g;
      Vertex s = g;
      do {
        h ^= detail::stone_key(opp, s);
        s = next_[s];
      } while (s != g);
    }
    return h;
  }

  // Liberties of the group that would contain v after `c` plays there,
  // counted exactly up to `limit` (at most 8).
  int liberties_after(Vertex v, Stone c, int limit) const {
    std::array<Vertex, 8> found{};
    int count = 0;
    auto add = [&](Vertex u) {
      if (u == v || contains(found, count, u)) return false;
      found[count++] = u;
      return count >= limit;
    };
    for (int d : dirs_) {
      Vertex u = static_cast<Vertex>(v + d);
      if (board_[u] == Stone::Empty && add(u)) return count;
    }
    std::array<Vertex, 4> own{};
    int n_own = 0;
    for (int d : dirs_) {
      Vertex u = static_cast<Vertex>(v + d);
      if (board_[u] != c) continue;
      Vertex g = parent_[u];
      if (contains(own, n_own, g)) continue;
      own[n_own++] = g;
      Vertex s = g;
      do {
        for (int d2 : dirs_) {
          Vertex w = static_cast<Vertex>(s + d2);
          if (board_[w] == Stone::Empty && add(w)) return count;
        }
        s = next_[s];
      } while (s != g);
    }
    Stone opp = opposite(c);
    std::array<Vertex, 4> taken{};
    int n_taken = 0;
    for (int d : dirs_) {
      Vertex u = static_cast<Vertex>(v + d);
      if (board_[u] != opp) continue;
      Vertex g = parent_[u];
      if (libs_[g] != 1 || contains(taken, n_taken, g)) continue;
      taken[n_taken++] = g;
      Vertex s = g;
      do {
        bool adjacent = false;
        for (int d2 : dirs_) {
          Vertex w = static_cast<Vertex>(s + d2);
          if (w == v || (board_[w] == c && contains(own, n_own, parent_[w]))) {
            adjacent = true;
            break;
          }
        }
        if (adjacent && add(s)) return count;
        s = next_[s];
      } while (s != g);
    }
    return count;
  }

  // Writes up to `max` distinct liberties of the group at v into out.
  int group_liberties(Vertex v, Vertex* out, int max) const {
    std::bitset<kMaxVertices> seen;
    int count = 0;
    Vertex g = parent_[v];
    Vertex s = g;
    do {
      for (int d : dirs_) {
        Vertex u = static_cast<Vertex>(s + d);
        if (board_[u] == Stone::Empty && !seen[u]) {
          seen[u] = true;
          if (count < max) out[count] = u;
          ++count;
        }
      }
      s = next_[s];
    } while (s != g);
    return std::min(count, max);
  }

  // A point whose four neighbours are `c` (or off-board) and whose
  // diagonals allow at most one opponent stone, none at the edge.
  bool is_true_eye(Vertex v, Stone c) const {
    if (board_[v] != Stone::Empty) return false;
    for (int d : dirs_) {
      Stone s = board_[v + d];
      if (s != c && s != Stone::Off) return false;
    }
    int bad = 0;
    int off = 0;
    Stone opp = opposite(c);
    for (int d : diags_) {
      Stone s = board_[v + d];
      if (s == Stone::Off) {
        ++off;
      } else if (s == opp) {
        ++bad;
      }
    }
    return off > 0 ? bad == 0 : bad <= 1;
  }

  void apply_pass() {
    ko_ = kNoVertex;
    ++passes_;
    ++move_number_;
    last_move_ = Move::pass();
    prev_vertex_ = last_vertex_;
    last_vertex_ = kNoVertex;
    to_move_ = opponent(to_move_);
  }

  // Places a stone for the player to move at v. The caller guarantees
  // legality (see legality()).
  void apply_place(Vertex v) {
    Stone c = stone_of(to_move_);
    Stone opp = opposite(c);
    ++move_number_;
    set_stone(v, c);
    age_[v] = move_number_;
    parent_[v] = v;
    next_[v] = v;
    stones_[v] = 1;
    int empty_neighbours = 0;
    for (int d : dirs_) empty_neighbours += board_[v + d] == Stone::Empty;
    libs_[v] = static_cast<std::int16_t>(empty_neighbours);

    std::array<Vertex, 4> seen{};
    int n = 0;
    for (int d : dirs_) {
      Vertex u = static_cast<Vertex>(v + d);
      if (!is_stone(board_[u])) continue;
      Vertex g = parent_[u];
      if (contains(seen, n, g)) continue;
      seen[n++] = g;
      --libs_[g];
    }
    Vertex root = v;
    for (int i = 0; i < n; ++i) {
      if (board_[seen[i]] == c) root = merge(root, seen[i]);
    }
    int captured = 0;
    Vertex captured_at = kNoVertex;
    for (int i = 0; i < n; ++i) {
      Vertex g = seen[i];
      if (board_[g] == opp && libs_[g] == 0) {
        captured += remove_group(g);
        captured_at = g;
      }
    }
    captures_[static_cast<int>(to_move_)] += captured;
    ko_ = (captured == 1 && stones_[root] == 1 && libs_[root] == 1) ? captured_at : kNoVertex;
    passes_ = 0;
    last_move_ = Move::place(coord(v));
    prev_vertex_ = last_vertex_;
    last_vertex_ = v;
    to_move_ = opponent(to_move_);
    history_.insert(grid_hash_);
  }

 private:
  template <std::size_t N>
  static bool contains(const std::array<Vertex, N>& items, int n, Vertex v) {
    for (int i = 0; i < n; ++i) {
      if (items[i] == v) return true;
    }
    return false;
  }

  // Updates board contents, hash and the empty list. Group structure is the
  // caller's responsibility.
  void set_stone(Vertex v, Stone s) {
    board_[v] = s;
    grid_hash_ ^= detail::stone_key(s, v);
    int idx = empty_idx_[v];
    Vertex last = empty_[--empty_count_];
    empty_[idx] = last;
    empty_idx_[last] = static_cast<std::int16_t>(idx);
    empty_idx_[v] = -1;
  }

  Vertex merge(Vertex a, Vertex b) {
    if (stones_[a] < stones_[b]) std::swap(a, b);
    Vertex s = b;
    do {
      for (int d : dirs_) {
        Vertex e = static_cast<Vertex>(s + d);
        if (board_[e] != Stone::Empty) continue;
        bool shared = false;
        for (int d2 : dirs_) {
          if (parent_[e + d2] == a) {
            shared = true;
            break;
          }
        }
        if (!shared) ++libs_[a];
      }
      parent_[s] = a;
      s = next_[s];
    } while (s != b);
    stones_[a] = static_cast<std::int16_t>(stones_[a] + stones_[b]);
    std::swap(next_[a], next_[b]);
    return a;
  }

  int remove_group(Vertex g) {
    Stone color = board_[g];
    int count = 0;
    Vertex s = g;
    do {
      board_[s] = Stone::Empty;
      grid_hash_ ^= detail::stone_key(color, s);
      empty_idx_[s] = static_cast<std::int16_t>(empty_count_);
      empty_[empty_count_++] = s;
      parent_[s] = kNoVertex;
      age_[s] = 0;
      ++count;
      s = next_[s];
    } while (s != g);
    s = g;
    do {
      std::array<Vertex, 4> seen{};
      int n = 0;
      for (int d : dirs_) {
        Vertex u = static_cast<Vertex>(s + d);
        if (!is_stone(board_[u])) continue;
        Vertex h = parent_[u];
        if (contains(seen, n, h)) continue;
        seen[n++] = h;
        ++libs_[h];
      }
      Vertex nxt = next_[s];
      next_[s] = kNoVertex;
      s = nxt;
    } while (s != g);
    return count;
  }

  // Recomputes all group structure from board contents by flood fill.
  void rebuild_groups() {
    for (int row = 0; row < size_; ++row) {
      for (int col = 0; col < size_; ++col) {
        Vertex v = vertex(Coord{col, row});
        parent_[v] = kNoVertex;
        next_[v] = kNoVertex;
      }
    }
    std::vector<Vertex> stack;
    std::bitset<kMaxVertices> lib_seen;
    for (int row = 0; row < size_; ++row) {
      for (int col = 0; col < size_; ++col) {
        Vertex v = vertex(Coord{col, row});
        if (!is_stone(board_[v]) || parent_[v] != kNoVertex) continue;
        Stone color = board_[v];
        std::vector<Vertex> members;
        stack.assign(1, v);
        parent_[v] = v;
        lib_seen.reset();
        int libs = 0;
        while (!stack.empty()) {
          Vertex s = stack.back();
          stack.pop_back();
          members.push_back(s);
          for (int d : dirs_) {
            Vertex u = static_cast<Vertex>(s + d);
            if (board_[u] == color && parent_[u] == kNoVertex) {
              parent_[u] = v;
              stack.push_back(u);
            } else if (board_[u] == Stone::Empty && !lib_seen[u]) {
              lib_seen[u] = true;
              ++libs;
            }
          }
        }
        if (libs == 0) throw std::invalid_argument("setup leaves a group without liberties");
        for (std::size_t i = 0; i < members.size(); ++i) {
          next_[members[i]] = members[(i + 1) % members.size()];
        }
        stones_[v] = static_cast<std::int16_t>(members.size());
        libs_[v] = static_cast<std::int16_t>(libs);
      }
    }
  }

  int size_;
  int stride_;
  std::array<int, 4> dirs_{};
  std::array<int, 4> diags_{};
  std::array<Stone, kMaxVertices> board_{};
  std::array<Vertex, kMaxVertices> parent_{};
  std::array<Vertex, kMaxVertices> next_{};
  std::array<std::int16_t, kMaxVertices> libs_{};
  std::array<std::int16_t, kMaxVertices> stones_{};
  std::array<std::int32_t, kMaxVertices> age_{};
  std::array<std::int16_t, kMaxVertices> empty_idx_{};
  std::array<Vertex, kMaxPoints> empty_{};
  int empty_count_ = 0;
  Player to_move_ = Player::Black;
  int move_number_ = 0;
  int passes_ = 0;
  Vertex ko_ = kNoVertex;
  Vertex last_vertex_ = kNoVertex;
  Vertex prev_vertex_ = kNoVertex;
  Move last_move_ = Move::pass();
  std::array<int, 2> captures_{};
  std::uint64_t grid_hash_ = 0;
  HashHistory history_;
};

}  // namespace sylvan
