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
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sylvan/board.hpp"

namespace sylvan {

enum class FeatureSet : std::uint8_t { Standard, Extended };

constexpr int plane_count(FeatureSet set) { return set == FeatureSet::Standard ? 21 : 25; }

// Frozen plane order, shared bit-exactly with the evaluator service.
namespace planes {
inline constexpr int kOurLiberties1 = 0;
inline constexpr int kOurLiberties2 = 1;
inline constexpr int kOurLiberties3Plus = 2;
inline constexpr int kOpponentLiberties1 = 3;
inline constexpr int kOpponentLiberties2 = 4;
inline constexpr int kOpponentLiberties3Plus = 5;
inline constexpr int kKo = 6;
inline constexpr int kOurStones = 7;
inline constexpr int kOpponentStones = 8;
inline constexpr int kEmpty = 9;
inline constexpr int kOurHistory = 10;
inline constexpr int kOpponentHistory = 11;
inline constexpr int kRankFirst = 12;  // 12..20, one per dan level
inline constexpr int kRankCount = 9;
inline constexpr int kBorder = 21;
inline constexpr int kPositionMask = 22;
inline constexpr int kOurTerritory = 23;
inline constexpr int kOpponentTerritory = 24;
}  // namespace planes

inline constexpr double kHistoryDecay = 0.1;

struct FeatureTensor {
  int size = 0;
  Player perspective = Player::Black;
  FeatureSet set = FeatureSet::Standard;
  std::vector<float> data;  // plane-major, then row-major

  FeatureTensor() = default;
  FeatureTensor(int board_size, Player p, FeatureSet s)
      : size(board_size),
        perspective(p),
        set(s),
        data(static_cast<std::size_t>(sylvan::plane_count(s) * board_size * board_size), 0.0f) {}

  int plane_count() const { return sylvan::plane_count(set); }
  int plane_area() const { return size * size; }

  float at(int plane, Coord c) const { return data[offset(plane, c)]; }
  float& at(int plane, Coord c) { return data[offset(plane, c)]; }

  std::span<const float> plane(int p) const {
    return std::span<const float>(data).subspan(static_cast<std::size_t>(p * plane_area()),
                                                 static_cast<std::size_t>(plane_area()));
  }

  friend bool operator==(const FeatureTensor&, const FeatureTensor&) = default;

 private:
  std::size_t offset(int plane, Coord c) const {
    return static_cast<std::size_t>((plane * size + c.row) * size + c.col);
  }
};

// The 8 dihedral transforms. Bit 2 transposes, then bit 0 mirrors columns
// and bit 1 mirrors rows.
enum class Symmetry : std::uint8_t {
  Identity = 0,
  FlipColumns = 1,
  FlipRows = 2,
  Rotate180 = 3,
  Transpose = 4,
  Rotate90 = 5,
  Rotate270 = 6,
  AntiTranspose = 7,
};

inline constexpr std::array<Symmetry, 8> kAllSymmetries = {
    Symmetry::Identity,  Symmetry::FlipColumns, Symmetry::FlipRows, Symmetry::Rotate180,
    Symmetry::Transpose, Symmetry::Rotate90,    Symmetry::Rotate270, Symmetry::AntiTranspose};

constexpr Coord apply_symmetry(Symmetry s, Coord c, int size) {
  auto bits = static_cast<unsigned>(s);
  int x = c.col;
  int y = c.row;
  if (bits & 4u) std::swap(x, y);
  if (bits & 1u) x = size - 1 - x;
  if (bits & 2u) y = size - 1 - y;
  return Coord{x, y};
}

constexpr Symmetry inverse(Symmetry s) {
  auto bits = static_cast<unsigned>(s);
  if (!(bits & 4u)) return s;
  unsigned flips = ((bits & 1u) << 1) | ((bits & 2u) >> 1);
  return static_cast<Symmetry>(4u | flips);
}

inline Move transform_move(Move m, Symmetry s, int size) {
  if (!m.is_place()) return m;
  return Move::place(apply_symmetry(s, m.coord, size));
}

inline FeatureTensor transform(const FeatureTensor& t, Symmetry s) {
  FeatureTensor out(t.size, t.perspective, t.set);
  for (int p = 0; p < t.plane_count(); ++p) {
    for (int row = 0; row < t.size; ++row) {
      for (int col = 0; col < t.size; ++col) {
        Coord c{col, row};
        out.at(p, apply_symmetry(s, c, t.size)) = t.at(p, c);
      }
    }
  }
  return out;
}

inline Position transform_position(const Position& pos, Symmetry s) {
  int n = pos.size();
  return pos.remapped([s, n](Coord c) { return apply_symmetry(s, c, n); });
}

namespace detail {

// Multi-source BFS through empty points from every stone of `color`.
inline std::array<int, kMaxVertices> stone_distance(const Position& pos, Stone color) {
  std::array<int, kMaxVertices> dist;
  dist.fill(std::numeric_limits<int>::max());
  std::vector<Vertex> frontier;
  for (int row = 0; row < pos.size(); ++row) {
    for (int col = 0; col < pos.size(); ++col) {
      Vertex v = pos.vertex(Coord{col, row});
      if (pos.stone(v) == color) {
        dist[v] = 0;
        frontier.push_back(v);
      }
    }
  }
  std::vector<Vertex> next;
  for (int d = 1; !frontier.empty(); ++d) {
    next.clear();
    for (Vertex v : frontier) {
      for (int dir : pos.dirs()) {
        Vertex u = static_cast<Vertex>(v + dir);
        if (pos.stone(u) == Stone::Empty && dist[u] > d) {
          dist[u] = d;
          next.push_back(u);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

}  // namespace detail

// Encodes a position from `perspective`'s point of view. opponent_rank is 0
// for kyu (or unknown), 1..9 for 1d..9d; professionals use 9.
inline FeatureTensor extract(const Position& pos, Player perspective, int opponent_rank = 0,
                             FeatureSet set = FeatureSet::Extended) {
  if (opponent_rank < 0 || opponent_rank > 9) throw std::invalid_argument("opponent rank must be in [0, 9]");
  const int n = pos.size();
  FeatureTensor t(n, perspective, set);
  const Stone ours = stone_of(perspective);
  const Stone theirs = opposite(ours);
  const int now = pos.move_number();

  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      Coord c{col, row};
      Vertex v = pos.vertex(c);
      Stone s = pos.stone(v);
      if (s == Stone::Empty) {
        t.at(planes::kEmpty, c) = 1.0f;
        continue;
      }
      bool mine = s == ours;
      int libs = pos.group_libs(v);
      int base = mine ? planes::kOurLiberties1 : planes::kOpponentLiberties1;
      t.at(base + (libs >= 3 ? 2 : libs - 1), c) = 1.0f;
      t.at(mine ? planes::kOurStones : planes::kOpponentStones, c) = 1.0f;
      double elapsed = now - pos.age(v);
      t.at(mine ? planes::kOurHistory : planes::kOpponentHistory, c) =
          static_cast<float>(std::exp(-elapsed * kHistoryDecay));
    }
  }
  if (auto ko = pos.ko_point()) t.at(planes::kKo, *ko) = 1.0f;
  for (int r = 0; r < opponent_rank; ++r) {
    auto begin = t.data.begin() + (planes::kRankFirst + r) * n * n;
    std::fill(begin, begin + n * n, 1.0f);
  }
  if (set == FeatureSet::Standard) return t;

  const double center = (n - 1) / 2.0;
  auto our_dist = detail::stone_distance(pos, ours);
  auto their_dist = detail::stone_distance(pos, theirs);
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      Coord c{col, row};
      if (row == 0 || col == 0 || row == n - 1 || col == n - 1) t.at(planes::kBorder, c) = 1.0f;
      double dr = row - center;
      double dc = col - center;
      t.at(planes::kPositionMask, c) = static_cast<float>(std::exp(-0.5 * (dr * dr + dc * dc)));
      Vertex v = pos.vertex(c);
      if (pos.stone(v) != Stone::Empty) continue;
      if (our_dist[v] < their_dist[v]) t.at(planes::kOurTerritory, c) = 1.0f;
      if (their_dist[v] < our_dist[v]) t.at(planes::kOpponentTerritory, c) = 1.0f;
    }
  }
  return t;
}

// Maps a rank string such as "3d", "5k", "2p" to the 0..9 rank level.
inline int rank_level(std::string_view rank) {
  if (rank.size() < 2) return 0;
  int value = 0;
  std::size_t i = 0;
  while (i < rank.size() && rank[i] >= '0' && rank[i] <= '9') value = value * 10 + (rank[i++] - '0');
  if (i == 0 || i >= rank.size()) return 0;
  char kind = static_cast<char>(std::tolower(static_cast<unsigned char>(rank[i])));
  if (kind == 'p') return 9;
  if (kind == 'd') return std::clamp(value, 1, 9);
  return 0;
}

}  // namespace sylvan
