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

#include <array>
#include <bitset>
#include <cstdio>
#include <string>
#include <vector>

#include "sylvan/board.hpp"

namespace sylvan {

struct ScoreResult {
  int black_points = 0;
  int white_points = 0;
  double komi = 0.0;
  double margin = 0.0;  // black - white - komi

  int neutral_points(int area) const { return area - black_points - white_points; }
};

// Owner of each point under area scoring: the stone on it, or the single
// color an empty region reaches. Empty regions reaching both (or neither)
// color stay Empty.
inline std::array<Stone, kMaxVertices> area_owners(const Position& pos) {
  std::array<Stone, kMaxVertices> owner{};
  owner.fill(Stone::Off);
  std::bitset<kMaxVertices> visited;
  std::vector<Vertex> region;
  std::vector<Vertex> stack;
  const int n = pos.size();
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      Vertex v = pos.vertex(Coord{col, row});
      Stone s = pos.stone(v);
      if (s != Stone::Empty) {
        owner[v] = s;
        continue;
      }
      if (visited[v]) continue;
      bool reaches_black = false;
      bool reaches_white = false;
      region.clear();
      stack.assign(1, v);
      visited[v] = true;
      while (!stack.empty()) {
        Vertex u = stack.back();
        stack.pop_back();
        region.push_back(u);
        for (int d : pos.dirs()) {
          Vertex w = static_cast<Vertex>(u + d);
          Stone t = pos.stone(w);
          if (t == Stone::Empty) {
            if (!visited[w]) {
              visited[w] = true;
              stack.push_back(w);
            }
          } else if (t == Stone::Black) {
            reaches_black = true;
          } else if (t == Stone::White) {
            reaches_white = true;
          }
        }
      }
      Stone result = Stone::Empty;
      if (reaches_black && !reaches_white) result = Stone::Black;
      if (reaches_white && !reaches_black) result = Stone::White;
      for (Vertex u : region) owner[u] = result;
    }
  }
  return owner;
}

inline ScoreResult tromp_taylor_score(const Position& pos, double komi) {
  auto owner = area_owners(pos);
  ScoreResult r;
  const int n = pos.size();
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      Stone s = owner[pos.vertex(Coord{col, row})];
      r.black_points += s == Stone::Black;
      r.white_points += s == Stone::White;
    }
  }
  r.komi = komi;
  r.margin = r.black_points - r.white_points - komi;
  return r;
}

// "B+3.5", "W+0.5" or "0".
inline std::string format_score(double margin) {
  if (margin == 0.0) return "0";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%c+%g", margin > 0 ? 'B' : 'W', margin > 0 ? margin : -margin);
  return buf;
}

}  // namespace sylvan
