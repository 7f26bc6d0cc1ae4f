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

// 3x3 shape patterns for the default policy. A pattern describes the eight
// neighbours of an empty candidate point, row-major around the centre:
//
//   0 1 2
//   3 . 4
//   5 6 7
//
// Table files hold one concrete pattern per line: 8 characters over
// {B, W, '.', '#'} followed by a weight. Every pattern also matches its 8
// dihedral images and its color-swapped form.

#include <algorithm>
#include <array>
#include <bitset>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sylvan/board.hpp"

namespace sylvan {

namespace detail {

// kSymmetryMap[s][i]: where ring cell i lands under dihedral transform s.
constexpr std::array<std::array<int, 8>, 8> make_symmetry_map() {
  constexpr std::array<std::pair<int, int>, 8> cells = {
      {{-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
  std::array<std::array<int, 8>, 8> map{};
  for (int s = 0; s < 8; ++s) {
    for (int i = 0; i < 8; ++i) {
      int x = cells[i].first;
      int y = cells[i].second;
      if (s & 4) std::swap(x, y);
      if (s & 1) x = -x;
      if (s & 2) y = -y;
      for (int j = 0; j < 8; ++j) {
        if (cells[j].first == x && cells[j].second == y) map[s][i] = j;
      }
    }
  }
  return map;
}

}  // namespace detail

class PatternTable {
 public:
  PatternTable() { weights_.fill(0.0f); }

  static PatternTable parse(std::string_view text) {
    PatternTable table;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      auto hash = line.find(';');
      if (hash != std::string::npos) line.resize(hash);
      std::istringstream fields(line);
      std::string ring;
      float weight = 0.0f;
      if (!(fields >> ring)) continue;
      if (ring.size() != 8 || !(fields >> weight) || weight < 0.0f) {
        throw std::invalid_argument("bad pattern on line " + std::to_string(line_no));
      }
      std::array<Stone, 8> stones{};
      for (int i = 0; i < 8; ++i) {
        switch (ring[i]) {
          case 'B':
            stones[i] = Stone::Black;
            break;
          case 'W':
            stones[i] = Stone::White;
            break;
          case '.':
            stones[i] = Stone::Empty;
            break;
          case '#':
            stones[i] = Stone::Off;
            break;
          default:
            throw std::invalid_argument("bad pattern character on line " + std::to_string(line_no));
        }
      }
      table.add(stones, weight);
    }
    return table;
  }

  static PatternTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open pattern table " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
  }

  void add(const std::array<Stone, 8>& ring, float weight) {
    ++source_count_;
    for (int sym = 0; sym < 8; ++sym) {
      std::array<Stone, 8> image{};
      for (int i = 0; i < 8; ++i) image[kSymmetryMap[sym][i]] = ring[i];
      for (bool swap : {false, true}) {
        std::uint16_t code = 0;
        for (int i = 0; i < 8; ++i) {
          Stone s = swap ? opposite(image[i]) : image[i];
          code = static_cast<std::uint16_t>(code | (static_cast<unsigned>(s) << (2 * i)));
        }
        weights_[code] = std::max(weights_[code], weight);
        present_.set(code, weights_[code] > 0.0f);
      }
    }
  }

  float weight(std::uint16_t code) const { return weights_[code]; }

  static std::uint16_t code_at(const Position& pos, Vertex v) {
    const int w = pos.stride();
    const std::array<int, 8> offsets = {-w - 1, -w, -w + 1, -1, 1, w - 1, w, w + 1};
    std::uint16_t code = 0;
    for (int i = 0; i < 8; ++i) {
      code = static_cast<std::uint16_t>(code | (static_cast<unsigned>(pos.stone(static_cast<Vertex>(v + offsets[i]))) << (2 * i)));
    }
    return code;
  }

  float weight_at(const Position& pos, Vertex v) const { return weights_[code_at(pos, v)]; }

  // Positive-weight test through a compact bitset that stays in L1 cache.
  bool matches(const Position& pos, Vertex v) const { return present_.test(code_at(pos, v)); }

  std::size_t source_count() const { return source_count_; }

  friend bool operator==(const PatternTable& a, const PatternTable& b) { return a.weights_ == b.weights_; }

 private:
  static constexpr std::array<std::array<int, 8>, 8> kSymmetryMap = detail::make_symmetry_map();

  std::array<float, 65536> weights_{};
  std::bitset<65536> present_;
  std::size_t source_count_ = 0;
};

namespace detail {

// Hane, cut and edge shapes in the usual MoGo/Pachi notation, written as
// three rows with the candidate in the centre. X and O are the two colors,
// '?' is anything, 'x' is anything but X, 'o' anything but O, '#' off-board.
inline constexpr std::array<std::string_view, 13> kShapeSources = {
    "XOX...???",  // hane: enclosing
    "XO....?.?",  // hane: non-cutting
    "XO?X..x.?",  // hane: magari
    "XOO...?.?",  // hane: thin
    "XO?O.o?o?",  // cut: unprotected
    "XO?O.X???",  // cut: peeped
    "?X?O.Oooo",  // cut: de
    "OX??.O?o?",  // cut: keima
    "X.?O.?##?",  // edge: chase
    "OX?X.O###",  // edge: block side cut
    "?X?x.O###",  // edge: block side connection
    "?XOx.x###",  // edge: sagari
    "?OXX.O###",  // edge: cut
};

inline void expand_shape(std::string_view shape, std::size_t cell, std::string& ring,
                         std::vector<std::string>& out) {
  if (cell == shape.size()) {
    out.push_back(ring);
    return;
  }
  if (cell == 4) {
    expand_shape(shape, cell + 1, ring, out);
    return;
  }
  std::string_view options;
  switch (shape[cell]) {
    case 'X':
      options = "B";
      break;
    case 'O':
      options = "W";
      break;
    case '.':
      options = ".";
      break;
    case '#':
      options = "#";
      break;
    case 'x':
      options = ".W#";
      break;
    case 'o':
      options = ".B#";
      break;
    default:
      options = ".BW#";
      break;
  }
  for (char ch : options) {
    ring.push_back(ch);
    expand_shape(shape, cell + 1, ring, out);
    ring.pop_back();
  }
}

}  // namespace detail

// The built-in table as text in the table-file format.
inline std::string default_pattern_text() {
  std::vector<std::string> rings;
  for (std::string_view shape : detail::kShapeSources) {
    std::string ring;
    detail::expand_shape(shape, 0, ring, rings);
  }
  std::sort(rings.begin(), rings.end());
  rings.erase(std::unique(rings.begin(), rings.end()), rings.end());
  std::string out = "; 3x3 hane/cut/edge shapes, one concrete neighbourhood per line\n";
  for (const auto& r : rings) out += r + " 1\n";
  return out;
}

inline const PatternTable& default_patterns() {
  static const PatternTable table = PatternTable::parse(default_pattern_text());
  return table;
}

}  // namespace sylvan
