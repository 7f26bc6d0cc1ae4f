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

// Reader and writer for the SGF subset used by game corpora and match logs:
// main line only, properties B W AB AW SZ KM HA RE BR WR PB PW. Everything
// else (comments, markup, variations beyond the first) is skipped.

#include <cstddef>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sylvan/board.hpp"

namespace sylvan {

struct GameRecord {
  int board_size = 19;
  double komi = 0.0;
  int handicap = 0;
  std::vector<std::pair<Player, Coord>> setup;
  std::string result;
  std::string black_name;
  std::string white_name;
  std::string black_rank;
  std::string white_rank;
  std::vector<std::pair<Player, Move>> moves;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error("SGF parse error at byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

class IllegalMoveInRecord : public std::runtime_error {
 public:
  IllegalMoveInRecord(std::size_t move_index, const std::string& why)
      : std::runtime_error("illegal move " + std::to_string(move_index + 1) + " in record: " + why),
        move_index_(move_index) {}
  std::size_t move_index() const { return move_index_; }

 private:
  std::size_t move_index_;
};

namespace detail {

class SgfReader {
 public:
  explicit SgfReader(std::string_view text) : text_(text) {}

  GameRecord read() {
    skip_space();
    expect('(');
    read_tree(true);
    return record_;
  }

 private:
  struct Property {
    std::string id;
    std::vector<std::string> values;
    std::size_t offset;
  };

  void read_tree(bool main_line) {
    skip_space();
    bool first_node = true;
    while (peek() == ';') {
      ++pos_;
      read_node(main_line, first_node && is_root_);
      first_node = false;
      skip_space();
    }
    is_root_ = false;
    bool first_child = true;
    while (peek() == '(') {
      ++pos_;
      read_tree(main_line && first_child);
      first_child = false;
      skip_space();
    }
    expect(')');
  }

  void read_node(bool main_line, bool root) {
    skip_space();
    while (pos_ < text_.size() && std::isupper(static_cast<unsigned char>(text_[pos_]))) {
      Property prop = read_property();
      if (main_line) apply(prop, root);
      skip_space();
    }
  }

  Property read_property() {
    Property prop;
    prop.offset = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) {
      prop.id.push_back(text_[pos_++]);
    }
    skip_space();
    if (peek() != '[') throw ParseError("property " + prop.id + " has no value", pos_);
    while (peek() == '[') {
      ++pos_;
      std::string value;
      for (;;) {
        if (pos_ >= text_.size()) throw ParseError("unterminated property value", pos_);
        char ch = text_[pos_++];
        if (ch == ']') break;
        if (ch == '\\') {
          if (pos_ >= text_.size()) throw ParseError("dangling escape", pos_);
          ch = text_[pos_++];
        }
        value.push_back(ch);
      }
      prop.values.push_back(std::move(value));
      skip_space();
    }
    return prop;
  }

  Coord point(const std::string& v, std::size_t offset) const {
    if (v.size() != 2) throw ParseError("bad point '" + v + "'", offset);
    Coord c{v[0] - 'a', v[1] - 'a'};
    if (!c.in_bounds(record_.board_size)) throw ParseError("point out of range '" + v + "'", offset);
    return c;
  }

  Move move_value(const std::string& v, std::size_t offset) const {
    if (v.empty() || (v == "tt" && record_.board_size <= 19)) return Move::pass();
    return Move::place(point(v, offset));
  }

  void apply(const Property& p, bool root) {
    const std::string& first = p.values.front();
    if (p.id == "B" || p.id == "W") {
      Player who = p.id == "B" ? Player::Black : Player::White;
      record_.moves.emplace_back(who, move_value(first, p.offset));
    } else if ((p.id == "AB" || p.id == "AW") && root) {
      Player who = p.id == "AB" ? Player::Black : Player::White;
      for (const auto& v : p.values) record_.setup.emplace_back(who, point(v, p.offset));
    } else if (p.id == "SZ" && root) {
      record_.board_size = number<int>(first, p.offset);
      if (record_.board_size < 2 || record_.board_size > kMaxBoardSize) {
        throw ParseError("unsupported board size", p.offset);
      }
    } else if (p.id == "KM" && root) {
      record_.komi = number<double>(first, p.offset);
    } else if (p.id == "HA" && root) {
      record_.handicap = number<int>(first, p.offset);
    } else if (p.id == "RE" && root) {
      record_.result = first;
    } else if (p.id == "PB" && root) {
      record_.black_name = first;
    } else if (p.id == "PW" && root) {
      record_.white_name = first;
    } else if (p.id == "BR" && root) {
      record_.black_rank = first;
    } else if (p.id == "WR" && root) {
      record_.white_rank = first;
    }
  }

  template <typename T>
  T number(const std::string& v, std::size_t offset) const {
    char* end = nullptr;
    double parsed = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size()) throw ParseError("bad number '" + v + "'", offset);
    return static_cast<T>(parsed);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void expect(char ch) {
    if (peek() != ch) throw ParseError(std::string("expected '") + ch + "'", pos_);
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  bool is_root_ = true;
  GameRecord record_;
};

inline std::string escape_sgf(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == ']' || ch == '\\') out.push_back('\\');
    out.push_back(ch);
  }
  return out;
}

inline std::string sgf_point(Coord c) {
  return {static_cast<char>('a' + c.col), static_cast<char>('a' + c.row)};
}

inline std::string format_komi(double komi) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", komi);
  return buf;
}

}  // namespace detail

inline GameRecord parse_sgf(std::string_view text) { return detail::SgfReader(text).read(); }

inline std::string serialize_sgf(const GameRecord& r) {
  using detail::escape_sgf;
  std::string out = "(;GM[1]FF[4]SZ[" + std::to_string(r.board_size) + "]KM[" + detail::format_komi(r.komi) + "]";
  if (r.handicap > 0) out += "HA[" + std::to_string(r.handicap) + "]";
  if (!r.black_name.empty()) out += "PB[" + escape_sgf(r.black_name) + "]";
  if (!r.white_name.empty()) out += "PW[" + escape_sgf(r.white_name) + "]";
  if (!r.black_rank.empty()) out += "BR[" + escape_sgf(r.black_rank) + "]";
  if (!r.white_rank.empty()) out += "WR[" + escape_sgf(r.white_rank) + "]";
  if (!r.result.empty()) out += "RE[" + escape_sgf(r.result) + "]";
  for (Player who : {Player::Black, Player::White}) {
    bool opened = false;
    for (const auto& [p, c] : r.setup) {
      if (p != who) continue;
      if (!opened) out += who == Player::Black ? "AB" : "AW";
      opened = true;
      out += "[" + detail::sgf_point(c) + "]";
    }
  }
  for (const auto& [who, m] : r.moves) {
    out += who == Player::Black ? ";B[" : ";W[";
    if (m.is_place()) out += detail::sgf_point(m.coord);
    out += "]";
  }
  out += ")\n";
  return out;
}

// Replays a record through the rules. Returns the position after `limit`
// moves (all moves by default).
inline Position replay(const GameRecord& r, std::size_t limit = static_cast<std::size_t>(-1)) {
  Position pos(r.board_size);
  for (const auto& [who, c] : r.setup) pos.add_setup_stone(c, who);
  if (!r.setup.empty()) {
    pos.set_to_move(r.moves.empty() ? Player::Black : r.moves.front().first);
  }
  for (std::size_t i = 0; i < r.moves.size() && i < limit; ++i) {
    const auto& [who, m] = r.moves[i];
    if (who != pos.to_move()) throw IllegalMoveInRecord(i, "out of turn");
    if (auto reason = pos.legality(m)) throw IllegalMoveInRecord(i, to_string(*reason));
    pos.apply(m);
  }
  return pos;
}

}  // namespace sylvan
