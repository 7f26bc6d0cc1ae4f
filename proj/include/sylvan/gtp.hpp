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

// GTP v2 front-end. One command is handled at a time; with pondering on,
// the search keeps running on the current tree between commands and stops
// as soon as the next line arrives.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <exception>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "sylvan/board.hpp"
#include "sylvan/mcts.hpp"
#include "sylvan/playout.hpp"
#include "sylvan/policy.hpp"
#include "sylvan/random.hpp"
#include "sylvan/score.hpp"

namespace sylvan {

inline constexpr std::string_view kEngineName = "Sylvan";
inline constexpr std::string_view kEngineVersion = "0.1.0";

struct EngineOptions {
  SearchConfig search;
  std::uint64_t seed = 1;
  std::ostream* search_log = nullptr;  // newline-JSON record per genmove
};

inline std::optional<Player> parse_gtp_color(std::string_view text) {
  std::string s;
  for (char ch : text) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (s == "b" || s == "black") return Player::Black;
  if (s == "w" || s == "white") return Player::White;
  return std::nullopt;
}

class GtpEngine {
 public:
  GtpEngine(EngineOptions options, Evaluator& evaluator)
      : options_(std::move(options)), tree_(Position(kMaxBoardSize), options_.search, evaluator) {}

  const Position& position() const { return tree_.root_position(); }
  const Tree& tree() const { return tree_; }
  bool quit_requested() const { return quit_; }

  // Handles one input line and returns the full response including the
  // trailing blank line, or "" for empty and comment-only lines.
  std::string handle(std::string_view raw) {
    tree_.stop_pondering();
    std::string line = clean(raw);
    std::vector<std::string> words;
    std::istringstream in(line);
    for (std::string w; in >> w;) words.push_back(std::move(w));
    if (words.empty()) return "";

    std::string id;
    std::size_t first = 0;
    if (std::all_of(words[0].begin(), words[0].end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
      id = words[0];
      first = 1;
    }
    if (first >= words.size()) return "?" + id + " missing command\n\n";
    const std::string& command = words[first];
    std::vector<std::string> args(words.begin() + static_cast<std::ptrdiff_t>(first) + 1, words.end());

    std::string response;
    bool ok = true;
    try {
      ok = dispatch(command, args, response);
    } catch (const std::exception& e) {
      ok = false;
      response = e.what();
    }
    if (ok && options_.search.ponder && !quit_ && !game_over()) tree_.start_pondering(derive_seed(options_.seed, ++ponder_count_));
    std::string out = (ok ? "=" : "?") + id;
    if (!response.empty()) out += " " + response;
    return out + "\n\n";
  }

  // Reads commands until quit or end of input.
  void serve(std::istream& in, std::ostream& out) {
    for (std::string line; !quit_ && std::getline(in, line);) {
      std::string response = handle(line);
      if (response.empty()) continue;
      out << response;
      out.flush();
    }
    tree_.stop_pondering();
  }

  static std::vector<std::string> commands() {
    return {"protocol_version", "name",       "version",      "known_command", "list_commands",
            "boardsize",        "clear_board", "komi",         "play",          "genmove",
            "final_score",      "undo",        "time_settings", "time_left",    "quit"};
  }

 private:
  // Drops control characters and comments, turns tabs into spaces.
  static std::string clean(std::string_view raw) {
    std::string out;
    for (char ch : raw) {
      if (ch == '#') break;
      if (ch == '\t') {
        out.push_back(' ');
      } else if (static_cast<unsigned char>(ch) >= 32 && ch != 127) {
        out.push_back(ch);
      }
    }
    return out;
  }

  bool game_over() const { return position().consecutive_passes() >= 2; }

  bool dispatch(const std::string& command, const std::vector<std::string>& args, std::string& response) {
    if (command == "protocol_version") {
      response = "2";
    } else if (command == "name") {
      response = kEngineName;
    } else if (command == "version") {
      response = kEngineVersion;
    } else if (command == "known_command") {
      if (args.size() != 1) return fail(response, "syntax error");
      auto known = commands();
      response = std::find(known.begin(), known.end(), args[0]) != known.end() ? "true" : "false";
    } else if (command == "list_commands") {
      for (const auto& c : commands()) response += (response.empty() ? "" : "\n") + c;
    } else if (command == "quit") {
      quit_ = true;
    } else if (command == "boardsize") {
      int size = 0;
      if (args.size() != 1 || !parse_int(args[0], size)) return fail(response, "syntax error");
      if (size < 2 || size > kMaxBoardSize) return fail(response, "unacceptable size");
      new_game(size);
    } else if (command == "clear_board") {
      new_game(position().size());
    } else if (command == "komi") {
      double komi = 0;
      if (args.size() != 1 || !parse_double(args[0], komi)) return fail(response, "syntax error");
      tree_.mutable_config().komi = komi;
      tree_.reset(position());
    } else if (command == "play") {
      return play(args, response);
    } else if (command == "genmove") {
      return genmove(args, response);
    } else if (command == "final_score") {
      response = format_score(score_report().score.margin);
    } else if (command == "undo") {
      if (history_.empty()) return fail(response, "cannot undo");
      Position previous = std::move(history_.back());
      history_.pop_back();
      tree_.reset(std::move(previous));
    } else if (command == "time_settings" || command == "time_left") {
      // Accepted and ignored: moves use a fixed rollout budget.
    } else {
      return fail(response, "unknown command");
    }
    return true;
  }

  bool play(const std::vector<std::string>& args, std::string& response) {
    if (args.size() != 2) return fail(response, "syntax error");
    auto color = parse_gtp_color(args[0]);
    auto move = parse_gtp_vertex(args[1], position().size());
    if (!color || !move) return fail(response, "syntax error");
    if (move->is_resign()) return fail(response, "illegal move");
    set_to_move(*color);
    if (!position().is_legal(*move)) return fail(response, "illegal move");
    history_.push_back(position());
    tree_.advance(*move);
    return true;
  }

  bool genmove(const std::vector<std::string>& args, std::string& response) {
    if (args.size() != 1) return fail(response, "syntax error");
    auto color = parse_gtp_color(args[0]);
    if (!color) return fail(response, "syntax error");
    set_to_move(*color);
    const Position& pos = position();
    std::uint64_t seed = derive_seed(options_.seed, static_cast<std::uint64_t>(pos.move_number()));
    SearchResult result = tree_.search(seed);
    if (options_.search_log != nullptr) *options_.search_log << search_log_line(result, pos) << "\n" << std::flush;

    Move chosen = result.best;
    const bool opponent_passed = pos.move_number() > 0 && pos.last_move().is_pass();
    if (needs_dead_stone_report(result.win_rate, opponent_passed, tree_.config())) {
      DeadStoneReport report = score_report();
      switch (decide_resign_or_pass(pos.to_move(), result.win_rate, opponent_passed, report, tree_.config())) {
        case Decision::Resign:
          response = "resign";
          return true;
        case Decision::Pass:
          chosen = Move::pass();
          break;
        case Decision::PlayBest:
          break;
      }
    }
    if (!pos.is_legal(chosen)) chosen = Move::pass();
    response = to_gtp_vertex(chosen, pos.size());
    history_.push_back(pos);
    tree_.advance(chosen);
    return true;
  }

  DeadStoneReport score_report() const {
    const auto& cfg = tree_.config();
    return estimate_dead_and_score(position(), cfg.dead_stone_trials, cfg.komi,
                                   derive_seed(options_.seed, 0x5c0e + static_cast<std::uint64_t>(position().move_number())),
                                   1, cfg.playout);
  }

  void set_to_move(Player p) {
    if (position().to_move() == p) return;
    Position pos = position();
    pos.set_to_move(p);
    tree_.reset(std::move(pos));
  }

  void new_game(int size) {
    history_.clear();
    tree_.reset(Position(size));
  }

  static bool fail(std::string& response, std::string message) {
    response = std::move(message);
    return false;
  }

  static bool parse_int(const std::string& s, int& out) {
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && end == s.data() + s.size();
  }

  static bool parse_double(const std::string& s, double& out) {
    auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && end == s.data() + s.size();
  }

  EngineOptions options_;
  Tree tree_;
  std::vector<Position> history_;
  std::uint64_t ponder_count_ = 0;
  bool quit_ = false;
};

}  // namespace sylvan
