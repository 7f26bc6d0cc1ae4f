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

// Default policy for rollouts: a priority cascade of capture, atari
// escape, nakade and 3x3 shape replies around the last move, falling back to
// a uniformly random move. No rule ever fills the mover's own true eye or
// puts a group of two or more stones into atari.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "sylvan/board.hpp"
#include "sylvan/patterns.hpp"
#include "sylvan/random.hpp"
#include "sylvan/score.hpp"

namespace sylvan {

struct PlayoutConfig {
  int max_moves = 0;  // 0 selects 3 x board area
  double komi = 7.5;
  bool use_atari = true;
  bool use_nakade = true;
  bool use_patterns = true;
  bool avoid_self_atari = true;
  const PatternTable* patterns = nullptr;  // null selects default_patterns()

  int move_cap(const Position& pos) const { return max_moves > 0 ? max_moves : 3 * pos.area(); }
  const PatternTable& pattern_table() const { return patterns ? *patterns : default_patterns(); }
};

namespace detail {

template <std::size_t N>
class VertexList {
 public:
  void add(Vertex v) {
    for (int i = 0; i < size_; ++i) {
      if (items_[i] == v) return;
    }
    if (size_ < static_cast<int>(N)) items_[size_++] = v;
  }
  int size() const { return size_; }
  bool empty() const { return size_ == 0; }
  Vertex operator[](int i) const { return items_[i]; }
  void clear() { size_ = 0; }

 private:
  std::array<Vertex, N> items_{};
  int size_ = 0;
};

// Would playing v put a group of two or more stones into atari (or worse)?
inline bool is_group_self_atari(const Position& pos, Vertex v, Stone c) {
  bool joins_group = false;
  for (int d : pos.dirs()) joins_group |= pos.stone(static_cast<Vertex>(v + d)) == c;
  if (!joins_group) return false;
  return pos.liberties_after(v, c, 2) < 2;
}

inline bool acceptable(const Position& pos, Vertex v, Stone c, const PlayoutConfig& cfg) {
  if (pos.stone(v) != Stone::Empty) return false;
  if (pos.is_true_eye(v, c)) return false;
  if (!pos.is_legal_vertex(v)) return false;
  if (cfg.avoid_self_atari && is_group_self_atari(pos, v, c)) return false;
  return true;
}

template <std::size_t N>
inline Vertex pick(const Position& pos, const VertexList<N>& candidates, Stone c, const PlayoutConfig& cfg,
                   Rng& rng) {
  VertexList<N> ok;
  for (int i = 0; i < candidates.size(); ++i) {
    if (acceptable(pos, candidates[i], c, cfg)) ok.add(candidates[i]);
  }
  if (ok.empty()) return kNoVertex;
  return ok[static_cast<int>(uniform_below(rng, static_cast<std::uint32_t>(ok.size())))];
}

// Liberties of opponent groups in atari among the last move's 3x3 area.
inline void capture_candidates(const Position& pos, Vertex last, Stone c, VertexList<16>& out) {
  const Stone opp = opposite(c);
  const int w = pos.stride();
  const std::array<int, 9> area = {0, -w - 1, -w, -w + 1, -1, 1, w - 1, w, w + 1};
  for (int off : area) {
    Vertex u = static_cast<Vertex>(last + off);
    if (pos.stone(u) != opp || pos.group_libs(u) != 1) continue;
    Vertex lib = kNoVertex;
    pos.group_liberties(u, &lib, 1);
    out.add(lib);
  }
}

// Own groups next to the last move that it put in atari: extend, or
// capture an adjacent opponent group in atari.
inline void escape_candidates(const Position& pos, Vertex last, Stone c, VertexList<16>& out) {
  const Stone opp = opposite(c);
  VertexList<4> groups;
  for (int d : pos.dirs()) {
    Vertex u = static_cast<Vertex>(last + d);
    if (pos.stone(u) == c && pos.group_libs(u) == 1) groups.add(pos.group_root(u));
  }
  for (int i = 0; i < groups.size(); ++i) {
    Vertex g = groups[i];
    Vertex lib = kNoVertex;
    pos.group_liberties(g, &lib, 1);
    if (pos.liberties_after(lib, c, 2) >= 2) out.add(lib);
    Vertex s = g;
    do {
      for (int d : pos.dirs()) {
        Vertex u = static_cast<Vertex>(s + d);
        if (pos.stone(u) == opp && pos.group_libs(u) == 1) {
          Vertex capture = kNoVertex;
          pos.group_liberties(u, &capture, 1);
          out.add(capture);
        }
      }
      s = pos.next_in_group(s);
    } while (s != g);
  }
}

// Vital point of a small eyespace, by shape: straight/bent three, pyramid
// four, bulky and crossed five, rabbity six. Other shapes have none.
inline Vertex vital_point(const Position& pos, std::span<const Vertex> region) {
  const int n = static_cast<int>(region.size());
  if (n < 3 || n > 6) return kNoVertex;
  auto inside = [&](Vertex u) { return std::find(region.begin(), region.end(), u) != region.end(); };
  std::array<int, 6> degree{};
  for (int i = 0; i < n; ++i) {
    for (int d : pos.dirs()) degree[i] += inside(static_cast<Vertex>(region[i] + d));
  }
  int best = 0;
  int best_count = 0;
  Vertex vital = kNoVertex;
  for (int i = 0; i < n; ++i) {
    if (degree[i] > best) {
      best = degree[i];
      best_count = 1;
      vital = region[i];
    } else if (degree[i] == best) {
      ++best_count;
    }
  }
  if (best_count != 1) return kNoVertex;
  bool has_block = false;
  const int w = pos.stride();
  for (Vertex u : region) {
    if (inside(static_cast<Vertex>(u + 1)) && inside(static_cast<Vertex>(u + w)) &&
        inside(static_cast<Vertex>(u + w + 1))) {
      has_block = true;
    }
  }
  switch (n) {
    case 3:
      return best == 2 ? vital : kNoVertex;
    case 4:
      return best == 3 ? vital : kNoVertex;
    case 5:
      return (best == 4 || (best == 3 && has_block)) ? vital : kNoVertex;
    default:
      return (best == 4 && has_block) ? vital : kNoVertex;
  }
}

// Empty regions touching the last move that are enclosed only by the last
// mover's stones (their eyespace) and small enough to kill by nakade.
inline void nakade_candidates(const Position& pos, Vertex last, Stone c, VertexList<16>& out) {
  constexpr int kMaxRegion = 6;
  std::array<Vertex, kMaxRegion + 1> region;
  for (int d : pos.dirs()) {
    Vertex start = static_cast<Vertex>(last + d);
    if (pos.stone(start) != Stone::Empty) continue;
    region[0] = start;
    int n = 1;
    bool enclosed = true;
    for (int i = 0; i < n && enclosed; ++i) {
      for (int d2 : pos.dirs()) {
        Vertex u = static_cast<Vertex>(region[i] + d2);
        Stone s = pos.stone(u);
        if (s == Stone::Empty) {
          bool seen = false;
          for (int j = 0; j < n; ++j) seen |= region[j] == u;
          if (seen) continue;
          if (n == kMaxRegion) {
            enclosed = false;
            break;
          }
          region[n++] = u;
        } else if (s == c) {
          enclosed = false;
          break;
        }
      }
    }
    if (!enclosed) continue;
    Vertex vital = vital_point(pos, std::span<const Vertex>(region.data(), static_cast<std::size_t>(n)));
    if (vital != kNoVertex) out.add(vital);
  }
}

inline void pattern_candidates(const Position& pos, Vertex last, const PatternTable& table, VertexList<16>& out) {
  const int w = pos.stride();
  const std::array<int, 8> ring = {-w - 1, -w, -w + 1, -1, 1, w - 1, w, w + 1};
  for (int off : ring) {
    Vertex u = static_cast<Vertex>(last + off);
    if (pos.stone(u) == Stone::Empty && table.matches(pos, u)) out.add(u);
  }
}

// Uniform over acceptable empty points. A few draws with replacement settle
// almost every call; the swap-remove pass handles crowded endgames. Both are
// uniform over the acceptable set, so their mixture is too.
inline Vertex random_vertex(const Position& pos, Stone c, const PlayoutConfig& cfg, Rng& rng) {
  auto empties = pos.empty_points();
  int n = static_cast<int>(empties.size());
  if (n == 0) return kNoVertex;
  for (int attempt = 0; attempt < 4; ++attempt) {
    Vertex v = empties[uniform_below(rng, static_cast<std::uint32_t>(n))];
    if (acceptable(pos, v, c, cfg)) return v;
  }
  std::array<Vertex, kMaxPoints> pool;
  std::copy(empties.begin(), empties.end(), pool.begin());
  while (n > 0) {
    int i = static_cast<int>(uniform_below(rng, static_cast<std::uint32_t>(n)));
    Vertex v = pool[i];
    if (acceptable(pos, v, c, cfg)) return v;
    pool[i] = pool[--n];
  }
  return kNoVertex;
}

}  // namespace detail

// Default-policy choice as a vertex; kNoVertex means pass.
inline Vertex default_policy_vertex(const Position& pos, Rng& rng, const PlayoutConfig& cfg = {}) {
  const Stone c = pos.to_move_stone();
  const Vertex last = pos.last_vertex();
  if (last != kNoVertex) {
    detail::VertexList<16> candidates;
    if (cfg.use_atari) {
      detail::capture_candidates(pos, last, c, candidates);
      if (Vertex v = detail::pick(pos, candidates, c, cfg, rng); v != kNoVertex) return v;
      candidates.clear();
      detail::escape_candidates(pos, last, c, candidates);
      if (Vertex v = detail::pick(pos, candidates, c, cfg, rng); v != kNoVertex) return v;
      candidates.clear();
    }
    if (cfg.use_nakade) {
      detail::nakade_candidates(pos, last, c, candidates);
      if (Vertex v = detail::pick(pos, candidates, c, cfg, rng); v != kNoVertex) return v;
      candidates.clear();
    }
    if (cfg.use_patterns) {
      detail::pattern_candidates(pos, last, cfg.pattern_table(), candidates);
      if (Vertex v = detail::pick(pos, candidates, c, cfg, rng); v != kNoVertex) return v;
    }
  }
  return detail::random_vertex(pos, c, cfg, rng);
}

inline Move default_policy_move(const Position& pos, Rng& rng, const PlayoutConfig& cfg = {}) {
  Vertex v = default_policy_vertex(pos, rng, cfg);
  return v == kNoVertex ? Move::pass() : Move::place(pos.coord(v));
}

// Plays the default policy in place until two consecutive passes or the
// move cap. Returns the number of moves played.
inline int play_out(Position& pos, const PlayoutConfig& cfg, Rng& rng) {
  const int cap = cfg.move_cap(pos);
  int played = 0;
  while (played < cap && pos.consecutive_passes() < 2) {
    Vertex v = default_policy_vertex(pos, rng, cfg);
    if (v == kNoVertex) {
      pos.apply_pass();
    } else {
      pos.apply_place(v);
    }
    ++played;
  }
  return played;
}

struct PlayoutResult {
  std::optional<Player> winner;  // empty on a drawn score
  double margin = 0.0;           // black - white - komi
  int moves = 0;
};

inline std::optional<Player> winner_of(double margin) {
  if (margin > 0) return Player::Black;
  if (margin < 0) return Player::White;
  return std::nullopt;
}

inline PlayoutResult run_playout(Position pos, const PlayoutConfig& cfg, Rng& rng) {
  PlayoutResult r;
  r.moves = play_out(pos, cfg, rng);
  r.margin = tromp_taylor_score(pos, cfg.komi).margin;
  r.winner = winner_of(r.margin);
  return r;
}

struct GroupStatus {
  Coord anchor;
  Player owner = Player::Black;
  int stones = 0;
  double alive_probability = 1.0;  // fraction of trials not ending as opponent area
  bool dead = false;
};

struct DeadStoneReport {
  int trials = 0;
  std::vector<GroupStatus> groups;
  std::vector<double> margins;  // per trial, black - white - komi
  ScoreResult score;            // Tromp-Taylor on the board with dead groups removed

  // Every trial ended with `p` behind by at least `points`.
  bool all_trials_lose_by(Player p, double points) const {
    if (margins.empty()) return false;
    return std::all_of(margins.begin(), margins.end(), [&](double m) {
      double mine = p == Player::Black ? m : -m;
      return mine <= -points;
    });
  }

  // Fraction of trials won by `p`.
  double win_fraction(Player p) const {
    if (margins.empty()) return 0.0;
    double wins = 0;
    for (double m : margins) {
      double mine = p == Player::Black ? m : -m;
      wins += mine > 0 ? 1.0 : mine == 0 ? 0.5 : 0.0;
    }
    return wins / static_cast<double>(margins.size());
  }

  // Final margin from p's point of view.
  double margin_for(Player p) const { return p == Player::Black ? score.margin : -score.margin; }
};

// Runs `trials` default-policy playouts from pos; groups whose anchor ends
// as opponent area in more than half of them are dead. Trial i always uses
// the stream derive_seed(seed, i), so results do not depend on `workers`.
inline DeadStoneReport estimate_dead_and_score(const Position& pos, int trials, double komi, std::uint64_t seed = 1,
                                               int workers = 1, const PlayoutConfig& base = {}) {
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  PlayoutConfig cfg = base;
  cfg.komi = komi;
  DeadStoneReport report;
  report.trials = trials;

  std::vector<Vertex> anchors;
  for (int row = 0; row < pos.size(); ++row) {
    for (int col = 0; col < pos.size(); ++col) {
      Vertex v = pos.vertex(Coord{col, row});
      if (Position::is_stone(pos.stone(v)) && pos.group_root(v) == v) anchors.push_back(v);
    }
  }
  std::vector<int> opponent_owned(anchors.size() * static_cast<std::size_t>(trials), 0);
  report.margins.assign(static_cast<std::size_t>(trials), 0.0);

  auto run_range = [&](int begin, int end) {
    for (int t = begin; t < end; ++t) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
      Position p = pos;
      play_out(p, cfg, rng);
      auto owners = area_owners(p);
      for (std::size_t g = 0; g < anchors.size(); ++g) {
        opponent_owned[g * trials + t] = owners[anchors[g]] == opposite(pos.stone(anchors[g]));
      }
      report.margins[t] = tromp_taylor_score(p, komi).margin;
    }
  };
  workers = std::clamp(workers, 1, trials);
  if (workers == 1) {
    run_range(0, trials);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back(run_range, trials * w / workers, trials * (w + 1) / workers);
    }
    for (auto& th : threads) th.join();
  }

  std::string diagram;
  std::vector<bool> removed(kMaxVertices, false);
  for (std::size_t g = 0; g < anchors.size(); ++g) {
    int dead_count = 0;
    for (int t = 0; t < trials; ++t) dead_count += opponent_owned[g * trials + t];
    GroupStatus status;
    status.anchor = pos.coord(anchors[g]);
    status.owner = pos.stone(anchors[g]) == Stone::Black ? Player::Black : Player::White;
    status.stones = pos.group_stones(anchors[g]);
    status.alive_probability = 1.0 - static_cast<double>(dead_count) / trials;
    status.dead = 2 * dead_count > trials;
    if (status.dead) {
      Vertex s = anchors[g];
      do {
        removed[s] = true;
        s = pos.next_in_group(s);
      } while (s != anchors[g]);
    }
    report.groups.push_back(status);
  }
  for (int row = 0; row < pos.size(); ++row) {
    for (int col = 0; col < pos.size(); ++col) {
      Vertex v = pos.vertex(Coord{col, row});
      Stone s = removed[v] ? Stone::Empty : pos.stone(v);
      diagram.push_back(s == Stone::Black ? 'X' : s == Stone::White ? 'O' : '.');
    }
    diagram.push_back('\n');
  }
  report.score = tromp_taylor_score(Position::from_diagram(diagram, pos.to_move()), komi);
  return report;
}

}  // namespace sylvan
