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

// Move prediction as consumed by the search: the evaluator contract, the
// deterministic heuristic baseline that stands in for a trained network, and
// the rule that turns a ranked distribution into an expansion set.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sylvan/board.hpp"
#include "sylvan/patterns.hpp"
#include "sylvan/types.hpp"

namespace sylvan {

struct PolicyEntry {
  Move move;
  double probability = 0.0;

  friend bool operator==(const PolicyEntry&, const PolicyEntry&) = default;
};

// Legal placements sorted by descending probability; ties are broken by
// move index (row * size + col).
struct PolicyResult {
  std::vector<PolicyEntry> entries;

  bool empty() const { return entries.empty(); }
  std::size_t size() const { return entries.size(); }
  double total() const {
    double sum = 0.0;
    for (const auto& e : entries) sum += e.probability;
    return sum;
  }
};

// Sorts by descending probability, index-ascending among equals.
inline void sort_entries(std::vector<PolicyEntry>& entries, int board_size) {
  std::sort(entries.begin(), entries.end(), [board_size](const PolicyEntry& a, const PolicyEntry& b) {
    if (a.probability != b.probability) return a.probability > b.probability;
    return a.move.coord.index(board_size) < b.move.coord.index(board_size);
  });
}

class EvaluatorUnavailable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvaluatorRequest {
  std::uint64_t id = 0;
  Position position;
  int max_moves = kMaxPoints;
};

struct EvaluatorResponse {
  std::uint64_t id = 0;
  std::vector<PolicyEntry> entries;  // at most max_moves, sorted
};

// Blocking batch evaluation. Responses may come back in any order and are
// matched by id. Implementations must be safe to call from many threads.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::vector<EvaluatorResponse> evaluate_batch(std::span<const EvaluatorRequest> requests) = 0;
  virtual std::string name() const = 0;

  PolicyResult evaluate(const Position& pos, int max_moves = kMaxPoints) {
    EvaluatorRequest request{0, pos, max_moves};
    auto responses = evaluate_batch(std::span<const EvaluatorRequest>(&request, 1));
    if (responses.size() != 1) throw EvaluatorUnavailable("evaluator returned no response");
    return PolicyResult{std::move(responses.front().entries)};
  }
};

// Heuristic class weights of the baseline policy, in logits.
struct BaselineWeights {
  double capture = 8.0;         // fills the last liberty of an opponent group
  double capture_per_stone = 0.25;
  double escape = 6.0;          // extends an own group out of atari
  double pattern = 2.0;         // 3x3 shape next to the last move
  double proximity = 1.5;       // decays with distance from our previous move
  double own_eye = -6.0;        // fills an own true eye
  double self_atari = -12.0;    // leaves the placed group with one liberty
  std::array<double, 4> line = {-1.0, -0.3, 0.3, 0.2};  // first to fourth line
};

namespace detail {

inline double baseline_score(const Position& pos, Vertex v, const BaselineWeights& w, const PatternTable& table) {
  const Stone c = pos.to_move_stone();
  const Stone opp = opposite(c);
  double score = 0.0;

  bool captures = false;
  int captured_stones = 0;
  bool escapes = false;
  std::array<Vertex, 4> seen{};
  int n_seen = 0;
  for (int d : pos.dirs()) {
    Vertex u = static_cast<Vertex>(v + d);
    Stone s = pos.stone(u);
    if (!Position::is_stone(s) || pos.group_libs(u) != 1) continue;
    Vertex g = pos.group_root(u);
    if (std::find(seen.begin(), seen.begin() + n_seen, g) != seen.begin() + n_seen) continue;
    seen[n_seen++] = g;
    if (s == opp) {
      captures = true;
      captured_stones += pos.group_stones(g);
    } else {
      escapes = true;
    }
  }
  if (captures) score += w.capture + w.capture_per_stone * std::min(captured_stones, 20);
  if (escapes && !captures && pos.liberties_after(v, c, 2) >= 2) score += w.escape;

  const Vertex last = pos.last_vertex();
  if (last != kNoVertex) {
    Coord a = pos.coord(v);
    Coord b = pos.coord(last);
    if (std::abs(a.col - b.col) <= 1 && std::abs(a.row - b.row) <= 1 && table.matches(pos, v)) score += w.pattern;
  }
  const Vertex mine = pos.previous_vertex();
  if (mine != kNoVertex && Position::is_stone(pos.stone(mine))) {
    Coord a = pos.coord(v);
    Coord b = pos.coord(mine);
    int dist = std::abs(a.col - b.col) + std::abs(a.row - b.row);
    score += w.proximity * std::exp(-0.5 * (dist - 1));
  }

  Coord p = pos.coord(v);
  int edge = std::min({p.col, p.row, pos.size() - 1 - p.col, pos.size() - 1 - p.row});
  if (edge < static_cast<int>(w.line.size())) score += w.line[edge];

  if (!captures && pos.liberties_after(v, c, 2) < 2) {
    score += w.self_atari;
  } else if (pos.is_true_eye(v, c)) {
    score += w.own_eye;
  }
  return score;
}

}  // namespace detail

// Deterministic stand-in for the network: heuristic logits over the legal
// placements, softmax at temperature 1. Empty when no placement is legal.
inline PolicyResult baseline_policy(const Position& pos, const BaselineWeights& weights = {}) {
  const PatternTable& table = default_patterns();
  PolicyResult result;
  std::vector<double> logits;
  for (int row = 0; row < pos.size(); ++row) {
    for (int col = 0; col < pos.size(); ++col) {
      Vertex v = pos.vertex(Coord{col, row});
      if (!pos.is_legal_vertex(v)) continue;
      result.entries.push_back({Move::place(col, row), 0.0});
      logits.push_back(detail::baseline_score(pos, v, weights, table));
    }
  }
  if (logits.empty()) return result;
  double top = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    result.entries[i].probability = std::exp(logits[i] - top);
    sum += result.entries[i].probability;
  }
  for (auto& e : result.entries) e.probability /= sum;
  sort_entries(result.entries, pos.size());
  return result;
}

// Evaluates in-process with baseline_policy.
class BuiltinEvaluator : public Evaluator {
 public:
  explicit BuiltinEvaluator(BaselineWeights weights = {}) : weights_(weights) {}

  std::vector<EvaluatorResponse> evaluate_batch(std::span<const EvaluatorRequest> requests) override {
    if (requests.empty()) throw std::invalid_argument("empty evaluation batch");
    std::vector<EvaluatorResponse> out;
    out.reserve(requests.size());
    for (const auto& r : requests) {
      auto policy = baseline_policy(r.position, weights_);
      if (static_cast<int>(policy.entries.size()) > r.max_moves) policy.entries.resize(static_cast<std::size_t>(r.max_moves));
      out.push_back({r.id, std::move(policy.entries)});
    }
    return out;
  }

  std::string name() const override { return "builtin"; }

 private:
  BaselineWeights weights_;
};

// Shortest prefix whose cumulative probability reaches the threshold
// (boundary included), clipped to [min_moves, max_moves].
inline std::vector<Move> select_expansion_set(const PolicyResult& pr, double cumulative_threshold = 0.8,
                                              int max_moves = 20, int min_moves = 1) {
  if (!(cumulative_threshold > 0.0 && cumulative_threshold <= 1.0)) {
    throw std::invalid_argument("cumulative threshold must be in (0, 1]");
  }
  if (min_moves < 1 || max_moves < min_moves) throw std::invalid_argument("need 1 <= min_moves <= max_moves");
  // Absorbs rounding in sums such as 0.5 + 0.3 against 0.8.
  constexpr double kSlack = 1e-9;
  std::vector<Move> moves;
  double cumulative = 0.0;
  for (const auto& e : pr.entries) {
    if (static_cast<int>(moves.size()) >= max_moves) break;
    if (static_cast<int>(moves.size()) >= min_moves && cumulative >= cumulative_threshold - kSlack) break;
    moves.push_back(e.move);
    cumulative += e.probability;
  }
  return moves;
}

// The raw policy as a player: its most probable move that does not fill one
// of the mover's own true eyes; Pass when nothing else remains.
inline Move top_policy_move(const Position& pos, const PolicyResult& pr) {
  const Stone own = pos.to_move_stone();
  for (const auto& e : pr.entries) {
    if (e.move.is_place() && pos.is_true_eye(pos.vertex(e.move.coord), own)) continue;
    return e.move;
  }
  return Move::pass();
}

}  // namespace sylvan
