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

// Synchronized Monte Carlo tree search. Each rollout walks the tree with
// noisy UCT, has the evaluator expand the leaf it reaches (blocking until
// the policy arrives), runs one default-policy playout from there and backs
// the result up the path.
//
// Statistics: a node's wins m are counted for the player who made the move
// leading into it, so a parent picks the child with the best m/n for itself.
// A node's first visit is its own expansion playout, hence for every
// expanded node n = 1 + sum of its children's n.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sylvan/board.hpp"
#include "sylvan/ladder.hpp"
#include "sylvan/playout.hpp"
#include "sylvan/policy.hpp"
#include "sylvan/random.hpp"

namespace sylvan {

struct SearchConfig {
  int rollouts = 1000;
  int threads = 1;
  double sigma = 0.05;        // upper end of the uniform noise on win rates
  double exploration = 1.0;   // UCT constant c
  double cumulative_threshold = 0.8;
  int max_children = 3;      // top-k cap on children per node
  int min_children = 1;
  double komi = 7.5;
  bool move_switch = false;   // widen to switch_max_children late in the game
  int switch_after = 140;
  int switch_max_children = 5;
  bool ponder = false;
  bool tree_reuse = true;
  bool virtual_loss = false;  // benchmarking aid; off by default
  bool use_ladder = true;
  double resign_margin = 10.0;
  double resign_win_rate = 0.1;
  int dead_stone_trials = 1000;
  PlayoutConfig playout;

  void validate() const {
    if (rollouts <= 0) throw std::invalid_argument("rollouts must be positive");
    if (threads <= 0) throw std::invalid_argument("threads must be positive");
    if (!(sigma >= 0.0 && sigma < 1.0)) throw std::invalid_argument("sigma must be in [0, 1)");
    if (!(cumulative_threshold > 0.0 && cumulative_threshold <= 1.0)) {
      throw std::invalid_argument("threshold must be in (0, 1]");
    }
    if (min_children < 1 || max_children < min_children || switch_max_children < min_children) {
      throw std::invalid_argument("need 1 <= min_children <= max_children");
    }
  }

  int children_limit(const Position& pos) const {
    return move_switch && pos.move_number() >= switch_after ? switch_max_children : max_children;
  }
};

enum class NodeState : std::uint8_t { Unexpanded, Pending, Expanded, Terminal };

class Node {
 public:
  Node(Move move, Player mover, int prior_rank) : move_(move), mover_(mover), prior_rank_(prior_rank) {}

  Move move() const { return move_; }
  Player mover() const { return mover_; }  // who played move()
  int prior_rank() const { return prior_rank_; }

  int visits() const { return static_cast<int>(visits_.load(std::memory_order_relaxed)); }
  double wins() const { return static_cast<double>(half_wins_.load(std::memory_order_relaxed)) / 2.0; }
  double win_rate() const {
    int n = visits();
    return n == 0 ? 0.0 : wins() / n;
  }
  int virtual_visits() const { return static_cast<int>(virtual_visits_.load(std::memory_order_relaxed)); }
  NodeState state() const { return state_.load(std::memory_order_acquire); }

  // Valid once state() is Expanded; fixed from then on.
  std::span<const std::unique_ptr<Node>> children() const { return children_; }

 private:
  friend class Tree;

  Move move_;
  Player mover_;
  int prior_rank_;
  std::atomic<std::uint32_t> visits_{0};
  std::atomic<std::uint64_t> half_wins_{0};  // 2 per win, 1 per draw
  std::atomic<std::uint32_t> virtual_visits_{0};
  std::atomic<NodeState> state_{NodeState::Unexpanded};
  std::vector<std::unique_ptr<Node>> children_;
};

struct ChildSummary {
  Move move;
  int visits = 0;
  double wins = 0.0;
  int prior_rank = 0;
};

struct SearchResult {
  Move best = Move::pass();
  double win_rate = 0.0;  // m/n of the best child, for the player to move
  int rollouts = 0;       // completed in this call
  int root_visits = 0;
  std::vector<ChildSummary> children;
};

// UCT choice over `count` arms whose statistics come from stats(i) ->
// {visits, wins}: unvisited arms first in order, then argmax of
// m/n + U[0, sigma] + c sqrt(ln N / n), ties to the lower index.
template <typename Stats>
std::size_t uct_choose(std::size_t count, Stats stats, int parent_visits, double exploration, double sigma,
                       Rng& rng) {
  const double log_parent = std::log(std::max(1, parent_visits));
  std::size_t best = 0;
  double best_score = -1e300;
  for (std::size_t i = 0; i < count; ++i) {
    auto [n, m] = stats(i);
    if (n == 0) return i;
    double score = m / n + exploration * std::sqrt(log_parent / n);
    if (sigma > 0.0) score += sigma * uniform_unit(rng);
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

// uct_choose over an expanded node's children. With virtual loss, visits in
// flight count as losses.
inline std::size_t uct_select(const Node& node, double exploration, double sigma, Rng& rng,
                              bool virtual_loss = false) {
  auto children = node.children();
  if (children.empty()) throw std::logic_error("uct_select on a node without children");
  auto stats = [&](std::size_t i) {
    const Node& child = *children[i];
    double n = child.visits() + (virtual_loss ? child.virtual_visits() : 0);
    return std::pair<double, double>{n, child.wins()};
  };
  return uct_choose(children.size(), stats, node.visits(), exploration, sigma, rng);
}

enum class Decision { PlayBest, Pass, Resign };

inline const char* to_string(Decision d) {
  switch (d) {
    case Decision::Pass:
      return "pass";
    case Decision::Resign:
      return "resign";
    default:
      return "play";
  }
}

// Whether decide_resign_or_pass could fire, so the (costly) dead-stone
// trials are only run when needed.
inline bool needs_dead_stone_report(double win_rate, bool opponent_passed, const SearchConfig& cfg) {
  return opponent_passed || win_rate < cfg.resign_win_rate;
}

// Resign when every trial loses by resign_margin or more and the search
// agrees (win rate below resign_win_rate); pass when the opponent passed and
// the cleaned-board score is ours; otherwise play the search's move.
inline Decision decide_resign_or_pass(Player me, double win_rate, bool opponent_passed,
                                      const DeadStoneReport& report, const SearchConfig& cfg = {}) {
  if (report.all_trials_lose_by(me, cfg.resign_margin) && win_rate < cfg.resign_win_rate) return Decision::Resign;
  if (opponent_passed && report.margin_for(me) > 0) return Decision::Pass;
  return Decision::PlayBest;
}

class Tree {
 public:
  Tree(Position root_position, SearchConfig cfg, Evaluator& evaluator)
      : cfg_(std::move(cfg)), evaluator_(&evaluator), root_position_(std::move(root_position)) {
    cfg_.validate();
    reset_root();
  }

  ~Tree() { stop_pondering(); }

  Tree(const Tree&) = delete;
  Tree& operator=(const Tree&) = delete;

  const Node& root() const { return *root_; }
  const Position& root_position() const { return root_position_; }
  const SearchConfig& config() const { return cfg_; }
  SearchConfig& mutable_config() { return cfg_; }

  // Runs exactly `rollouts` rollouts (cfg.rollouts when 0). Worker w draws
  // from derive_seed(seed, w).
  SearchResult search(std::uint64_t seed, int rollouts = 0) {
    stop_pondering();
    if (rollouts <= 0) rollouts = cfg_.rollouts;
    std::atomic<int> budget{rollouts};
    std::atomic<bool> stop{false};
    int done = run_workers(seed, [&] { return budget.fetch_sub(1) > 0; }, stop);
    return summarize(done);
  }

  // Runs until the time is up; for benchmarks.
  SearchResult search_for(std::chrono::duration<double> limit, std::uint64_t seed) {
    stop_pondering();
    auto deadline = std::chrono::steady_clock::now() + limit;
    std::atomic<bool> stop{false};
    int done = run_workers(seed, [&] { return std::chrono::steady_clock::now() < deadline; }, stop);
    return summarize(done);
  }

  // Background search on the current root until stop_pondering().
  void start_pondering(std::uint64_t seed) {
    stop_pondering();
    ponder_stop_ = false;
    ponder_thread_ = std::thread([this, seed] {
      try {
        run_workers(seed, [] { return true; }, ponder_stop_);
      } catch (const std::exception&) {
        // Pondering is best effort; the next real search reports errors.
      }
    });
  }

  void stop_pondering() {
    if (!ponder_thread_.joinable()) return;
    ponder_stop_ = true;
    ponder_thread_.join();
  }

  // Moves the root to the child for `played`, keeping its statistics, or to
  // a fresh node when the move was not searched (or reuse is off).
  void advance(Move played) {
    stop_pondering();
    Position next = root_position_.play(played);
    std::unique_ptr<Node> kept;
    if (cfg_.tree_reuse && root_->state() == NodeState::Expanded) {
      for (auto& child : root_->children_) {
        if (child->move() == played) {
          kept = std::move(child);
          break;
        }
      }
    }
    root_position_ = std::move(next);
    if (kept) {
      root_ = std::move(kept);
    } else {
      reset_root();
    }
  }

  // Replaces the root position and drops all statistics.
  void reset(Position pos) {
    stop_pondering();
    root_position_ = std::move(pos);
    reset_root();
  }

  static SearchResult summarize_node(const Node& root) {
    SearchResult r;
    r.root_visits = root.visits();
    if (root.state() != NodeState::Expanded) return r;
    int best_visits = -1;
    for (const auto& child : root.children()) {
      r.children.push_back({child->move(), child->visits(), child->wins(), child->prior_rank()});
      if (child->visits() > best_visits) {
        best_visits = child->visits();
        r.best = child->move();
        r.win_rate = child->win_rate();
      }
    }
    return r;
  }

 private:
  void reset_root() { root_ = std::make_unique<Node>(Move::pass(), opponent(root_position_.to_move()), 0); }

  SearchResult summarize(int done) {
    SearchResult r = summarize_node(*root_);
    r.rollouts = done;
    return r;
  }

  template <typename Claim>
  int run_workers(std::uint64_t seed, Claim claim, std::atomic<bool>& stop) {
    std::atomic<int> done{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&](int w) {
      Rng rng(derive_seed(seed, static_cast<std::uint64_t>(w)));
      try {
        while (!stop.load(std::memory_order_relaxed) && claim()) {
          rollout(rng);
          done.fetch_add(1, std::memory_order_relaxed);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        stop = true;
      }
    };
    if (cfg_.threads == 1) {
      work(0);
    } else {
      std::vector<std::thread> workers;
      for (int w = 0; w < cfg_.threads; ++w) workers.emplace_back(work, w);
      for (auto& t : workers) t.join();
    }
    if (failure) std::rethrow_exception(failure);
    return done.load();
  }

  void rollout(Rng& rng) {
    Position pos = root_position_;
    std::vector<Node*> path{root_.get()};
    Node* node = root_.get();
    for (;;) {
      NodeState state = node->state();
      if (state == NodeState::Expanded) {
        std::size_t i = uct_select(*node, cfg_.exploration, cfg_.sigma, rng, cfg_.virtual_loss);
        Node* child = node->children_[i].get();
        if (cfg_.virtual_loss) child->virtual_visits_.fetch_add(1, std::memory_order_relaxed);
        pos.apply(child->move());
        path.push_back(child);
        node = child;
        continue;
      }
      if (state == NodeState::Terminal) break;
      if (state == NodeState::Unexpanded) {
        NodeState expected = NodeState::Unexpanded;
        if (node->state_.compare_exchange_strong(expected, NodeState::Pending, std::memory_order_acq_rel)) {
          expand(*node, pos);
          break;
        }
        continue;
      }
      node->state_.wait(NodeState::Pending, std::memory_order_acquire);
    }

    play_out(pos, cfg_.playout, rng);
    const double margin = tromp_taylor_score(pos, cfg_.komi).margin;
    const std::optional<Player> winner = winner_of(margin);
    for (Node* n : path) {
      if (cfg_.virtual_loss && n != root_.get()) n->virtual_visits_.fetch_sub(1, std::memory_order_relaxed);
      std::uint64_t credit = !winner ? 1 : (*winner == n->mover() ? 2 : 0);
      n->half_wins_.fetch_add(credit, std::memory_order_relaxed);
      n->visits_.fetch_add(1, std::memory_order_relaxed);
    }
  }

  void expand(Node& node, const Position& pos) {
    try {
      if (pos.consecutive_passes() >= 2) {
        publish(node, NodeState::Terminal);
        return;
      }
      std::vector<Move> moves = expansion_moves(pos);
      if (moves.empty()) moves.push_back(Move::pass());
      node.children_.reserve(moves.size());
      for (std::size_t i = 0; i < moves.size(); ++i) {
        node.children_.push_back(std::make_unique<Node>(moves[i], pos.to_move(), static_cast<int>(i)));
      }
      publish(node, NodeState::Expanded);
    } catch (...) {
      node.children_.clear();
      publish(node, NodeState::Unexpanded);
      throw;
    }
  }

  static void publish(Node& node, NodeState state) {
    node.state_.store(state, std::memory_order_release);
    node.state_.notify_all();
  }

  // Policy-ordered expansion set without own-eye fills, adjusted by ladder
  // reading when enabled.
  std::vector<Move> expansion_moves(const Position& pos) {
    const int limit = cfg_.children_limit(pos);
    PolicyResult policy = evaluator_->evaluate(pos, limit + 16);
    const Stone me = pos.to_move_stone();
    std::erase_if(policy.entries, [&](const PolicyEntry& e) { return pos.is_true_eye(pos.vertex(e.move.coord), me); });
    if (policy.entries.empty()) return {};
    LadderAdvice advice;
    if (cfg_.use_ladder) {
      advice = ladder_advice(pos);
      demote(policy, advice.vetoed);
    }
    std::vector<Move> moves = select_expansion_set(policy, cfg_.cumulative_threshold, limit, cfg_.min_children);
    for (Move m : advice.forced) {
      if (std::find(moves.begin(), moves.end(), m) != moves.end()) continue;
      if (static_cast<int>(moves.size()) >= limit) moves.pop_back();
      moves.push_back(m);
    }
    return moves;
  }

  struct LadderAdvice {
    std::vector<Move> vetoed;  // extensions of our groups into a working ladder
    std::vector<Move> forced;  // ladder captures of opponent groups
  };

  // Reads ladders for the groups at and next to the last two moves.
  static LadderAdvice ladder_advice(const Position& pos) {
    const Stone me = pos.to_move_stone();
    std::vector<Vertex> roots;
    for (Vertex recent : {pos.last_vertex(), pos.previous_vertex()}) {
      if (recent == kNoVertex) continue;
      auto consider = [&](Vertex u) {
        if (!Position::is_stone(pos.stone(u))) return;
        Vertex r = pos.group_root(u);
        if (std::find(roots.begin(), roots.end(), r) == roots.end()) roots.push_back(r);
      };
      consider(recent);
      for (int d : pos.dirs()) consider(static_cast<Vertex>(recent + d));
    }
    std::sort(roots.begin(), roots.end());
    LadderAdvice advice;
    for (Vertex r : roots) {
      const int libs = pos.group_libs(r);
      if (pos.stone(r) == me && libs == 1) {
        if (read_ladder(pos, pos.coord(r)) != LadderResult::CapturedByLadder) continue;
        Vertex lib = kNoVertex;
        pos.group_liberties(r, &lib, 1);
        if (!pos.captures_any(lib, me)) advice.vetoed.push_back(Move::place(pos.coord(lib)));
      } else if (pos.stone(r) == opposite(me) && libs == 2) {
        if (auto capture = ladder_capture_move(pos, pos.coord(r))) advice.forced.push_back(*capture);
      }
    }
    return advice;
  }

  // Moves vetoed moves out of the policy (renormalizing the rest) unless
  // nothing else would remain.
  static void demote(PolicyResult& policy, const std::vector<Move>& vetoed) {
    if (vetoed.empty()) return;
    auto is_vetoed = [&](const PolicyEntry& e) {
      return std::find(vetoed.begin(), vetoed.end(), e.move) != vetoed.end();
    };
    if (std::all_of(policy.entries.begin(), policy.entries.end(), is_vetoed)) return;
    double removed = 0.0;
    for (const auto& e : policy.entries) removed += is_vetoed(e) ? e.probability : 0.0;
    std::erase_if(policy.entries, is_vetoed);
    if (removed >= 1.0) return;
    for (auto& e : policy.entries) e.probability /= 1.0 - removed;
  }

  SearchConfig cfg_;
  Evaluator* evaluator_;
  Position root_position_;
  std::unique_ptr<Node> root_;
  std::atomic<bool> ponder_stop_{false};
  std::thread ponder_thread_;
};

// Checks n = 1 + sum(children n) and 0 <= m <= n on every expanded node.
// Returns the number of violations.
inline int audit_tree(const Node& node) {
  int bad = 0;
  if (node.wins() < 0 || node.wins() > node.visits()) ++bad;
  if (node.state() == NodeState::Expanded) {
    int sum = 0;
    for (const auto& child : node.children()) {
      sum += child->visits();
      bad += audit_tree(*child);
    }
    if (node.visits() != 1 + sum) ++bad;
  }
  return bad;
}

inline std::size_t count_nodes(const Node& node) {
  std::size_t n = 1;
  if (node.state() == NodeState::Expanded) {
    for (const auto& child : node.children()) n += count_nodes(*child);
  }
  return n;
}

// Canonical text dump of the tree, for determinism checks.
inline void dump_tree(const Node& node, int size, std::string& out, int depth = 0) {
  out.append(static_cast<std::size_t>(depth), ' ');
  out += to_gtp_vertex(node.move(), size) + " " + std::to_string(node.visits()) + " " +
         std::to_string(node.wins()) + "\n";
  if (node.state() != NodeState::Expanded) return;
  for (const auto& child : node.children()) dump_tree(*child, size, out, depth + 1);
}

// One search-log record: the root children after a search.
inline std::string search_log_line(const SearchResult& r, const Position& pos) {
  nlohmann::ordered_json j;
  j["move_number"] = pos.move_number();
  j["to_move"] = std::string(1, player_char(pos.to_move()));
  j["best"] = to_gtp_vertex(r.best, pos.size());
  j["win_rate"] = r.win_rate;
  j["rollouts"] = r.rollouts;
  j["root_visits"] = r.root_visits;
  j["children"] = nlohmann::ordered_json::array();
  for (const auto& c : r.children) {
    nlohmann::ordered_json e;
    e["move"] = to_gtp_vertex(c.move, pos.size());
    e["n"] = c.visits;
    e["q"] = c.visits == 0 ? 0.0 : c.wins / c.visits;
    e["rank"] = c.prior_rank;
    j["children"].push_back(std::move(e));
  }
  return j.dump();
}

}  // namespace sylvan
