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

// Engine-vs-engine matches and the rollout-throughput benchmark.
//
// A match is a number of groups of games; the report gives each group's
// win rate for engine A, their mean, and the sample standard deviation of
// the group means. Engines are in-process agents (search, raw policy,
// uniform random) or any GTP program run as a subprocess. Each game starts
// with a few opening moves drawn from the builtin policy's softmax so that
// deterministic engines still play different games; every game is kept as
// an SGF record scored by area on its final board.

#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sylvan/board.hpp"
#include "sylvan/gtp.hpp"
#include "sylvan/mcts.hpp"
#include "sylvan/playout.hpp"
#include "sylvan/policy.hpp"
#include "sylvan/random.hpp"
#include "sylvan/score.hpp"
#include "sylvan/sgf.hpp"

namespace sylvan {

// The engine process died or stopped answering.
class EngineCrashed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The engine answered a command with a GTP failure.
class EngineRefused : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A player seen from the referee. play() reports a move by the opponent (or
// a forced opening move); genmove() chooses a move and plays it on the
// agent's own board.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void new_game(int size, double komi) = 0;
  virtual void play(Player who, Move m) = 0;
  virtual Move genmove(Player who) = 0;
};

// Agents that keep a Position of their own.
class BoardAgent : public Agent {
 public:
  void new_game(int size, double) override { pos_ = Position(size); }
  void play(Player who, Move m) override { apply(who, m); }
  Move genmove(Player who) override {
    pos_.set_to_move(who);
    Move m = choose(pos_);
    apply(who, m);
    return m;
  }

 protected:
  virtual Move choose(const Position& pos) = 0;

 private:
  void apply(Player who, Move m) {
    pos_.set_to_move(who);
    pos_.apply(m);
  }

  Position pos_;
};

// Plays the evaluator's top move (raw policy, no search).
class PolicyAgent : public BoardAgent {
 public:
  explicit PolicyAgent(std::shared_ptr<Evaluator> evaluator) : evaluator_(std::move(evaluator)) {}

 protected:
  Move choose(const Position& pos) override { return top_policy_move(pos, evaluator_->evaluate(pos)); }

 private:
  std::shared_ptr<Evaluator> evaluator_;
};

// Uniformly random legal move that does not fill an own true eye.
class RandomAgent : public BoardAgent {
 public:
  explicit RandomAgent(std::uint64_t seed) : rng_(seed) {}

 protected:
  Move choose(const Position& pos) override {
    std::vector<Move> moves;
    for (const Move& m : pos.legal_moves()) {
      if (m.is_place() && !pos.is_true_eye(pos.vertex(m.coord), pos.to_move_stone())) moves.push_back(m);
    }
    if (moves.empty()) return Move::pass();
    return moves[uniform_below(rng_, static_cast<std::uint32_t>(moves.size()))];
  }

 private:
  Rng rng_;
};

// Talks GTP to an engine through exchange(), which sends one command line
// and returns the complete response.
class GtpDrivenAgent : public Agent {
 public:
  void new_game(int size, double komi) override {
    size_ = size;
    command("boardsize " + std::to_string(size));
    command("clear_board");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", komi);
    command(std::string("komi ") + buf);
  }

  void play(Player who, Move m) override {
    command(std::string("play ") + player_char(who) + " " + to_gtp_vertex(m, size_));
  }

  Move genmove(Player who) override {
    std::string reply = command(std::string("genmove ") + player_char(who));
    auto m = parse_gtp_vertex(reply, size_);
    if (!m) throw EngineRefused("genmove answer is not a vertex: " + reply);
    return *m;
  }

  // Sends a command and returns the text of a successful response.
  std::string command(const std::string& line) {
    std::string reply = exchange(line);
    while (!reply.empty() && (reply.back() == '\n' || reply.back() == '\r')) reply.pop_back();
    if (reply.empty() || (reply[0] != '=' && reply[0] != '?')) throw EngineCrashed("malformed GTP response: " + reply);
    auto start = reply.find_first_not_of("0123456789", 1);
    std::string text = start == std::string::npos ? "" : reply.substr(start);
    if (!text.empty() && text[0] == ' ') text.erase(0, 1);
    if (reply[0] == '?') throw EngineRefused("'" + line + "' failed: " + text);
    return text;
  }

 protected:
  virtual std::string exchange(const std::string& line) = 0;

 private:
  int size_ = kMaxBoardSize;
};

// The search engine in-process, driven through its GTP front-end.
class EngineAgent : public GtpDrivenAgent {
 public:
  EngineAgent(EngineOptions options, std::shared_ptr<Evaluator> evaluator)
      : evaluator_(std::move(evaluator)), engine_(std::move(options), *evaluator_) {}

  const GtpEngine& engine() const { return engine_; }

 protected:
  std::string exchange(const std::string& line) override { return engine_.handle(line); }

 private:
  std::shared_ptr<Evaluator> evaluator_;
  GtpEngine engine_;
};

// Any GTP engine run as `/bin/sh -c command`, talking over a socket pair
// on its stdin and stdout (stderr is inherited).
class GtpProcessAgent : public GtpDrivenAgent {
 public:
  explicit GtpProcessAgent(const std::string& command) {
    int fds[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0) throw EngineCrashed("socketpair failed");
    pid_ = ::fork();
    if (pid_ < 0) {
      ::close(fds[0]);
      ::close(fds[1]);
      throw EngineCrashed("fork failed");
    }
    if (pid_ == 0) {
      ::dup2(fds[1], STDIN_FILENO);
      ::dup2(fds[1], STDOUT_FILENO);
      ::close(fds[0]);
      ::close(fds[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(fds[1]);
    fd_ = fds[0];
  }

  ~GtpProcessAgent() override {
    if (fd_ >= 0) {
      try {
        exchange("quit");
      } catch (const std::exception&) {
        // Already gone.
      }
      ::close(fd_);
    }
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  GtpProcessAgent(const GtpProcessAgent&) = delete;
  GtpProcessAgent& operator=(const GtpProcessAgent&) = delete;

 protected:
  std::string exchange(const std::string& line) override {
    std::string out = line + "\n";
    std::size_t sent = 0;
    while (sent < out.size()) {
      ssize_t n = ::send(fd_, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) throw EngineCrashed("engine closed its input");
      sent += static_cast<std::size_t>(n);
    }
    // A response ends with an empty line.
    for (;;) {
      auto end = buffer_.find("\n\n");
      if (end != std::string::npos) {
        std::string reply = buffer_.substr(0, end + 1);
        buffer_.erase(0, end + 2);
        // Responses to anything before this command are stale.
        if (!reply.empty() && (reply[0] == '=' || reply[0] == '?')) return reply;
        continue;
      }
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
      if (n <= 0) throw EngineCrashed("engine exited");
      for (ssize_t i = 0; i < n; ++i) {
        if (chunk[i] != '\r') buffer_.push_back(chunk[i]);
      }
    }
  }

 private:
  pid_t pid_ = -1;
  int fd_ = -1;
  std::string buffer_;
};

// Engine description used on the command line and in reports:
//   mcts[:key=value,...]   keys: rollouts threads sigma topk min-moves
//                          threshold c ladder switch ponder
//   policy | random | gtp:<shell command>
struct AgentSpec {
  std::string kind = "mcts";
  SearchConfig search;
  std::string command;  // gtp only
  std::string text;     // as given

  static AgentSpec parse(std::string_view text) {
    AgentSpec spec;
    spec.text = std::string(text);
    auto colon = text.find(':');
    spec.kind = std::string(text.substr(0, colon));
    std::string_view rest = colon == std::string_view::npos ? std::string_view() : text.substr(colon + 1);
    if (spec.kind == "gtp") {
      if (rest.empty()) throw std::invalid_argument("gtp engine needs a command: gtp:<command>");
      spec.command = std::string(rest);
      return spec;
    }
    if (spec.kind != "mcts" && spec.kind != "policy" && spec.kind != "random") {
      throw std::invalid_argument("unknown engine kind: " + spec.kind);
    }
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
      if (item.empty()) continue;
      if (spec.kind != "mcts") throw std::invalid_argument(spec.kind + " takes no options");
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value: " + std::string(item));
      spec.set(std::string(item.substr(0, eq)), std::string(item.substr(eq + 1)));
    }
    spec.search.validate();
    return spec;
  }

 private:
  void set(const std::string& key, const std::string& value) {
    auto number = [&] {
      std::size_t used = 0;
      double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument("bad value for " + key + ": " + value);
      return v;
    };
    SearchConfig& s = search;
    if (key == "rollouts") {
      s.rollouts = static_cast<int>(number());
    } else if (key == "threads") {
      s.threads = static_cast<int>(number());
    } else if (key == "sigma") {
      s.sigma = number();
    } else if (key == "topk") {
      s.max_children = static_cast<int>(number());
    } else if (key == "min-moves") {
      s.min_children = static_cast<int>(number());
    } else if (key == "threshold") {
      s.cumulative_threshold = number();
    } else if (key == "c") {
      s.exploration = number();
    } else if (key == "ladder") {
      s.use_ladder = number() != 0;
    } else if (key == "switch") {
      s.move_switch = number() != 0;
    } else if (key == "ponder") {
      s.ponder = number() != 0;
    } else {
      throw std::invalid_argument("unknown engine option: " + key);
    }
  }
};

// Builds a fresh agent for one game. In-process agents share one builtin
// evaluator (it is stateless and thread-safe).
inline std::unique_ptr<Agent> make_agent(const AgentSpec& spec, std::uint64_t seed,
                                         std::shared_ptr<Evaluator> evaluator = nullptr) {
  if (!evaluator) evaluator = std::make_shared<BuiltinEvaluator>();
  if (spec.kind == "policy") return std::make_unique<PolicyAgent>(std::move(evaluator));
  if (spec.kind == "random") return std::make_unique<RandomAgent>(seed);
  if (spec.kind == "gtp") return std::make_unique<GtpProcessAgent>(spec.command);
  EngineOptions options;
  options.search = spec.search;
  options.seed = seed;
  return std::make_unique<EngineAgent>(options, std::move(evaluator));
}

struct GameOptions {
  int size = 9;
  double komi = 7.5;
  int opening_moves = 2;     // drawn from the builtin policy softmax
  int opening_support = 300; // most probable moves considered
  int max_moves = 0;         // 0: three times the board area
};

struct GameOutcome {
  GameRecord record;
  std::optional<Player> winner;  // empty on a drawn score
  double margin = 0.0;           // black - white - komi; 0 after resign/forfeit
  bool resigned = false;
  std::optional<Player> forfeited_by;
  std::string note;  // why the game was forfeited
};

namespace detail {

// Draws from the first `support` entries, renormalized.
inline Move sample_policy_move(const PolicyResult& pr, int support, Rng& rng) {
  std::size_t n = std::min(pr.entries.size(), static_cast<std::size_t>(std::max(1, support)));
  if (n == 0) return Move::pass();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += pr.entries[i].probability;
  double x = uniform_unit(rng) * total;
  for (std::size_t i = 0; i < n; ++i) {
    x -= pr.entries[i].probability;
    if (x < 0) return pr.entries[i].move;
  }
  return pr.entries[n - 1].move;
}

}  // namespace detail

// Plays one game. An agent that throws, answers with an illegal move or
// cannot be set up forfeits.
inline GameOutcome play_game(Agent& black, Agent& white, const GameOptions& options, std::uint64_t seed) {
  GameOutcome out;
  GameRecord& rec = out.record;
  rec.board_size = options.size;
  rec.komi = options.komi;
  Position pos(options.size);
  Agent* agents[2] = {&black, &white};
  auto forfeit = [&](Player p, const std::string& why) {
    out.forfeited_by = p;
    out.winner = opponent(p);
    out.note = why;
    rec.result = std::string(1, player_char(opponent(p))) + "+F";
    return out;
  };

  for (Player p : {Player::Black, Player::White}) {
    try {
      agents[static_cast<int>(p)]->new_game(options.size, options.komi);
    } catch (const std::exception& e) {
      return forfeit(p, e.what());
    }
  }

  Rng rng(seed);
  BaselineWeights weights;
  const int max_moves = options.max_moves > 0 ? options.max_moves : 3 * pos.area();
  while (pos.consecutive_passes() < 2 && pos.move_number() < max_moves) {
    const Player mover = pos.to_move();
    Agent& me = *agents[static_cast<int>(mover)];
    Agent& other = *agents[static_cast<int>(opponent(mover))];
    Move m = Move::pass();
    if (pos.move_number() < options.opening_moves) {
      m = detail::sample_policy_move(baseline_policy(pos, weights), options.opening_support, rng);
      try {
        me.play(mover, m);
      } catch (const std::exception& e) {
        return forfeit(mover, e.what());
      }
    } else {
      try {
        m = me.genmove(mover);
      } catch (const std::exception& e) {
        return forfeit(mover, e.what());
      }
    }
    if (m.is_resign()) {
      out.resigned = true;
      out.winner = opponent(mover);
      rec.result = std::string(1, player_char(opponent(mover))) + "+R";
      return out;
    }
    if (auto reason = pos.legality(m)) {
      return forfeit(mover, "illegal move " + to_gtp_vertex(m, pos.size()) + ": " + to_string(*reason));
    }
    try {
      other.play(mover, m);
    } catch (const std::exception& e) {
      return forfeit(opponent(mover), e.what());
    }
    pos.apply(m);
    rec.moves.emplace_back(mover, m);
  }
  out.margin = tromp_taylor_score(pos, options.komi).margin;
  out.winner = winner_of(out.margin);
  rec.result = format_score(out.margin);
  return out;
}

struct MatchOptions {
  int groups = 1;
  int games_per_group = 100;
  GameOptions game;
  bool alternate_colors = true;  // A takes Black in even-numbered games
  std::uint64_t seed = 1;
  int jobs = 1;  // games played concurrently
};

struct MatchGame {
  int group = 0;
  int index = 0;  // within the group
  std::uint64_t seed = 0;
  bool a_black = true;
  double a_score = 0.0;  // 1 win, 0.5 draw, 0 loss
  GameOutcome outcome;
};

struct MatchReport {
  std::string a;
  std::string b;
  MatchOptions options;
  std::vector<double> group_wins;   // A's points per group (draws count 1/2)
  std::vector<double> group_means;  // group_wins / games_per_group
  double mean = 0.0;                // mean of group means
  double stddev = 0.0;              // sample std of group means (0 for one group)
  int forfeits = 0;
  std::vector<MatchGame> games;

  static std::string sgf_name(const MatchGame& g) {
    return "g" + std::to_string(g.group) + "_" + std::to_string(g.index) + ".sgf";
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["a"] = a;
    j["b"] = b;
    j["board_size"] = options.game.size;
    j["komi"] = options.game.komi;
    j["groups"] = options.groups;
    j["games_per_group"] = options.games_per_group;
    j["alternate_colors"] = options.alternate_colors;
    j["opening_moves"] = options.game.opening_moves;
    j["seed"] = options.seed;
    j["group_wins"] = group_wins;
    j["group_means"] = group_means;
    j["mean"] = mean;
    j["std"] = stddev;
    j["forfeits"] = forfeits;
    j["games"] = nlohmann::ordered_json::array();
    for (const auto& g : games) {
      nlohmann::ordered_json e;
      e["group"] = g.group;
      e["index"] = g.index;
      e["seed"] = g.seed;
      e["a_color"] = g.a_black ? "B" : "W";
      e["result"] = g.outcome.record.result;
      e["a_score"] = g.a_score;
      e["moves"] = g.outcome.record.moves.size();
      if (g.outcome.forfeited_by) {
        e["forfeit"] = std::string(1, player_char(*g.outcome.forfeited_by));
        e["note"] = g.outcome.note;
      }
      e["sgf"] = sgf_name(g);
      j["games"].push_back(std::move(e));
    }
    return j;
  }

  // Writes report.json and one SGF per game into dir.
  void write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "report.json") << to_json().dump(2) << "\n";
    for (const auto& g : games) std::ofstream(dir / sgf_name(g)) << serialize_sgf(g.outcome.record);
  }
};

using AgentFactory = std::function<std::unique_ptr<Agent>(std::uint64_t seed)>;

inline MatchReport run_match(const AgentFactory& make_a, const AgentFactory& make_b, const MatchOptions& options,
                             std::string a_name = "a", std::string b_name = "b") {
  if (options.groups < 1 || options.games_per_group < 1) throw std::invalid_argument("need at least one game");
  MatchReport report;
  report.a = std::move(a_name);
  report.b = std::move(b_name);
  report.options = options;
  const int total = options.groups * options.games_per_group;
  report.games.resize(static_cast<std::size_t>(total));

  auto play_one = [&](int k) {
    MatchGame& g = report.games[static_cast<std::size_t>(k)];
    g.group = k / options.games_per_group;
    g.index = k % options.games_per_group;
    g.seed = derive_seed(options.seed, static_cast<std::uint64_t>(k));
    g.a_black = !options.alternate_colors || g.index % 2 == 0;
    std::unique_ptr<Agent> a;
    std::unique_ptr<Agent> b;
    try {
      a = make_a(derive_seed(g.seed, 1));
    } catch (const std::exception& e) {
      g.outcome.forfeited_by = g.a_black ? Player::Black : Player::White;
      g.outcome.note = e.what();
    }
    try {
      if (a) b = make_b(derive_seed(g.seed, 2));
    } catch (const std::exception& e) {
      g.outcome.forfeited_by = g.a_black ? Player::White : Player::Black;
      g.outcome.note = e.what();
    }
    if (a && b) {
      g.outcome = g.a_black ? play_game(*a, *b, options.game, g.seed) : play_game(*b, *a, options.game, g.seed);
    } else {
      g.outcome.record.board_size = options.game.size;
      g.outcome.record.komi = options.game.komi;
      g.outcome.winner = opponent(*g.outcome.forfeited_by);
      g.outcome.record.result = std::string(1, player_char(*g.outcome.winner)) + "+F";
    }
    const Player a_color = g.a_black ? Player::Black : Player::White;
    g.a_score = !g.outcome.winner ? 0.5 : *g.outcome.winner == a_color ? 1.0 : 0.0;
  };

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int k; (k = next.fetch_add(1)) < total;) play_one(k);
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < std::min(options.jobs, total); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  report.group_wins.assign(static_cast<std::size_t>(options.groups), 0.0);
  for (const auto& g : report.games) {
    report.group_wins[static_cast<std::size_t>(g.group)] += g.a_score;
    if (g.outcome.forfeited_by) ++report.forfeits;
  }
  for (double w : report.group_wins) report.group_means.push_back(w / options.games_per_group);
  double sum = 0.0;
  for (double m : report.group_means) sum += m;
  report.mean = sum / options.groups;
  if (options.groups > 1) {
    double ss = 0.0;
    for (double m : report.group_means) ss += (m - report.mean) * (m - report.mean);
    report.stddev = std::sqrt(ss / (options.groups - 1));
  }
  return report;
}

inline MatchReport run_match(const AgentSpec& a, const AgentSpec& b, const MatchOptions& options) {
  auto evaluator = std::make_shared<BuiltinEvaluator>();
  return run_match([&](std::uint64_t seed) { return make_agent(a, seed, evaluator); },
                   [&](std::uint64_t seed) { return make_agent(b, seed, evaluator); }, options, a.text, b.text);
}

// Mid-game 19x19 benchmark position: `plies` default-policy moves from
// the empty board.
inline Position bench_position(std::uint64_t seed = 2026, int plies = 120) {
  Position pos(19);
  Rng rng(seed);
  for (int i = 0; i < plies; ++i) pos.apply(default_policy_move(pos, rng));
  return pos;
}

struct BenchResult {
  int threads = 1;
  double seconds = 0.0;
  long long rollouts = 0;
  double rollouts_per_sec = 0.0;
  long long playouts = 0;         // playout-only baseline, no tree
  double playouts_per_sec = 0.0;
};

// Full rollouts (select, evaluate and expand, playout, backup) per second
// from bench_position(), next to bare playouts per second from the same
// position on the same number of threads.
inline BenchResult bench_rollouts(int threads, double seconds, Evaluator& evaluator, SearchConfig cfg = {},
                                  std::uint64_t seed = 1) {
  if (threads < 1 || !(seconds > 0)) throw std::invalid_argument("need threads >= 1 and seconds > 0");
  BenchResult r;
  r.threads = threads;
  r.seconds = seconds;
  const Position start = bench_position();
  cfg.threads = threads;
  cfg.ponder = false;
  const auto limit = std::chrono::duration<double>(seconds);

  auto t0 = std::chrono::steady_clock::now();
  Tree tree(start, cfg, evaluator);
  r.rollouts = tree.search_for(limit, seed).rollouts;
  double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.rollouts_per_sec = static_cast<double>(r.rollouts) / elapsed;

  std::atomic<long long> playouts{0};
  const auto deadline = std::chrono::steady_clock::now() + limit;
  auto work = [&](int w) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(w)));
    long long mine = 0;
    while (std::chrono::steady_clock::now() < deadline) {
      run_playout(start, cfg.playout, rng);
      ++mine;
    }
    playouts += mine;
  };
  t0 = std::chrono::steady_clock::now();
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
  for (auto& t : pool) t.join();
  elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.playouts = playouts.load();
  r.playouts_per_sec = static_cast<double>(r.playouts) / elapsed;
  return r;
}

}  // namespace sylvan
