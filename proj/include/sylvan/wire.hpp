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

// Client side of the evaluator wire protocol: newline-delimited JSON over
// TCP. After connecting the client sends {"proto":1,"planes":N} and the
// server echoes it back. Each request carries one feature tensor as base64
// of little-endian float32 values (plane-major, then row-major).

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sodium.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <bit>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <deque>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "sylvan/features.hpp"
#include "sylvan/policy.hpp"

namespace sylvan {
namespace wire {

inline constexpr int kProtocolVersion = 1;

inline std::string feature_set_name(FeatureSet set) { return set == FeatureSet::Standard ? "standard" : "extended"; }

inline FeatureSet parse_feature_set(std::string_view name) {
  if (name == "standard") return FeatureSet::Standard;
  if (name == "extended") return FeatureSet::Extended;
  throw std::invalid_argument("unknown feature set: " + std::string(name));
}

inline std::string base64_encode(std::span<const std::uint8_t> bytes) {
  const int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_ENCODED_LEN(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), bytes.data(), bytes.size(), variant);
  out.resize(std::strlen(out.c_str()));
  return out;
}

inline std::vector<std::uint8_t> base64_decode(std::string_view text) {
  std::vector<std::uint8_t> out(text.size() / 4 * 3 + 3);
  std::size_t length = 0;
  const char* end = nullptr;
  if (sodium_base642bin(out.data(), out.size(), text.data(), text.size(), nullptr, &length, &end,
                        sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw std::invalid_argument("malformed base64");
  }
  out.resize(length);
  return out;
}

inline std::string encode_floats(std::span<const float> values) {
  std::vector<std::uint8_t> bytes(values.size() * 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = std::bit_cast<std::uint32_t>(values[i]);
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
  }
  return base64_encode(bytes);
}

inline std::vector<float> decode_floats(std::string_view text) {
  auto bytes = base64_decode(text);
  if (bytes.size() % 4 != 0) throw std::invalid_argument("plane payload is not a whole number of floats");
  std::vector<float> values(bytes.size() / 4);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + b]) << (8 * b);
    values[i] = std::bit_cast<float>(bits);
  }
  return values;
}

struct Request {
  std::uint64_t id = 0;
  int size = 19;
  FeatureSet set = FeatureSet::Extended;
  std::vector<float> planes;
  int max_moves = kMaxPoints;
};

struct ScoredPoint {
  int c = 0;  // row * size + col
  float p = 0.0f;
};

struct Response {
  std::uint64_t id = 0;
  std::vector<ScoredPoint> moves;
  std::optional<std::string> error;
};

inline std::string handshake_line(int planes) {
  nlohmann::ordered_json j;
  j["proto"] = kProtocolVersion;
  j["planes"] = planes;
  return j.dump();
}

inline std::string encode_request(const Request& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["size"] = r.size;
  j["set"] = feature_set_name(r.set);
  j["planes"] = encode_floats(r.planes);
  j["max_moves"] = r.max_moves;
  return j.dump();
}

inline Request decode_request(std::string_view line) {
  auto j = nlohmann::json::parse(line);
  Request r;
  r.id = j.at("id").get<std::uint64_t>();
  r.size = j.at("size").get<int>();
  r.set = parse_feature_set(j.at("set").get<std::string>());
  r.planes = decode_floats(j.at("planes").get<std::string>());
  r.max_moves = j.at("max_moves").get<int>();
  auto expected = static_cast<std::size_t>(plane_count(r.set) * r.size * r.size);
  if (r.planes.size() != expected) throw std::invalid_argument("plane payload has the wrong length");
  return r;
}

inline std::string encode_response(const Response& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  j["moves"] = nlohmann::ordered_json::array();
  for (const auto& m : r.moves) {
    nlohmann::ordered_json e;
    e["c"] = m.c;
    e["p"] = m.p;
    j["moves"].push_back(std::move(e));
  }
  if (r.error) j["error"] = *r.error;
  return j.dump();
}

inline Response decode_response(std::string_view line) {
  auto j = nlohmann::json::parse(line);
  Response r;
  r.id = j.at("id").get<std::uint64_t>();
  for (const auto& e : j.at("moves")) r.moves.push_back({e.at("c").get<int>(), e.at("p").get<float>()});
  if (auto it = j.find("error"); it != j.end() && !it->is_null()) r.error = it->get<std::string>();
  return r;
}

struct Endpoint {
  std::string host;
  int port = 0;
};

// Parses "tcp://host:port".
inline Endpoint parse_endpoint(std::string_view uri) {
  constexpr std::string_view kScheme = "tcp://";
  if (uri.substr(0, kScheme.size()) != kScheme) throw std::invalid_argument("evaluator address must start with tcp://");
  auto rest = uri.substr(kScheme.size());
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos || colon == 0) throw std::invalid_argument("evaluator address needs host:port");
  Endpoint e{std::string(rest.substr(0, colon)), 0};
  try {
    e.port = std::stoi(std::string(rest.substr(colon + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("bad evaluator port");
  }
  if (e.port <= 0 || e.port > 65535) throw std::invalid_argument("bad evaluator port");
  return e;
}

// A blocking line-oriented TCP connection with per-call deadlines.
class LineSocket {
 public:
  using Clock = std::chrono::steady_clock;

  LineSocket() = default;
  explicit LineSocket(int fd) : fd_(fd) {}
  LineSocket(const LineSocket&) = delete;
  LineSocket& operator=(const LineSocket&) = delete;
  LineSocket(LineSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)), buffer_(std::move(other.buffer_)) {}
  LineSocket& operator=(LineSocket&& other) noexcept {
    if (this != &other) {
      close();
      fd_ = std::exchange(other.fd_, -1);
      buffer_ = std::move(other.buffer_);
    }
    return *this;
  }
  ~LineSocket() { close(); }

  static LineSocket connect(const Endpoint& endpoint, Clock::time_point deadline) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* found = nullptr;
    std::string port = std::to_string(endpoint.port);
    if (getaddrinfo(endpoint.host.c_str(), port.c_str(), &hints, &found) != 0) {
      throw EvaluatorUnavailable("cannot resolve " + endpoint.host);
    }
    std::unique_ptr<addrinfo, decltype(&freeaddrinfo)> guard(found, freeaddrinfo);
    for (addrinfo* a = found; a != nullptr; a = a->ai_next) {
      int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
      if (fd < 0) continue;
      LineSocket sock(fd);
      if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
        int one = 1;
        setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
        return sock;
      }
      if (Clock::now() > deadline) break;
    }
    throw EvaluatorUnavailable("cannot connect to " + endpoint.host + ":" + port);
  }

  bool is_open() const { return fd_ >= 0; }

  // Gives up ownership of the descriptor without closing it.
  int release() {
    buffer_.clear();
    return std::exchange(fd_, -1);
  }

  void close() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    buffer_.clear();
  }

  void write_all(std::string_view data) {
    while (!data.empty()) {
      ssize_t sent = ::send(fd_, data.data(), data.size(), MSG_NOSIGNAL);
      if (sent <= 0) throw EvaluatorUnavailable("evaluator connection lost while sending");
      data.remove_prefix(static_cast<std::size_t>(sent));
    }
  }

  // Next line without its terminator; throws on timeout or disconnect.
  std::string read_line(Clock::time_point deadline) {
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now()).count();
      if (left <= 0) throw EvaluatorUnavailable("evaluator timed out");
      pollfd p{fd_, POLLIN, 0};
      int ready = ::poll(&p, 1, static_cast<int>(left));
      if (ready == 0) throw EvaluatorUnavailable("evaluator timed out");
      if (ready < 0) throw EvaluatorUnavailable("evaluator connection failed");
      char chunk[65536];
      ssize_t got = ::recv(fd_, chunk, sizeof(chunk), 0);
      if (got <= 0) throw EvaluatorUnavailable("evaluator closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(got));
    }
  }

 private:
  int fd_ = -1;
  std::string buffer_;
};

struct BatchingOptions {
  std::chrono::microseconds window{2000};
  std::size_t max_batch = 128;
  std::chrono::milliseconds timeout{5000};
};

// Collects requests from many threads for up to `window` (or `max_batch`
// requests), sends them in one write and wakes each caller with its own
// response. Wire ids are assigned here so callers cannot collide.
class BatchingClient {
 public:
  BatchingClient(Endpoint endpoint, int planes, BatchingOptions options = {})
      : endpoint_(std::move(endpoint)), planes_(planes), options_(options), worker_([this] { run(); }) {}

  ~BatchingClient() {
    {
      std::lock_guard lock(mutex_);
      stopping_ = true;
    }
    cv_.notify_all();
    worker_.join();
  }

  BatchingClient(const BatchingClient&) = delete;
  BatchingClient& operator=(const BatchingClient&) = delete;

  // The request id is replaced on the wire and restored in the response.
  std::future<Response> submit(Request request) {
    Pending p;
    p.caller_id = request.id;
    request.id = next_id_.fetch_add(1);
    p.wire_id = request.id;
    p.line = encode_request(request);
    p.line.push_back('\n');
    auto future = p.promise.get_future();
    {
      std::lock_guard lock(mutex_);
      if (queue_.empty()) first_arrival_ = Clock::now();
      queue_.push_back(std::move(p));
    }
    cv_.notify_all();
    return future;
  }

  Response call(Request request) { return submit(std::move(request)).get(); }

  std::uint64_t batches_sent() const { return batches_.load(); }
  std::uint64_t requests_sent() const { return requests_.load(); }

 private:
  using Clock = std::chrono::steady_clock;

  struct Pending {
    std::uint64_t caller_id = 0;
    std::uint64_t wire_id = 0;
    std::string line;
    std::promise<Response> promise;
  };

  void run() {
    std::unique_lock lock(mutex_);
    for (;;) {
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      auto flush_at = first_arrival_ + options_.window;
      cv_.wait_until(lock, flush_at, [&] { return stopping_ || queue_.size() >= options_.max_batch; });
      std::vector<Pending> batch;
      while (!queue_.empty() && batch.size() < options_.max_batch) {
        batch.push_back(std::move(queue_.front()));
        queue_.pop_front();
      }
      if (!queue_.empty()) first_arrival_ = Clock::now();
      lock.unlock();
      dispatch(batch);
      lock.lock();
    }
  }

  void ensure_connected(Clock::time_point deadline) {
    if (socket_.is_open()) return;
    LineSocket sock = LineSocket::connect(endpoint_, deadline);
    std::string hello = handshake_line(planes_);
    sock.write_all(hello + "\n");
    std::string echo = sock.read_line(deadline);
    nlohmann::json got;
    try {
      got = nlohmann::json::parse(echo);
    } catch (const nlohmann::json::exception&) {
      throw EvaluatorUnavailable("evaluator handshake is not JSON");
    }
    if (got != nlohmann::json::parse(hello)) {
      throw EvaluatorUnavailable("evaluator handshake mismatch: expected " + hello + ", got " + echo);
    }
    socket_ = std::move(sock);
  }

  void dispatch(std::vector<Pending>& batch) {
    auto deadline = Clock::now() + options_.timeout;
    try {
      ensure_connected(deadline);
      std::string payload;
      for (const auto& p : batch) payload += p.line;
      socket_.write_all(payload);
      batches_.fetch_add(1);
      requests_.fetch_add(batch.size());
      std::map<std::uint64_t, Pending*> waiting;
      for (auto& p : batch) waiting[p.wire_id] = &p;
      while (!waiting.empty()) {
        std::string line = socket_.read_line(deadline);
        Response r;
        try {
          r = decode_response(line);
        } catch (const std::exception& e) {
          throw EvaluatorUnavailable(std::string("malformed evaluator response: ") + e.what());
        }
        auto it = waiting.find(r.id);
        if (it == waiting.end()) continue;  // stale answer from an abandoned batch
        Pending* p = it->second;
        waiting.erase(it);
        if (r.error) {
          p->promise.set_exception(std::make_exception_ptr(EvaluatorUnavailable("evaluator error: " + *r.error)));
        } else {
          r.id = p->caller_id;
          p->promise.set_value(std::move(r));
        }
        p->line.clear();
        p->wire_id = 0;
      }
    } catch (const EvaluatorUnavailable&) {
      socket_.close();
      auto error = std::current_exception();
      for (auto& p : batch) {
        if (!p.line.empty()) p.promise.set_exception(error);
      }
    }
  }

  Endpoint endpoint_;
  int planes_;
  BatchingOptions options_;
  LineSocket socket_;
  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<Pending> queue_;
  Clock::time_point first_arrival_{};
  bool stopping_ = false;
  std::atomic<std::uint64_t> next_id_{1};
  std::atomic<std::uint64_t> batches_{0};
  std::atomic<std::uint64_t> requests_{0};
  std::thread worker_;  // last: starts after the members above exist
};

}  // namespace wire

// Evaluates positions with a remote policy service. Probabilities are
// masked to legal placements and renormalized.
class RemoteEvaluator : public Evaluator {
 public:
  RemoteEvaluator(const wire::Endpoint& endpoint, FeatureSet set = FeatureSet::Extended,
                  wire::BatchingOptions options = {}, int opponent_rank = 0)
      : set_(set), opponent_rank_(opponent_rank), client_(endpoint, plane_count(set), options) {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  }

  std::vector<EvaluatorResponse> evaluate_batch(std::span<const EvaluatorRequest> requests) override {
    if (requests.empty()) throw std::invalid_argument("empty evaluation batch");
    std::vector<std::future<wire::Response>> futures;
    futures.reserve(requests.size());
    for (const auto& r : requests) {
      wire::Request w;
      w.id = r.id;
      w.size = r.position.size();
      w.set = set_;
      w.planes = extract(r.position, r.position.to_move(), opponent_rank_, set_).data;
      w.max_moves = r.max_moves;
      futures.push_back(client_.submit(std::move(w)));
    }
    std::vector<EvaluatorResponse> out;
    out.reserve(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      wire::Response w = futures[i].get();
      out.push_back({w.id, to_entries(requests[i], w)});
    }
    return out;
  }

  std::string name() const override { return "remote"; }

  const wire::BatchingClient& client() const { return client_; }

 private:
  static std::vector<PolicyEntry> to_entries(const EvaluatorRequest& request, const wire::Response& w) {
    const Position& pos = request.position;
    const int n = pos.size();
    std::vector<PolicyEntry> entries;
    std::vector<bool> seen(static_cast<std::size_t>(n * n), false);
    double sum = 0.0;
    for (const auto& m : w.moves) {
      if (m.c < 0 || m.c >= n * n || seen[static_cast<std::size_t>(m.c)]) continue;
      seen[static_cast<std::size_t>(m.c)] = true;
      Coord c = Coord::from_index(m.c, n);
      if (!(m.p > 0.0f) || !pos.is_legal_vertex(pos.vertex(c))) continue;
      entries.push_back({Move::place(c), m.p});
      sum += m.p;
    }
    if (sum > 0.0) {
      for (auto& e : entries) e.probability /= sum;
    }
    sort_entries(entries, n);
    if (static_cast<int>(entries.size()) > request.max_moves) entries.resize(static_cast<std::size_t>(request.max_moves));
    return entries;
  }

  FeatureSet set_;
  int opponent_rank_;
  wire::BatchingClient client_;
};

}  // namespace sylvan
