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

// In-process stand-in for the policy service, speaking the wire protocol
// over a loopback socket. Its policy is a fixed function of the planes:
// weight c + 1 on every empty point c, so answers are easy to predict.

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "sylvan/wire.hpp"

namespace sylvan::testing {

class FakePolicyServer {
 public:
  enum class Mode { Normal, Silent, BadHandshake, Error };

  explicit FakePolicyServer(Mode mode = Mode::Normal) : mode_(mode) {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    int one = 1;
    setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(listen_fd_, 16) != 0) {
      throw std::runtime_error("cannot listen on loopback");
    }
    socklen_t len = sizeof(addr);
    getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
    acceptor_ = std::thread([this] { accept_loop(); });
  }

  ~FakePolicyServer() {
    stopping_ = true;
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    acceptor_.join();
    {
      std::lock_guard lock(mutex_);
      for (int fd : client_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& t : handlers_) t.join();
    for (int fd : client_fds_) ::close(fd);
  }

  int port() const { return port_; }
  wire::Endpoint endpoint() const { return {"127.0.0.1", port_}; }
  int requests_seen() const { return requests_.load(); }
  int connections_seen() const { return connections_.load(); }

  // The fake policy: empty point c gets weight c + 1, normalized, best first.
  static wire::Response answer(const wire::Request& r) {
    const int area = r.size * r.size;
    std::vector<wire::ScoredPoint> moves;
    double total = 0.0;
    for (int c = 0; c < area; ++c) {
      if (r.planes[static_cast<std::size_t>(9 * area + c)] == 1.0f) total += c + 1;
    }
    for (int c = area - 1; c >= 0 && static_cast<int>(moves.size()) < r.max_moves; --c) {
      if (r.planes[static_cast<std::size_t>(9 * area + c)] == 1.0f) {
        moves.push_back({c, static_cast<float>((c + 1) / total)});
      }
    }
    return {r.id, moves, std::nullopt};
  }

 private:
  void accept_loop() {
    while (!stopping_) {
      int fd = ::accept(listen_fd_, nullptr, nullptr);
      if (fd < 0) return;
      ++connections_;
      std::lock_guard lock(mutex_);
      client_fds_.push_back(fd);
      handlers_.emplace_back([this, fd] { serve(fd); });
    }
  }

  void serve(int fd) {
    wire::LineSocket sock(fd);
    auto forever = wire::LineSocket::Clock::now() + std::chrono::hours(1);
    try {
      std::string hello = sock.read_line(forever);
      if (mode_ == Mode::BadHandshake) {
        auto j = nlohmann::json::parse(hello);
        j["proto"] = 2;
        sock.write_all(j.dump() + "\n");
      } else {
        sock.write_all(hello + "\n");
      }
      for (;;) {
        std::string line = sock.read_line(forever);
        ++requests_;
        if (mode_ == Mode::Silent) continue;
        wire::Request r = wire::decode_request(line);
        wire::Response resp = answer(r);
        if (mode_ == Mode::Error) {
          resp.moves.clear();
          resp.error = "model not loaded";
        }
        sock.write_all(wire::encode_response(resp) + "\n");
      }
    } catch (const std::exception&) {
      // Client went away or the server is shutting down.
    }
    sock.release();  // closed by the destructor, after every handler joined
  }

  Mode mode_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<int> requests_{0};
  std::atomic<int> connections_{0};
  std::mutex mutex_;
  std::vector<int> client_fds_;
  std::vector<std::thread> handlers_;
  std::thread acceptor_;
};

}  // namespace sylvan::testing
