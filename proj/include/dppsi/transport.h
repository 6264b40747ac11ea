// Copyright 2026 The DP-PSI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "dppsi/error.h"
#include "dppsi/protocol.h"
#include "dppsi/wire.h"

namespace dppsi {

enum class Direction { kSent, kReceived };

struct FrameRecord {
  Direction direction;
  MessageType type;
  std::size_t bytes;

  friend bool operator==(const FrameRecord&, const FrameRecord&) = default;
};

// Message-level duplex link. Keeps a log of every frame it moved.
class Channel {
 public:
  virtual ~Channel() = default;

  void Send(const Message& m) {
    auto frame = m.Encode();
    SendFrame(frame);
    sent_ += frame.size();
    log_.push_back({Direction::kSent, m.type, frame.size()});
  }

  Message Receive() {
    auto frame = ReceiveFrame();
    received_ += frame.size();
    Message m = Message::Decode(frame);
    log_.push_back({Direction::kReceived, m.type, frame.size()});
    return m;
  }

  std::uint64_t bytes_sent() const { return sent_; }
  std::uint64_t bytes_received() const { return received_; }
  const std::vector<FrameRecord>& log() const { return log_; }

  virtual void Close() = 0;

 protected:
  virtual void SendFrame(const std::vector<std::uint8_t>& frame) = 0;
  virtual std::vector<std::uint8_t> ReceiveFrame() = 0;

 private:
  std::uint64_t sent_ = 0;
  std::uint64_t received_ = 0;
  std::vector<FrameRecord> log_;
};

// Both ends of an in-memory duplex link.
class InProcessChannel : public Channel {
 public:
  static std::pair<std::unique_ptr<InProcessChannel>,
                   std::unique_ptr<InProcessChannel>>
  MakePair() {
    auto shared = std::make_shared<Shared>();
    return {std::unique_ptr<InProcessChannel>(new InProcessChannel(shared, 0)),
            std::unique_ptr<InProcessChannel>(new InProcessChannel(shared, 1))};
  }

  ~InProcessChannel() override { Close(); }

  void Close() override {
    std::lock_guard lock(shared_->mu);
    shared_->closed[side_] = true;
    shared_->cv.notify_all();
  }

 protected:
  void SendFrame(const std::vector<std::uint8_t>& frame) override {
    std::lock_guard lock(shared_->mu);
    if (shared_->closed[side_] || shared_->closed[1 - side_]) {
      throw TransportError("channel closed");
    }
    shared_->queues[1 - side_].push_back(frame);
    shared_->cv.notify_all();
  }

  std::vector<std::uint8_t> ReceiveFrame() override {
    std::unique_lock lock(shared_->mu);
    auto& q = shared_->queues[side_];
    shared_->cv.wait(lock, [&] {
      return !q.empty() || shared_->closed[0] || shared_->closed[1];
    });
    if (q.empty()) throw TransportError("peer closed connection");
    auto frame = std::move(q.front());
    q.pop_front();
    return frame;
  }

 private:
  struct Shared {
    std::mutex mu;
    std::condition_variable cv;
    std::deque<std::vector<std::uint8_t>> queues[2];
    bool closed[2] = {false, false};
  };

  InProcessChannel(std::shared_ptr<Shared> shared, int side)
      : shared_(std::move(shared)), side_(side) {}

  std::shared_ptr<Shared> shared_;
  int side_;
};

namespace tcp_detail {

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  Fd(Fd&& o) noexcept : fd_(std::exchange(o.fd_, -1)) {}
  Fd& operator=(Fd&& o) noexcept {
    if (this != &o) {
      Reset();
      fd_ = std::exchange(o.fd_, -1);
    }
    return *this;
  }
  ~Fd() { Reset(); }

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void Reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_ = -1;
};

inline std::string ErrnoMessage(const std::string& what) {
  return what + ": " + std::strerror(errno);
}

struct AddrInfoDeleter {
  void operator()(addrinfo* ai) const { freeaddrinfo(ai); }
};

inline std::unique_ptr<addrinfo, AddrInfoDeleter> Resolve(const std::string& host,
                                                          std::uint16_t port,
                                                          bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  int rc = getaddrinfo(host.empty() ? nullptr : host.c_str(), service.c_str(),
                       &hints, &res);
  if (rc != 0) {
    throw TransportError("cannot resolve " + host + ": " + gai_strerror(rc));
  }
  return std::unique_ptr<addrinfo, AddrInfoDeleter>(res);
}

}  // namespace tcp_detail

// "host:port" split. An empty host means any / localhost.
struct Endpoint {
  std::string host;
  std::uint16_t port = 0;

  static Endpoint Parse(const std::string& s) {
    auto colon = s.rfind(':');
    if (colon == std::string::npos) throw DomainError("expected host:port, got " + s);
    Endpoint e;
    e.host = s.substr(0, colon);
    unsigned long port = 0;
    try {
      port = std::stoul(s.substr(colon + 1));
    } catch (const std::exception&) {
      throw DomainError("bad port in " + s);
    }
    if (port > 65535) throw DomainError("bad port in " + s);
    e.port = static_cast<std::uint16_t>(port);
    return e;
  }
};

class TcpChannel : public Channel {
 public:
  explicit TcpChannel(tcp_detail::Fd fd) : fd_(std::move(fd)) {
    int one = 1;
    setsockopt(fd_.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  // Retries until the peer is listening or the timeout elapses.
  static std::unique_ptr<TcpChannel> Connect(
      const Endpoint& ep,
      std::chrono::milliseconds timeout = std::chrono::seconds(10)) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    const std::string host = ep.host.empty() ? "127.0.0.1" : ep.host;
    while (true) {
      auto addrs = tcp_detail::Resolve(host, ep.port, false);
      for (addrinfo* ai = addrs.get(); ai; ai = ai->ai_next) {
        tcp_detail::Fd fd(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
        if (!fd.valid()) continue;
        if (::connect(fd.get(), ai->ai_addr, ai->ai_addrlen) == 0) {
          return std::make_unique<TcpChannel>(std::move(fd));
        }
      }
      if (std::chrono::steady_clock::now() >= deadline) {
        throw TransportError("cannot connect to " + host + ":" +
                             std::to_string(ep.port));
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
  }

  void Close() override {
    if (fd_.valid()) ::shutdown(fd_.get(), SHUT_RDWR);
    fd_.Reset();
  }

 protected:
  void SendFrame(const std::vector<std::uint8_t>& frame) override {
    std::size_t done = 0;
    while (done < frame.size()) {
      if (!fd_.valid()) throw TransportError("channel closed");
      ssize_t n = ::send(fd_.get(), frame.data() + done, frame.size() - done,
                         MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(tcp_detail::ErrnoMessage("send failed"));
      }
      done += static_cast<std::size_t>(n);
    }
  }

  std::vector<std::uint8_t> ReceiveFrame() override {
    std::vector<std::uint8_t> frame(kLengthFieldBytes);
    ReadExact(frame.data(), kLengthFieldBytes);
    std::uint32_t length = 0;
    for (int i = 3; i >= 0; --i) length = (length << 8) | frame[i];
    if (length < kFrameHeaderBytes - kLengthFieldBytes || length > kMaxFrameBytes) {
      throw WireError("implausible frame length " + std::to_string(length));
    }
    frame.resize(kLengthFieldBytes + length);
    ReadExact(frame.data() + kLengthFieldBytes, length);
    return frame;
  }

 private:
  void ReadExact(std::uint8_t* out, std::size_t n) {
    std::size_t done = 0;
    while (done < n) {
      if (!fd_.valid()) throw TransportError("channel closed");
      ssize_t r = ::recv(fd_.get(), out + done, n - done, 0);
      if (r == 0) throw TransportError("peer closed connection");
      if (r < 0) {
        if (errno == EINTR) continue;
        throw TransportError(tcp_detail::ErrnoMessage("recv failed"));
      }
      done += static_cast<std::size_t>(r);
    }
  }

  tcp_detail::Fd fd_;
};

// Accepts a single peer.
class TcpListener {
 public:
  explicit TcpListener(const Endpoint& ep) {
    auto addrs = tcp_detail::Resolve(ep.host, ep.port, true);
    for (addrinfo* ai = addrs.get(); ai; ai = ai->ai_next) {
      tcp_detail::Fd fd(::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol));
      if (!fd.valid()) continue;
      int one = 1;
      setsockopt(fd.get(), SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
      if (::bind(fd.get(), ai->ai_addr, ai->ai_addrlen) == 0 &&
          ::listen(fd.get(), 1) == 0) {
        fd_ = std::move(fd);
        break;
      }
    }
    if (!fd_.valid()) {
      throw TransportError(tcp_detail::ErrnoMessage(
          "cannot listen on " + ep.host + ":" + std::to_string(ep.port)));
    }
    sockaddr_storage addr{};
    socklen_t len = sizeof(addr);
    getsockname(fd_.get(), reinterpret_cast<sockaddr*>(&addr), &len);
    if (addr.ss_family == AF_INET) {
      port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
    } else {
      port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
    }
  }

  std::uint16_t port() const { return port_; }

  std::unique_ptr<TcpChannel> Accept() {
    while (true) {
      int fd = ::accept(fd_.get(), nullptr, nullptr);
      if (fd >= 0) return std::make_unique<TcpChannel>(tcp_detail::Fd(fd));
      if (errno != EINTR) throw TransportError(tcp_detail::ErrnoMessage("accept failed"));
    }
  }

 private:
  tcp_detail::Fd fd_;
  std::uint16_t port_ = 0;
};

namespace session_detail {

template <class Fn>
auto AbortOnError(Channel& ch, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ProtocolError&) {
    try {
      ch.Send(Message::Abort());
    } catch (const Error&) {
    }
    throw;
  } catch (const WireError&) {
    try {
      ch.Send(Message::Abort());
    } catch (const Error&) {
    }
    throw;
  }
}

}  // namespace session_detail

// Drives a sender over `ch`. The sender has no protocol output; its stats
// are its leakage profile.
template <PrimeOrderGroup G = Ristretto255>
SessionStats RunSenderSession(Channel& ch, const std::vector<std::string>& items,
                              MechanismParams params, Rng rng) {
  Sender<G> sender(items, params, std::move(rng));
  return session_detail::AbortOnError(ch, [&] {
    ch.Send(sender.Round1());
    Message y_b_sub = ch.Receive();
    protocol_detail::ExpectType(y_b_sub, MessageType::kYbSub);
    Message x_ab_pi = ch.Receive();
    ch.Send(sender.Round2(y_b_sub, x_ab_pi));
    return sender.stats();
  });
}

// Drives a receiver over `ch`. X^a is read before Y_sub^b is written so that
// blocking transports never have both peers writing at once.
template <PrimeOrderGroup G = Ristretto255>
DpIntersection RunReceiverSession(Channel& ch,
                                  const std::vector<std::string>& items,
                                  std::optional<std::vector<double>> payloads,
                                  MechanismParams params, Rng rng) {
  Receiver<G> receiver(items, std::move(payloads), params, std::move(rng));
  return session_detail::AbortOnError(ch, [&] {
    Message x_a = ch.Receive();
    protocol_detail::ExpectType(x_a, MessageType::kXa);
    ch.Send(receiver.Round1());
    ch.Send(receiver.Round2(x_a));
    return receiver.Finish(ch.Receive());
  });
}

}  // namespace dppsi
