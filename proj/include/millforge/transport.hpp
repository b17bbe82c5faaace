// Copyright 2026 The Millforge Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// In-process duplex channel between the two parties with exact round and
// byte accounting.
//
// Rounds follow message dependencies: every frame carries the sender's
// current depth, and receiving a frame raises the receiver's depth to
// stamp + 1. The channel's round count is the largest depth reached, i.e. the
// longest chain of messages where each one was sent after the previous one
// arrived. Frames sent concurrently in both directions share one round, and
// the count does not depend on thread scheduling.

#include <algorithm>
#include <array>
#include <chrono>
#include <condition_variable>
#include <coroutine>
#include <cstdint>
#include <ctime>
#include <deque>
#include <exception>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "millforge/bits.hpp"
#include "millforge/errors.hpp"
#include "millforge/task.hpp"

namespace millforge {

enum class FrameTag : std::uint8_t {
  Data = 0x00,
  LeafTmp = 0x01,
  LeafMsgs = 0x02,
  MergeOpenBase = 0x03,
  MergeOpenTami = 0x04,
  PolyOpen = 0x05,
  MuxOpen = 0x06,
};

inline constexpr std::uint8_t kMaxFrameTag = 0x06;

inline bool is_known_tag(std::uint8_t t) noexcept { return t <= kMaxFrameTag; }

inline const char* to_string(FrameTag t) noexcept {
  switch (t) {
    case FrameTag::Data: return "DATA";
    case FrameTag::LeafTmp: return "LEAF_TMP";
    case FrameTag::LeafMsgs: return "LEAF_MSGS";
    case FrameTag::MergeOpenBase: return "MERGE_OPEN_BASE";
    case FrameTag::MergeOpenTami: return "MERGE_OPEN_TAMI";
    case FrameTag::PolyOpen: return "POLY_OPEN";
    case FrameTag::MuxOpen: return "MUX_OPEN";
  }
  return "UNKNOWN";
}

// Wire frame: tag (1 byte) | payload length (4 bytes LE) | payload.
struct Frame {
  FrameTag tag = FrameTag::Data;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 5;

inline std::vector<std::uint8_t> encode_frame(const Frame& f) {
  if (f.payload.size() > 0xFFFFFFFFu) throw ProtocolError("frame payload too large");
  std::vector<std::uint8_t> out;
  out.reserve(kFrameHeaderBytes + f.payload.size());
  out.push_back(static_cast<std::uint8_t>(f.tag));
  const auto len = static_cast<std::uint32_t>(f.payload.size());
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(len >> (8 * i)));
  out.insert(out.end(), f.payload.begin(), f.payload.end());
  return out;
}

inline Frame decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kFrameHeaderBytes) throw ProtocolError("frame shorter than its header");
  if (!is_known_tag(bytes[0])) {
    throw ProtocolError("unknown frame tag 0x" + std::to_string(bytes[0]));
  }
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len |= static_cast<std::uint32_t>(bytes[1 + i]) << (8 * i);
  if (bytes.size() - kFrameHeaderBytes != len) {
    throw ProtocolError("frame length field " + std::to_string(len) + " does not match payload of " +
                        std::to_string(bytes.size() - kFrameHeaderBytes) + " bytes");
  }
  return Frame{static_cast<FrameTag>(bytes[0]),
               std::vector<std::uint8_t>(bytes.begin() + kFrameHeaderBytes, bytes.end())};
}

enum class Direction : std::uint8_t { SenderToReceiver = 0, ReceiverToSender = 1 };

constexpr Direction direction_from(Role sender_of_frame) noexcept {
  return sender_of_frame == Role::Sender ? Direction::SenderToReceiver
                                         : Direction::ReceiverToSender;
}

struct TagStats {
  std::uint64_t messages = 0;
  std::uint64_t bytes = 0;
  std::uint64_t bits_s2r = 0;
  std::uint64_t bits_r2s = 0;
  std::uint32_t max_depth = 0;  // largest stamp + 1 among frames with this tag

  std::uint64_t bits() const noexcept { return bits_s2r + bits_r2s; }
  friend bool operator==(const TagStats&, const TagStats&) = default;
};

struct ChannelStats {
  std::uint64_t rounds = 0;
  std::uint64_t bytes_s2r = 0;
  std::uint64_t bytes_r2s = 0;
  std::uint64_t bits_s2r = 0;
  std::uint64_t bits_r2s = 0;
  std::uint64_t messages = 0;
  std::map<FrameTag, TagStats> by_tag;

  std::uint64_t total_bytes() const noexcept { return bytes_s2r + bytes_r2s; }
  std::uint64_t total_bits() const noexcept { return bits_s2r + bits_r2s; }
  std::uint64_t header_bytes() const noexcept { return messages * kFrameHeaderBytes; }

  std::uint64_t bits_for(std::initializer_list<FrameTag> tags) const {
    std::uint64_t b = 0;
    for (auto t : tags) {
      if (auto it = by_tag.find(t); it != by_tag.end()) b += it->second.bits();
    }
    return b;
  }

  std::uint32_t depth_for(std::initializer_list<FrameTag> tags) const {
    std::uint32_t d = 0;
    for (auto t : tags) {
      if (auto it = by_tag.find(t); it != by_tag.end()) d = std::max(d, it->second.max_depth);
    }
    return d;
  }

  friend bool operator==(const ChannelStats&, const ChannelStats&) = default;
};

struct NetworkPreset {
  std::string_view name;
  double bandwidth_bps = 0;
  double one_way_latency_s = 0;

  static constexpr NetworkPreset lan() { return {"LAN", 3e9, 0.3e-3}; }
  static constexpr NetworkPreset wan() { return {"WAN", 200e6, 50e-3}; }
  static constexpr NetworkPreset mobile() { return {"Mobile", 100e6, 80e-3}; }
  static constexpr std::array<NetworkPreset, 3> all() { return {lan(), wan(), mobile()}; }
};

// rounds x round trip + wire bits / bandwidth.
inline double simulated_time(std::uint64_t rounds, std::uint64_t bytes, const NetworkPreset& p) {
  return static_cast<double>(rounds) * 2.0 * p.one_way_latency_s +
         static_cast<double>(bytes) * 8.0 / p.bandwidth_bps;
}

inline double simulated_time(const ChannelStats& s, const NetworkPreset& p) {
  return simulated_time(s.rounds, s.total_bytes(), p);
}

struct TranscriptEntry {
  Direction direction = Direction::SenderToReceiver;
  std::uint32_t stamp = 0;
  std::uint64_t seq = 0;  // per-direction sequence number
  std::uint64_t bits = 0;
  std::vector<std::uint8_t> frame;  // encoded

  Frame decoded() const { return decode_frame(frame); }
  friend bool operator==(const TranscriptEntry&, const TranscriptEntry&) = default;
};

// Frames in canonical order: by dependency stamp, then direction, then
// per-direction sequence. Independent of how the two parties interleaved.
struct Transcript {
  std::vector<TranscriptEntry> entries;

  // Dump format: per entry u8 direction | u32 stamp LE | encoded frame.
  std::vector<std::uint8_t> serialize() const {
    std::vector<std::uint8_t> out;
    for (const auto& e : entries) {
      out.push_back(static_cast<std::uint8_t>(e.direction));
      for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(e.stamp >> (8 * i)));
      out.insert(out.end(), e.frame.begin(), e.frame.end());
    }
    return out;
  }

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

enum class Schedule { Threaded, Lockstep };

class Channel;

class Endpoint {
 public:
  Role role() const noexcept { return role_; }
  std::uint32_t depth() const noexcept { return depth_; }

  void send(FrameTag tag, const BitVector& payload);

  class RecvAwaiter {
   public:
    RecvAwaiter(Endpoint& ep, FrameTag tag, std::size_t nbits) : ep_(ep), tag_(tag), nbits_(nbits) {}
    bool await_ready();
    void await_suspend(std::coroutine_handle<> h) noexcept { ep_.waiting_ = h; }
    BitVector await_resume();

   private:
    Endpoint& ep_;
    FrameTag tag_;
    std::size_t nbits_;
  };

  // co_await ep.recv(tag, nbits): next frame from the peer, which must carry
  // `tag` and exactly ceil(nbits / 8) payload bytes.
  RecvAwaiter recv(FrameTag tag, std::size_t nbits) { return RecvAwaiter(*this, tag, nbits); }

 private:
  friend class Channel;
  template <typename S, typename R>
  friend struct PartyRunner;
  Endpoint(Channel& ch, Role role) : channel_(ch), role_(role) {}

  Channel& channel_;
  Role role_;
  std::uint32_t depth_ = 0;
  std::coroutine_handle<> waiting_;
};

class Channel {
 public:
  explicit Channel(Schedule schedule = Schedule::Threaded)
      : schedule_(schedule), sender_(*this, Role::Sender), receiver_(*this, Role::Receiver) {}
  Channel(const Channel&) = delete;
  Channel& operator=(const Channel&) = delete;

  Endpoint& sender() noexcept { return sender_; }
  Endpoint& receiver() noexcept { return receiver_; }
  Endpoint& endpoint(Role r) noexcept { return r == Role::Sender ? sender_ : receiver_; }
  Schedule schedule() const noexcept { return schedule_; }
  void set_schedule(Schedule s) noexcept { schedule_ = s; }

  void set_recording(bool on) {
    std::lock_guard lk(mu_);
    record_ = on;
  }

  ChannelStats stats() const {
    std::lock_guard lk(mu_);
    return stats_;
  }

  Transcript transcript() const {
    std::lock_guard lk(mu_);
    Transcript t{log_};
    std::sort(t.entries.begin(), t.entries.end(), [](const auto& a, const auto& b) {
      return std::tie(a.stamp, a.direction, a.seq) < std::tie(b.stamp, b.direction, b.seq);
    });
    return t;
  }

  // Wakes blocked receivers with PeerAborted.
  void abort() {
    {
      std::lock_guard lk(mu_);
      aborted_ = true;
    }
    cv_.notify_all();
  }

  bool has_pending(Role to) const {
    std::lock_guard lk(mu_);
    return !inbox(to).empty();
  }

  bool idle() const {
    std::lock_guard lk(mu_);
    return inboxes_[0].empty() && inboxes_[1].empty();
  }

 private:
  friend class Endpoint;
  friend class Endpoint::RecvAwaiter;
  template <typename S, typename R>
  friend struct PartyRunner;

  struct Message {
    std::uint32_t stamp = 0;
    std::vector<std::uint8_t> frame;
  };

  std::deque<Message>& inbox(Role to) { return inboxes_[static_cast<int>(to)]; }
  const std::deque<Message>& inbox(Role to) const { return inboxes_[static_cast<int>(to)]; }

  void push(Role from, FrameTag tag, std::uint32_t stamp, std::vector<std::uint8_t> frame,
            std::uint64_t bits) {
    {
      std::lock_guard lk(mu_);
      const std::uint64_t payload = frame.size() - kFrameHeaderBytes;
      if (from == Role::Sender) {
        stats_.bytes_s2r += payload;
        stats_.bits_s2r += bits;
      } else {
        stats_.bytes_r2s += payload;
        stats_.bits_r2s += bits;
      }
      ++stats_.messages;
      auto& ts = stats_.by_tag[tag];
      ++ts.messages;
      ts.bytes += payload;
      (from == Role::Sender ? ts.bits_s2r : ts.bits_r2s) += bits;
      ts.max_depth = std::max(ts.max_depth, stamp + 1);
      const auto dir = direction_from(from);
      if (record_) {
        log_.push_back(TranscriptEntry{dir, stamp, seq_[static_cast<int>(dir)], bits, frame});
      }
      ++seq_[static_cast<int>(dir)];
      inbox(peer_of(from)).push_back(Message{stamp, std::move(frame)});
    }
    cv_.notify_all();
  }

  // Threaded mode: blocks until a frame for `to` is queued.
  void wait_for(Role to) {
    std::unique_lock lk(mu_);
    const bool ok = cv_.wait_for(lk, std::chrono::seconds(120),
                                 [&] { return aborted_ || !inbox(to).empty(); });
    if (!inbox(to).empty()) return;
    if (aborted_) throw PeerAborted();
    if (!ok) throw ProtocolError("timed out waiting for peer frame");
  }

  Message pop(Role to) {
    std::lock_guard lk(mu_);
    if (inbox(to).empty()) throw ProtocolError("receive with no pending frame");
    Message m = std::move(inbox(to).front());
    inbox(to).pop_front();
    return m;
  }

  void note_depth(std::uint32_t d) {
    std::lock_guard lk(mu_);
    stats_.rounds = std::max<std::uint64_t>(stats_.rounds, d);
  }

  Schedule schedule_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::array<std::deque<Message>, 2> inboxes_;
  std::array<std::uint64_t, 2> seq_{};
  ChannelStats stats_;
  std::vector<TranscriptEntry> log_;
  bool record_ = true;
  bool aborted_ = false;
  Endpoint sender_;
  Endpoint receiver_;
};

inline void Endpoint::send(FrameTag tag, const BitVector& payload) {
  const auto bytes = payload.bytes();
  Frame f{tag, std::vector<std::uint8_t>(bytes.begin(), bytes.end())};
  channel_.push(role_, tag, depth_, encode_frame(f), payload.size());
}

inline bool Endpoint::RecvAwaiter::await_ready() {
  if (ep_.channel_.schedule() == Schedule::Threaded) {
    ep_.channel_.wait_for(ep_.role_);
    return true;
  }
  return ep_.channel_.has_pending(ep_.role_);
}

inline BitVector Endpoint::RecvAwaiter::await_resume() {
  auto msg = ep_.channel_.pop(ep_.role_);
  Frame f = decode_frame(msg.frame);
  if (f.tag != tag_) {
    throw ProtocolError(std::string("expected ") + to_string(tag_) + " frame, got " +
                        to_string(f.tag));
  }
  auto bits = BitVector::from_bytes(f.payload, nbits_);
  ep_.depth_ = std::max(ep_.depth_, msg.stamp + 1);
  ep_.channel_.note_depth(ep_.depth_);
  return bits;
}

inline std::unique_ptr<Channel> open_session(Schedule schedule = Schedule::Threaded) {
  return std::make_unique<Channel>(schedule);
}

// CPU seconds consumed by the calling thread.
inline double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + static_cast<double>(ts.tv_nsec) * 1e-9;
}

template <typename S, typename R>
struct PartyResult {
  S sender;
  R receiver;
  double sender_cpu_s = 0;
  double receiver_cpu_s = 0;
};

template <typename S, typename R>
struct PartyRunner {
  static PartyResult<S, R> run(Channel& ch, Task<S> s, Task<R> r) {
    return ch.schedule() == Schedule::Threaded ? threaded(ch, std::move(s), std::move(r))
                                               : lockstep(ch, std::move(s), std::move(r));
  }

  static PartyResult<S, R> threaded(Channel& ch, Task<S> s, Task<R> r) {
    double cpu_s = 0, cpu_r = 0;
    auto drive = [&ch](auto& task, double& cpu) {
      const double t0 = thread_cpu_seconds();
      task.handle().resume();
      cpu = thread_cpu_seconds() - t0;
      if (task.failed()) ch.abort();
    };
    std::thread ts([&] { drive(s, cpu_s); });
    drive(r, cpu_r);
    ts.join();
    rethrow_first(s, r);
    return PartyResult<S, R>{s.take(), r.take(), cpu_s, cpu_r};
  }

  // Single thread: resume whichever party can make progress, sender first.
  static PartyResult<S, R> lockstep(Channel& ch, Task<S> s, Task<R> r) {
    double cpu_s = 0, cpu_r = 0;
    bool started_s = false, started_r = false;
    auto step = [&ch](auto& task, Endpoint& ep, bool& started, double& cpu) -> bool {
      if (task.done()) return false;
      std::coroutine_handle<> h;
      if (!started) {
        started = true;
        h = task.handle();
      } else if (ep.waiting_ && ch.has_pending(ep.role())) {
        h = std::exchange(ep.waiting_, {});
      } else {
        return false;
      }
      const double t0 = thread_cpu_seconds();
      h.resume();
      cpu += thread_cpu_seconds() - t0;
      return true;
    };
    while (!s.done() || !r.done()) {
      const bool ps = step(s, ch.sender(), started_s, cpu_s);
      if (s.failed()) break;
      const bool pr = step(r, ch.receiver(), started_r, cpu_r);
      if (r.failed()) break;
      if (!ps && !pr) throw ProtocolError("lockstep deadlock: both parties wait for a frame");
    }
    rethrow_first(s, r);
    return PartyResult<S, R>{s.take(), r.take(), cpu_s, cpu_r};
  }

  static void rethrow_first(Task<S>& s, Task<R>& r) {
    auto is_abort = [](std::exception_ptr e) {
      try {
        std::rethrow_exception(e);
      } catch (const PeerAborted&) {
        return true;
      } catch (...) {
        return false;
      }
    };
    auto es = s.error(), er = r.error();
    if (es && !is_abort(es)) std::rethrow_exception(es);
    if (er && !is_abort(er)) std::rethrow_exception(er);
    if (es) std::rethrow_exception(es);
    if (er) std::rethrow_exception(er);
  }
};

// Runs the sender and receiver routines over `ch` under its schedule.
template <typename S, typename R>
PartyResult<S, R> run_parties(Channel& ch, Task<S> sender, Task<R> receiver) {
  return PartyRunner<S, R>::run(ch, std::move(sender), std::move(receiver));
}

}  // namespace millforge
