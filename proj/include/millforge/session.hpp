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

// A two-party session: the channel plus each party's tape, derived from one
// synchronized seed. Drivers in the protocol headers take a Session and run
// both party routines over it.

#include <cstdint>

#include "millforge/tape.hpp"
#include "millforge/transport.hpp"

namespace millforge {

class Session {
 public:
  explicit Session(const TapeSeed& seed, Schedule schedule = Schedule::Threaded)
      : channel_(schedule),
        sender_tape_(derive_tape(seed, Role::Sender)),
        receiver_tape_(derive_tape(seed, Role::Receiver)) {}

  Session(std::uint64_t seed, std::uint64_t session_id = 0, Schedule schedule = Schedule::Threaded)
      : Session(TapeSeed::from_u64(seed, session_id), schedule) {}

  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  Channel& channel() noexcept { return channel_; }
  const Channel& channel() const noexcept { return channel_; }
  TeeTape& tape(Role r) noexcept { return r == Role::Sender ? sender_tape_ : receiver_tape_; }
  TeeTape& sender_tape() noexcept { return sender_tape_; }
  TeeTape& receiver_tape() noexcept { return receiver_tape_; }
  ChannelStats stats() const { return channel_.stats(); }

  // Reserves the same instance range on both tapes.
  InstanceId allocate(std::size_t count) {
    const InstanceId s = sender_tape_.allocate(count);
    const InstanceId r = receiver_tape_.allocate(count);
    if (s != r) throw MisuseError("session tapes are out of step");
    return s;
  }

  void set_tape_recording(bool on) {
    sender_tape_.set_recording(on);
    receiver_tape_.set_recording(on);
  }

  template <typename S, typename R>
  PartyResult<S, R> run(Task<S> sender, Task<R> receiver) {
    auto out = run_parties(channel_, std::move(sender), std::move(receiver));
    sender_cpu_s_ += out.sender_cpu_s;
    receiver_cpu_s_ += out.receiver_cpu_s;
    return out;
  }

  double sender_cpu_seconds() const noexcept { return sender_cpu_s_; }
  double receiver_cpu_seconds() const noexcept { return receiver_cpu_s_; }

 private:
  Channel channel_;
  TeeTape sender_tape_;
  TeeTape receiver_tape_;
  double sender_cpu_s_ = 0;
  double receiver_cpu_s_ = 0;
};

}  // namespace millforge
