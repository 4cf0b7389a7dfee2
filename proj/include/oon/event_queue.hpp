// Copyright 2026 The oon-sim Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or at
// http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>

namespace oon {

using Tick = std::uint64_t;

// Discrete-event queue with a single virtual clock. Events are totally
// ordered by (tick, insertion sequence), so identical schedules always pop
// in the same order.
template <typename Payload>
class EventQueue {
 public:
  struct Key {
    Tick tick;
    std::uint64_t seq;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  struct Event {
    Key key;
    Payload payload;
  };

  Tick now() const noexcept { return now_; }
  bool empty() const noexcept { return events_.empty(); }
  std::size_t size() const noexcept { return events_.size(); }
  std::uint64_t processed() const noexcept { return processed_; }

  Key schedule(Tick delay, Payload payload) {
    Key key{now_ + delay, next_seq_++};
    events_.emplace(key, std::move(payload));
    return key;
  }

  bool cancel(const Key& key) { return events_.erase(key) > 0; }

  std::optional<Event> pop() {
    if (events_.empty()) return std::nullopt;
    auto node = events_.extract(events_.begin());
    if (last_ && !(*last_ < node.key())) {
      throw std::logic_error("event processed out of (tick, sequence) order");
    }
    now_ = node.key().tick;
    last_ = node.key();
    ++processed_;
    return Event{node.key(), std::move(node.mapped())};
  }

 private:
  std::map<Key, Payload> events_;
  Tick now_ = 0;
  std::optional<Key> last_;
  std::uint64_t next_seq_ = 0;
  std::uint64_t processed_ = 0;
};

}  // namespace oon
