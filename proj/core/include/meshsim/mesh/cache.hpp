// Copyright 2026 The meshsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <utility>

#include "meshsim/mesh/address.hpp"

namespace meshsim::mesh {

enum class CacheResult : std::uint8_t { Fresh, Duplicate };

/// FIFO-evicting set of recently seen (src, seq) keys.
class MessageCache {
 public:
  static constexpr std::size_t kDefaultCapacity = 255;

  explicit MessageCache(std::size_t capacity = kDefaultCapacity);

  CacheResult check_insert(Address src, std::uint32_t seq);
  [[nodiscard]] bool contains(Address src, std::uint32_t seq) const;
  [[nodiscard]] std::size_t size() const { return order_.size(); }
  [[nodiscard]] std::size_t capacity() const { return capacity_; }

 private:
  using Key = std::pair<std::uint16_t, std::uint32_t>;
  std::size_t capacity_;
  std::deque<Key> order_;
  std::set<Key> members_;
};

enum class ReplayResult : std::uint8_t { Accept, Reject };

/// Highest (epoch, seq) accepted per source. Anything at or below it is a
/// replay.
class ReplayTable {
 public:
  ReplayResult check_update(Address src, std::uint8_t epoch, std::uint32_t seq);
  [[nodiscard]] bool knows(Address src) const { return highest_.contains(src.raw()); }
  [[nodiscard]] std::pair<std::uint8_t, std::uint32_t> highest(Address src) const;
  void clear() { highest_.clear(); }

 private:
  std::map<std::uint16_t, std::pair<std::uint8_t, std::uint32_t>> highest_;
};

}  // namespace meshsim::mesh
