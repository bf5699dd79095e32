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

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace meshsim::mesh {

/// Mesh address classes. The ranges partition the 16-bit space:
///   0x0000          unassigned
///   0x0001..0x7FFF  unicast
///   0x8000..0xBFFF  virtual
///   0xC000..0xFFFF  group
enum class AddressClass : std::uint8_t { Unassigned, Unicast, Virtual, Group };

constexpr AddressClass classify_address(std::uint16_t raw) {
  if (raw == 0x0000) return AddressClass::Unassigned;
  if (raw <= 0x7FFF) return AddressClass::Unicast;
  if (raw <= 0xBFFF) return AddressClass::Virtual;
  return AddressClass::Group;
}

std::string_view to_string(AddressClass cls);

class Address {
 public:
  constexpr Address() = default;
  constexpr explicit Address(std::uint16_t raw) : raw_(raw) {}

  [[nodiscard]] constexpr std::uint16_t raw() const { return raw_; }
  [[nodiscard]] constexpr AddressClass cls() const { return classify_address(raw_); }
  [[nodiscard]] constexpr bool is_unassigned() const { return cls() == AddressClass::Unassigned; }
  [[nodiscard]] constexpr bool is_unicast() const { return cls() == AddressClass::Unicast; }
  [[nodiscard]] constexpr bool is_group() const { return cls() == AddressClass::Group; }
  [[nodiscard]] constexpr bool is_virtual() const { return cls() == AddressClass::Virtual; }
  /// Group or virtual: anything a node can subscribe to.
  [[nodiscard]] constexpr bool is_subscribable() const { return is_group() || is_virtual(); }

  constexpr auto operator<=>(const Address&) const = default;

  /// "0x00AB" form used in CSV output.
  [[nodiscard]] std::string str() const;
  static Address parse(std::string_view text);

 private:
  std::uint16_t raw_ = 0;
};

inline constexpr Address kUnassigned{0x0000};
inline constexpr Address kAllNodes{0xFFFF};

/// Unicast address for the i-th provisioned node (element addresses start at 1).
constexpr Address unicast_for_index(std::uint32_t index) {
  return Address(static_cast<std::uint16_t>(index + 1));
}

}  // namespace meshsim::mesh
