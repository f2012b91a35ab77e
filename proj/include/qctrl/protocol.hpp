// Copyright 2026 The qctrl Authors
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

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qctrl {

enum class ProtocolMode { kBinary, kContinuous };

std::string to_string(ProtocolMode mode);
ProtocolMode protocol_mode_from_string(const std::string& s);

/// Per-slice coupling amplitudes. Binary protocols hold only 0 or gamma_max;
/// continuous ones anything in [0, gamma_max].
struct Protocol {
  std::vector<double> amplitudes;
  ProtocolMode mode = ProtocolMode::kBinary;

  std::size_t size() const { return amplitudes.size(); }

  static Protocol from_actions(std::span<const int> actions, double gamma_max);
  /// Binary protocols only: amplitude != 0 maps to action 1.
  std::vector<int> actions() const;
  /// Throws DomainError if an entry violates the mode's range.
  void validate(double gamma_max) const;

  bool operator==(const Protocol&) const = default;
};

void to_json(nlohmann::json& j, const Protocol& p);
void from_json(const nlohmann::json& j, Protocol& p);

}  // namespace qctrl
