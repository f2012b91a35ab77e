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

#include "qctrl/protocol.hpp"

#include <cmath>

#include "qctrl/errors.hpp"

namespace qctrl {

std::string to_string(ProtocolMode mode) {
  return mode == ProtocolMode::kBinary ? "binary" : "continuous";
}

ProtocolMode protocol_mode_from_string(const std::string& s) {
  if (s == "binary") return ProtocolMode::kBinary;
  if (s == "continuous") return ProtocolMode::kContinuous;
  throw DomainError("unknown protocol mode: " + s);
}

Protocol Protocol::from_actions(std::span<const int> actions, double gamma_max) {
  Protocol p;
  p.mode = ProtocolMode::kBinary;
  p.amplitudes.reserve(actions.size());
  for (int a : actions) {
    if (a != 0 && a != 1) throw DomainError("bang-bang action must be 0 or 1");
    p.amplitudes.push_back(a ? gamma_max : 0.0);
  }
  return p;
}

std::vector<int> Protocol::actions() const {
  if (mode != ProtocolMode::kBinary) throw DomainError("actions() needs a binary protocol");
  std::vector<int> out;
  out.reserve(amplitudes.size());
  for (double a : amplitudes) out.push_back(a != 0.0 ? 1 : 0);
  return out;
}

void Protocol::validate(double gamma_max) const {
  for (double a : amplitudes) {
    if (!std::isfinite(a)) throw DomainError("protocol amplitude is not finite");
    if (mode == ProtocolMode::kBinary) {
      if (a != 0.0 && a != gamma_max) throw DomainError("binary protocol entry not in {0, gamma_max}");
    } else if (a < 0.0 || a > gamma_max) {
      throw DomainError("continuous protocol entry outside [0, gamma_max]");
    }
  }
}

void to_json(nlohmann::json& j, const Protocol& p) {
  j = nlohmann::json{{"mode", to_string(p.mode)}, {"amplitudes", p.amplitudes}};
}

void from_json(const nlohmann::json& j, Protocol& p) {
  p.mode = protocol_mode_from_string(j.at("mode").get<std::string>());
  p.amplitudes = j.at("amplitudes").get<std::vector<double>>();
}

}  // namespace qctrl
