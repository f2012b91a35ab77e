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

#include <bit>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "qctrl/dppo.hpp"
#include "qctrl/errors.hpp"

namespace qctrl::dppo {

namespace {

constexpr const char* kFormat = "qctrl-checkpoint";
constexpr int kFormatVersion = 1;

void write_doubles(std::ostream& out, const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(v[i]);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
}

Eigen::VectorXd read_doubles(std::istream& in, Eigen::Index count) {
  Eigen::VectorXd v(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8))
      throw std::runtime_error("checkpoint: truncated payload");
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    v[i] = std::bit_cast<double>(bits);
  }
  return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const ActorCriticParams& params,
                     const CheckpointInfo& info) {
  const auto na = params.actor.parameter_count();
  const auto nc = params.critic.parameter_count();
  AdamState actor_opt = params.actor_opt.first_moment.size() == na ? params.actor_opt : AdamState(na);
  AdamState critic_opt =
      params.critic_opt.first_moment.size() == nc ? params.critic_opt : AdamState(nc);

  nlohmann::json header{{"format", kFormat},
                        {"version", kFormatVersion},
                        {"seed", info.seed},
                        {"iteration", info.iteration},
                        {"actor_sizes", params.actor.sizes()},
                        {"critic_sizes", params.critic.sizes()},
                        {"actor_adam_step", actor_opt.step},
                        {"critic_adam_step", critic_opt.step},
                        {"layout", {"actor", "critic", "actor_m", "actor_v", "critic_m", "critic_v"}},
                        {"payload_doubles", 3 * (na + nc)}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out << header.dump() << '\n';
  write_doubles(out, params.actor.parameters());
  write_doubles(out, params.critic.parameters());
  write_doubles(out, actor_opt.first_moment);
  write_doubles(out, actor_opt.second_moment);
  write_doubles(out, critic_opt.first_moment);
  write_doubles(out, critic_opt.second_moment);
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

ActorCriticParams load_checkpoint(const std::string& path, CheckpointInfo* info) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("checkpoint: missing header");
  const auto header = nlohmann::json::parse(line);
  if (header.at("format") != kFormat || header.at("version") != kFormatVersion)
    throw std::runtime_error("checkpoint: unsupported format");

  auto make_net = [](const std::vector<int>& sizes) {
    if (sizes.size() < 2) throw InvalidDimension("checkpoint: bad layer sizes");
    const int depth = static_cast<int>(sizes.size()) - 2;
    return Mlp(sizes.front(), depth > 0 ? sizes[1] : 1, depth, sizes.back());
  };
  ActorCriticParams p;
  p.actor = make_net(header.at("actor_sizes").get<std::vector<int>>());
  p.critic = make_net(header.at("critic_sizes").get<std::vector<int>>());
  const auto na = p.actor.parameter_count();
  const auto nc = p.critic.parameter_count();
  if (header.at("payload_doubles").get<Eigen::Index>() != 3 * (na + nc))
    throw std::runtime_error("checkpoint: payload size does not match layer shapes");
  p.actor.parameters() = read_doubles(in, na);
  p.critic.parameters() = read_doubles(in, nc);
  p.actor_opt = AdamState(na);
  p.critic_opt = AdamState(nc);
  p.actor_opt.first_moment = read_doubles(in, na);
  p.actor_opt.second_moment = read_doubles(in, na);
  p.critic_opt.first_moment = read_doubles(in, nc);
  p.critic_opt.second_moment = read_doubles(in, nc);
  p.actor_opt.step = header.at("actor_adam_step").get<std::int64_t>();
  p.critic_opt.step = header.at("critic_adam_step").get<std::int64_t>();
  if (info) {
    info->seed = header.at("seed").get<std::uint64_t>();
    info->iteration = header.at("iteration").get<int>();
  }
  return p;
}

}  // namespace qctrl::dppo
