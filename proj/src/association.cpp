// Copyright 2026 The urllc_lab Authors
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

#include "urllc/association.hpp"

#include <cmath>

#include "urllc/errors.hpp"
#include "urllc/rng.hpp"

namespace urllc {

std::uint64_t LoadMap::total() const {
  std::uint64_t n = 0;
  for (const auto& tier : load) {
    for (auto v : tier) n += v;
  }
  return n;
}

namespace {

VirtualCell to_cell(const Realization& realization, const WeightedDistanceList& list, Point user,
                    std::size_t owner, std::size_t K) {
  VirtualCell cell;
  cell.owner = owner;
  cell.members.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    const auto& e = list[k];
    const Point p = realization.aps[e.ap.tier][e.ap.index];
    cell.members.push_back({e.ap, std::sqrt(squared_distance(p, user)), e.key});
  }
  return cell;
}

}  // namespace

VirtualCell build_virtual_cell(const Realization& realization, Point user,
                               const NetworkConfig& config, std::size_t owner) {
  const auto w = config.biases();
  const auto list = weighted_distance_transform(realization, w, config.alpha, user);
  const auto K = static_cast<std::size_t>(config.K);
  if (list.size() < K) {
    throw InsufficientPoints("virtual cell needs " + std::to_string(K) + " APs, window holds " +
                             std::to_string(list.size()));
  }
  return to_cell(realization, list, user, owner, K);
}

std::vector<VirtualCell> build_virtual_cells(const ApIndex& index, std::span<const Point> users,
                                             int K) {
  std::vector<VirtualCell> cells;
  cells.reserve(users.size());
  const auto k = static_cast<std::size_t>(K);
  for (std::size_t u = 0; u < users.size(); ++u) {
    cells.push_back(to_cell(index.realization(), index.nearest(users[u], k), users[u], u, k));
  }
  return cells;
}

LoadMap tally_loads(const Realization& realization, std::span<const VirtualCell> cells) {
  LoadMap map;
  for (const auto& tier : realization.aps) map.load.emplace_back(tier.size(), 0u);
  for (const auto& cell : cells) {
    for (const auto& m : cell.members) ++map.load[m.ap.tier][m.ap.index];
  }
  return map;
}

LoadMap associate_all_users(const Realization& realization, const NetworkConfig& config) {
  const auto w = config.biases();
  const ApIndex index(realization, w, config.alpha);
  const auto cells = build_virtual_cells(index, realization.users, config.K);
  return tally_loads(realization, cells);
}

RruAssignment select_rrus(const Realization& realization, std::span<const VirtualCell> cells,
                          const NetworkConfig& config, RngStream& rng) {
  RruAssignment a;
  a.rru_count = config.rru_count();
  for (const auto& tier : realization.aps) a.occupancy.emplace_back(tier.size());
  a.picks.resize(cells.size());
  for (std::size_t u = 0; u < cells.size(); ++u) {
    for (const auto& m : cells[u].members) {
      const std::uint32_t r = rng.uniform_index(a.rru_count);
      a.picks[u].push_back(r);
      a.occupancy[m.ap.tier][m.ap.index].push_back({static_cast<std::uint32_t>(u), r});
    }
  }
  return a;
}

std::vector<bool> detect_collisions(const RruAssignment& assignment, const VirtualCell& cell) {
  std::vector<bool> clear(cell.members.size(), true);
  const auto& picks = assignment.picks.at(cell.owner);
  for (std::size_t k = 0; k < cell.members.size(); ++k) {
    const auto& m = cell.members[k];
    for (const auto& occ : assignment.occupancy[m.ap.tier][m.ap.index]) {
      if (occ.user != cell.owner && occ.rru == picks[k]) {
        clear[k] = false;
        break;
      }
    }
  }
  return clear;
}

}  // namespace urllc
