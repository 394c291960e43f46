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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "urllc/config.hpp"
#include "urllc/geometry.hpp"

namespace urllc {

class RngStream;

struct Member {
  ApRef ap;
  double distance_km = 0.0;
  double key = 0.0;
};

struct VirtualCell {
  std::size_t owner = 0;
  std::vector<Member> members;  // ordered by decreasing w_m |A|^-alpha
};

struct LoadMap {
  std::vector<std::vector<std::uint32_t>> load;  // per tier, per AP

  bool is_void(ApRef ap) const { return load[ap.tier][ap.index] == 0; }
  std::uint64_t total() const;
};

// Virtual cell of a user by full sort of the weighted-distance transform.
VirtualCell build_virtual_cell(const Realization& realization, Point user,
                               const NetworkConfig& config, std::size_t owner = 0);

// Virtual cells of the given users via the grid index.
std::vector<VirtualCell> build_virtual_cells(const ApIndex& index, std::span<const Point> users,
                                             int K);

LoadMap tally_loads(const Realization& realization, std::span<const VirtualCell> cells);

// Loads from every sampled user of the realization (the typical user is not added).
LoadMap associate_all_users(const Realization& realization, const NetworkConfig& config);

struct Occupant {
  std::uint32_t user = 0;
  std::uint32_t rru = 0;
};

struct RruAssignment {
  std::uint32_t rru_count = 1;
  std::vector<std::vector<std::uint32_t>> picks;          // per user, per member; 0-based
  std::vector<std::vector<std::vector<Occupant>>> occupancy;  // per tier, per AP
};

RruAssignment select_rrus(const Realization& realization, std::span<const VirtualCell> cells,
                          const NetworkConfig& config, RngStream& rng);

// Per-member flag: true when no other user at that AP picked the owner's RRU.
std::vector<bool> detect_collisions(const RruAssignment& assignment, const VirtualCell& cell);

}  // namespace urllc
