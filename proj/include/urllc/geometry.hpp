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
#include <iosfwd>
#include <span>
#include <vector>

#include "urllc/config.hpp"

namespace urllc {

class RngStream;

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double squared_norm(Point p) { return p.x * p.x + p.y * p.y; }
inline double squared_distance(Point a, Point b) {
  return squared_norm({a.x - b.x, a.y - b.y});
}

// Observation disc centred at the origin.
struct Window {
  double radius_km = 1.0;
  void validate() const;
};

struct Realization {
  Window window;
  std::vector<std::vector<Point>> aps;  // per tier
  std::vector<Point> users;             // the typical user at the origin is implicit
  std::size_t ap_count() const;
};

struct ApRef {
  std::uint32_t tier = 0;
  std::uint32_t index = 0;
  friend bool operator==(ApRef, ApRef) = default;
};

struct WeightedEntry {
  ApRef ap;
  double key = 0.0;  // w_m^(-2/alpha) * squared distance, km^2
};

using WeightedDistanceList = std::vector<WeightedEntry>;

std::vector<Point> sample_ppp(double density, Window window, RngStream& rng);
Realization realize_network(const NetworkConfig& config, Window window, RngStream& rng);

// All APs ordered by weighted distance from `center`; ties by tier then index.
WeightedDistanceList weighted_distance_transform(const Realization& realization,
                                                 std::span<const double> weights, double alpha,
                                                 Point center = {});

// Grid index answering k-nearest weighted queries without a full sort.
class ApIndex {
 public:
  ApIndex(const Realization& realization, std::span<const double> weights, double alpha);

  // First `count` entries of the transform centred at `center`.
  // Throws InsufficientPoints if the realization holds fewer APs.
  WeightedDistanceList nearest(Point center, std::size_t count) const;
  Point position(ApRef ap) const { return realization_->aps[ap.tier][ap.index]; }
  const Realization& realization() const { return *realization_; }

 private:
  struct TierGrid {
    double cell = 1.0;
    int side = 1;
    double factor = 1.0;
    std::vector<std::uint32_t> start;  // CSR offsets, side*side+1
    std::vector<std::uint32_t> items;
  };
  void nearest_in_tier(std::size_t tier, Point center, std::size_t count,
                       std::vector<std::pair<double, std::uint32_t>>& heap) const;

  const Realization* realization_;
  std::vector<TierGrid> grids_;
};

struct RadialPoint {
  ApRef ap;           // index is the rank among all generated points
  double key = 0.0;   // squared weighted distance
  Point position;
};

// The `count` nearest points of the weighted superposition around the origin,
// generated directly from exponential gaps with rate pi * lambda_tilde.
std::vector<RadialPoint> sample_nearest_weighted(const TierGeometry& geometry, std::size_t count,
                                                 RngStream& rng);

// Radius whose disc holds max(5000, 50K) APs on average.
Window default_window(const NetworkConfig& config);

// Guard radius beyond which a user's K-th neighbour is essentially never found.
double association_guard_km(const NetworkConfig& config);

void write_realization_csv(std::ostream& out, const Realization& realization);

}  // namespace urllc
