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

#include "urllc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <queue>

#include "urllc/errors.hpp"
#include "urllc/rng.hpp"

namespace urllc {

namespace {

bool entry_less(const WeightedEntry& a, const WeightedEntry& b) {
  if (a.key != b.key) return a.key < b.key;
  if (a.ap.tier != b.ap.tier) return a.ap.tier < b.ap.tier;
  return a.ap.index < b.ap.index;
}

std::vector<double> distance_factors(std::span<const double> weights, double alpha) {
  if (!(alpha > 2.0)) throw DomainError("alpha must exceed 2");
  std::vector<double> f;
  f.reserve(weights.size());
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("weights must be positive");
    f.push_back(std::pow(w, -2.0 / alpha));
  }
  return f;
}

}  // namespace

void Window::validate() const {
  if (!(radius_km > 0.0) || !std::isfinite(radius_km)) {
    throw ConfigError("window radius must be positive");
  }
}

std::size_t Realization::ap_count() const {
  std::size_t n = 0;
  for (const auto& tier : aps) n += tier.size();
  return n;
}

std::vector<Point> sample_ppp(double density, Window window, RngStream& rng) {
  window.validate();
  if (!(density >= 0.0)) throw DomainError("density must be >= 0");
  const double r = window.radius_km;
  const std::uint64_t n = rng.poisson(density * std::numbers::pi * r * r);
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double rho = r * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    pts.push_back({rho * std::cos(phi), rho * std::sin(phi)});
  }
  return pts;
}

Realization realize_network(const NetworkConfig& config, Window window, RngStream& rng) {
  Realization out;
  out.window = window;
  for (const auto& t : config.tiers) out.aps.push_back(sample_ppp(t.density, window, rng));
  out.users = sample_ppp(config.user_density, window, rng);
  return out;
}

WeightedDistanceList weighted_distance_transform(const Realization& realization,
                                                 std::span<const double> weights, double alpha,
                                                 Point center) {
  if (weights.size() != realization.aps.size()) throw DomainError("one weight per tier required");
  const auto f = distance_factors(weights, alpha);
  WeightedDistanceList list;
  list.reserve(realization.ap_count());
  for (std::uint32_t m = 0; m < realization.aps.size(); ++m) {
    const auto& tier = realization.aps[m];
    for (std::uint32_t i = 0; i < tier.size(); ++i) {
      list.push_back({{m, i}, f[m] * squared_distance(tier[i], center)});
    }
  }
  std::sort(list.begin(), list.end(), entry_less);
  return list;
}

ApIndex::ApIndex(const Realization& realization, std::span<const double> weights, double alpha)
    : realization_(&realization) {
  if (weights.size() != realization.aps.size()) throw DomainError("one weight per tier required");
  const auto f = distance_factors(weights, alpha);
  const double r = realization.window.radius_km;
  for (std::size_t m = 0; m < realization.aps.size(); ++m) {
    const auto& pts = realization.aps[m];
    TierGrid g;
    g.factor = f[m];
    g.side = std::clamp(
        static_cast<int>(std::ceil(std::sqrt(2.0 * static_cast<double>(pts.size()) / std::numbers::pi))),
        1, 2048);
    g.cell = 2.0 * r / g.side;
    const auto cells = static_cast<std::size_t>(g.side) * g.side;
    std::vector<std::uint32_t> cell_of(pts.size());
    g.start.assign(cells + 1, 0);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const int cx = std::clamp(static_cast<int>((pts[i].x + r) / g.cell), 0, g.side - 1);
      const int cy = std::clamp(static_cast<int>((pts[i].y + r) / g.cell), 0, g.side - 1);
      cell_of[i] = static_cast<std::uint32_t>(cy * g.side + cx);
      ++g.start[cell_of[i] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) g.start[c + 1] += g.start[c];
    g.items.resize(pts.size());
    std::vector<std::uint32_t> fill(g.start.begin(), g.start.end() - 1);
    for (std::uint32_t i = 0; i < pts.size(); ++i) g.items[fill[cell_of[i]]++] = i;
    grids_.push_back(std::move(g));
  }
}

void ApIndex::nearest_in_tier(std::size_t tier, Point c, std::size_t count,
                              std::vector<std::pair<double, std::uint32_t>>& heap) const {
  const auto& g = grids_[tier];
  const auto& pts = realization_->aps[tier];
  heap.clear();
  if (pts.empty() || count == 0) return;
  const double r = realization_->window.radius_km;
  const int cx = std::clamp(static_cast<int>(std::floor((c.x + r) / g.cell)), 0, g.side - 1);
  const int cy = std::clamp(static_cast<int>(std::floor((c.y + r) / g.cell)), 0, g.side - 1);

  auto visit = [&](int ix, int iy) {
    const auto cell = static_cast<std::size_t>(iy) * g.side + ix;
    for (auto k = g.start[cell]; k < g.start[cell + 1]; ++k) {
      const std::uint32_t i = g.items[k];
      const double d = squared_distance(pts[i], c);
      if (heap.size() < count) {
        heap.emplace_back(d, i);
        std::push_heap(heap.begin(), heap.end());
      } else if (std::make_pair(d, i) < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = {d, i};
        std::push_heap(heap.begin(), heap.end());
      }
    }
  };

  for (int ring = 0;; ++ring) {
    const int x0 = cx - ring, x1 = cx + ring, y0 = cy - ring, y1 = cy + ring;
    if (x0 < 0 && y0 < 0 && x1 >= g.side && y1 >= g.side) break;
    for (int ix = std::max(x0, 0); ix <= std::min(x1, g.side - 1); ++ix) {
      if (y0 >= 0) visit(ix, y0);
      if (y1 < g.side && ring > 0) visit(ix, y1);
    }
    for (int iy = std::max(y0 + 1, 0); iy <= std::min(y1 - 1, g.side - 1); ++iy) {
      if (x0 >= 0) visit(x0, iy);
      if (x1 < g.side && ring > 0) visit(x1, iy);
    }
    if (heap.size() < count) continue;
    // Distance from the centre to the outside of the searched block.
    double bound = std::numeric_limits<double>::infinity();
    if (x0 > 0) bound = std::min(bound, c.x - (-r + x0 * g.cell));
    if (x1 < g.side - 1) bound = std::min(bound, (-r + (x1 + 1) * g.cell) - c.x);
    if (y0 > 0) bound = std::min(bound, c.y - (-r + y0 * g.cell));
    if (y1 < g.side - 1) bound = std::min(bound, (-r + (y1 + 1) * g.cell) - c.y);
    if (!std::isfinite(bound)) break;
    if (bound > 0.0 && bound * bound >= heap.front().first) break;
  }
}

WeightedDistanceList ApIndex::nearest(Point center, std::size_t count) const {
  if (realization_->ap_count() < count) {
    throw InsufficientPoints("requested " + std::to_string(count) + " APs but the window holds " +
                             std::to_string(realization_->ap_count()));
  }
  WeightedDistanceList merged;
  std::vector<std::pair<double, std::uint32_t>> heap;
  for (std::uint32_t m = 0; m < grids_.size(); ++m) {
    nearest_in_tier(m, center, count, heap);
    for (const auto& [d, i] : heap) merged.push_back({{m, i}, grids_[m].factor * d});
  }
  std::sort(merged.begin(), merged.end(), entry_less);
  merged.resize(count);
  return merged;
}

std::vector<RadialPoint> sample_nearest_weighted(const TierGeometry& geometry, std::size_t count,
                                                 RngStream& rng) {
  if (!(geometry.lambda_tilde > 0.0)) throw InsufficientPoints("network has no APs");
  std::vector<RadialPoint> out;
  out.reserve(count);
  const double rate = std::numbers::pi * geometry.lambda_tilde;
  double key = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    key += rng.exponential(rate);
    double u = rng.uniform();
    std::uint32_t m = 0;
    while (m + 1 < geometry.theta_m.size() && u >= geometry.theta_m[m]) {
      u -= geometry.theta_m[m];
      ++m;
    }
    const double r = std::sqrt(key / geometry.distance_factor[m]);
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    out.push_back({{m, static_cast<std::uint32_t>(k)}, key, {r * std::cos(phi), r * std::sin(phi)}});
  }
  return out;
}

Window default_window(const NetworkConfig& config) {
  const double target = std::max(5000.0, 50.0 * config.K);
  const double density = config.total_ap_density();
  if (!(density > 0.0)) throw ConfigError("network has no APs");
  return {std::sqrt(target / (std::numbers::pi * density))};
}

double association_guard_km(const NetworkConfig& config) {
  const auto g = tier_geometry(config);
  const double k = config.K;
  const double key = (k + 8.0 * std::sqrt(k) + 30.0) / (std::numbers::pi * g.lambda_tilde);
  double widest = 0.0;
  for (double f : g.distance_factor) widest = std::max(widest, 1.0 / f);
  return std::sqrt(key * widest);
}

void write_realization_csv(std::ostream& out, const Realization& realization) {
  out << "kind,tier,x_km,y_km\n";
  out.precision(9);
  for (std::size_t m = 0; m < realization.aps.size(); ++m) {
    for (const auto& p : realization.aps[m]) out << "ap," << m + 1 << ',' << p.x << ',' << p.y << '\n';
  }
  for (const auto& p : realization.users) out << "user,," << p.x << ',' << p.y << '\n';
}

}  // namespace urllc
