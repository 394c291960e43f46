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

#include "urllc/config.hpp"

#include <cmath>
#include <string>

#include "urllc/errors.hpp"

namespace urllc {

void NetworkConfig::validate() const {
  if (tiers.empty()) throw ConfigError("at least one tier is required");
  if (!(alpha > 2.0) || !std::isfinite(alpha)) throw ConfigError("alpha must exceed 2");
  if (!(delta > 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in (0, 1]");
  const double r = 1.0 / delta;
  if (std::abs(r - std::round(r)) > 1e-9) {
    throw ConfigError("1/delta must be an integer RRU count, got " + std::to_string(r));
  }
  if (K < 1) throw ConfigError("K must be at least 1");
  if (!(user_density >= 0.0)) throw ConfigError("user density must be >= 0");
  for (const auto& t : tiers) {
    if (!(t.density >= 0.0)) throw ConfigError("tier density must be >= 0");
    if (!(t.bias > 0.0)) throw ConfigError("tier bias must be > 0");
    if (!(t.power_w > 0.0)) throw ConfigError("tier power must be > 0");
  }
}

std::uint32_t NetworkConfig::rru_count() const {
  return static_cast<std::uint32_t>(std::lround(1.0 / delta));
}

std::vector<double> NetworkConfig::biases() const {
  std::vector<double> out;
  out.reserve(tiers.size());
  for (const auto& t : tiers) out.push_back(t.bias);
  return out;
}

double NetworkConfig::total_ap_density() const {
  double sum = 0.0;
  for (const auto& t : tiers) sum += t.density;
  return sum;
}

NetworkConfig NetworkConfig::with_link_biases(Link link) const {
  NetworkConfig out = *this;
  for (auto& t : out.tiers) t.bias = link == Link::uplink ? 1.0 : t.power_w;
  return out;
}

NetworkConfig NetworkConfig::with_K(int k) const {
  NetworkConfig out = *this;
  out.K = k;
  return out;
}

NetworkConfig reference_config(double lambda2, double mu_over_lambda2, int K, Link link) {
  NetworkConfig c;
  c.tiers = {{20.0, 1.0, 1.0}, {5.0, lambda2, 1.0}};
  c.user_density = mu_over_lambda2 * lambda2;
  c.alpha = 4.0;
  c.delta = 0.05;
  c.K = K;
  return c.with_link_biases(link);
}

TierGeometry tier_geometry(const NetworkConfig& config) {
  TierGeometry g;
  const double z = 2.0 / config.alpha;
  for (const auto& t : config.tiers) g.lambda_tilde += std::pow(t.bias, z) * t.density;
  for (const auto& t : config.tiers) {
    const double wz = std::pow(t.bias, z);
    g.lambda_tilde_m.push_back(g.lambda_tilde / wz);
    g.theta_m.push_back(g.lambda_tilde > 0.0 ? wz * t.density / g.lambda_tilde : 0.0);
    g.distance_factor.push_back(1.0 / wz);
  }
  return g;
}

}  // namespace urllc
