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

#include <cstdint>
#include <vector>

namespace urllc {

struct Tier {
  double power_w = 1.0;
  double density = 0.0;  // APs per km^2
  double bias = 1.0;
};

enum class Link { uplink, downlink };
enum class Collaboration { non_collaborative, collaborative };

struct NetworkConfig {
  std::vector<Tier> tiers;
  double user_density = 0.0;  // users per km^2
  double alpha = 4.0;
  double delta = 0.05;
  int K = 1;

  // Throws ConfigError.
  void validate() const;
  std::uint32_t rru_count() const;
  std::vector<double> biases() const;
  double total_ap_density() const;

  // Copies with w_m = 1 (uplink) or w_m = P_m (downlink).
  NetworkConfig with_link_biases(Link link) const;
  NetworkConfig with_K(int k) const;
};

// Two-tier macro/small-cell network with the reference powers, alpha and delta.
NetworkConfig reference_config(double lambda2 = 250.0, double mu_over_lambda2 = 0.5, int K = 4,
                            Link link = Link::uplink);

struct TierGeometry {
  double lambda_tilde = 0.0;
  std::vector<double> lambda_tilde_m;
  std::vector<double> theta_m;
  // w_m^(-2/alpha): multiplies squared Euclidean distance into weighted distance.
  std::vector<double> distance_factor;
};

TierGeometry tier_geometry(const NetworkConfig& config);

}  // namespace urllc
