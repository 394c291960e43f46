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
#include <optional>
#include <vector>

#include "urllc/config.hpp"
#include "urllc/numerics.hpp"

namespace urllc {

struct ZetaEntry {
  std::size_t tier = 0;
  int K = 1;
  double mu_over_lambda_tilde = 0.0;
  double zeta = 3.5;
  std::uint64_t samples = 0;
  double tv_distance = 0.0;
};

// Fitted load-shape parameters keyed by (tier, K, mu / lambda_tilde_m).
// Lookups that miss fall back to the seed value.
class ZetaTable {
 public:
  explicit ZetaTable(double seed = 3.5);

  double seed() const { return seed_; }
  std::optional<double> find(std::size_t tier, int K, double mu_over_lambda_tilde) const;
  double get(std::size_t tier, int K, double mu_over_lambda_tilde) const;
  double get(std::size_t tier, const NetworkConfig& config) const;
  void insert(const ZetaEntry& entry);
  const std::vector<ZetaEntry>& entries() const { return entries_; }

 private:
  double seed_;
  std::vector<ZetaEntry> entries_;
};

// Mean tier-m load K mu / lambda_tilde_m.
double load_mean(std::size_t tier, const NetworkConfig& config);

// Gamma-Poisson PMF with the given mean and shape.
double nb_pmf(std::uint64_t n, double mean, double zeta);

double load_pmf(std::size_t tier, std::uint64_t n, const NetworkConfig& config,
                const ZetaTable& zeta);
double void_prob(std::size_t tier, const NetworkConfig& config, const ZetaTable& zeta);

// Laplace transform of S_{-K} by quadrature over the Gamma(K, pi lambda_tilde) law.
double laplace_s_minus_k(double s, int K, double lambda_tilde, double alpha,
                         const QuadratureSpec& spec = {});
// [1 + l(phi, 2/alpha)]^-K.
double laplace_scaled_s_minus_k(double phi, int K, double alpha);
// E[exp(-t Y^(alpha/2))], Y ~ Gamma(k, pi lambda_tilde).
double distance_power_laplace(double t, int k, double lambda_tilde, double alpha,
                              const QuadratureSpec& spec = {});
double tail_bound_s_k(double y, int K, double lambda_tilde, double alpha);

// per_ap follows the printed load weighting; size_biased is the load seen by a tagged user.
enum class LoadWeighting { per_ap, size_biased };

// One tier's term of the non-collision reliability.
double noncollision_term(double mean, double zeta, double delta,
                         LoadWeighting weighting = LoadWeighting::per_ap);
// Uses uplink biases regardless of the biases carried by `config`.
double uplink_noncollision_ap(const NetworkConfig& config, const ZetaTable& zeta,
                              LoadWeighting weighting = LoadWeighting::per_ap);
double uplink_noncollision_user(double rho_ul, int K);
// Tier mixture sum_m theta_m p_{m,0} under uplink biases.
double uplink_void_prob(const NetworkConfig& config, const ZetaTable& zeta);

struct LinkParams {
  double theta = 1.0;
  double rho_ul = 1.0;
  double p0 = 0.0;
  double delta = 0.05;
  double alpha = 4.0;
  int K = 1;
};

LinkParams uplink_link_params(const NetworkConfig& config, double theta, const ZetaTable& zeta,
                              LoadWeighting weighting = LoadWeighting::per_ap);

double uplink_reliability_noncollab(const LinkParams& link);
double uplink_reliability_limit(double theta, double delta, double rho_ul, double alpha);
double uplink_reliability_collab_bound(const LinkParams& link);

// sum_m theta_m (1 - p_{m,0}) under downlink biases.
double downlink_active_fraction(const NetworkConfig& config, const ZetaTable& zeta);

double downlink_reliability_noncollab_bound(int K, double theta, double delta, double alpha,
                                            double active_fraction);
double downlink_reliability_noncollab_bound(int K, double theta, const NetworkConfig& config,
                                            const ZetaTable& zeta);
double downlink_reliability_limit(double theta, double delta, double alpha);
double downlink_reliability_limit(double theta, const NetworkConfig& config);

// Collaborative downlink bound in the sign-consistent form
// 1 - {1 - [1 + delta l(theta / K^(alpha/2+1)) A]^-K}^K, clamped to [0, 1].
double downlink_reliability_collab_bound(int K, double theta, double delta, double alpha,
                                         double active_fraction);
double downlink_reliability_collab_bound(int K, double theta, const NetworkConfig& config,
                                         const ZetaTable& zeta);
// Literal transcription 1 - {1 - [1 + delta l A]^K}^-K, unclamped; NaN or out of
// range for most inputs.
double downlink_reliability_collab_as_printed(int K, double theta, double delta, double alpha,
                                              double active_fraction);

struct DelayModel {
  double beta = 5.0;       // backhaul messages per ms
  double slot_ms = 0.05;
  double q = 1.0;          // per-AP uplink success probability
  double rho_ul_K = 1.0;
  double eta_ul_K = 1.0;
  double eta_dl_K = 1.0;

  void validate() const;
};

// Per-AP success used for the backhaul AP count: rho * mean_k (1 + delta theta^(2/a)(1-p0)/sinc)^-k.
double default_backhaul_success(const LinkParams& link);

double uplink_backhaul_mean(double beta, int K, double q, Collaboration mode);
double downlink_backhaul_mean(double beta, int K, Collaboration mode);
double mean_uplink_delay(const DelayModel& delay, int K, Collaboration mode);
double mean_downlink_delay(const DelayModel& delay, int K, Collaboration mode);

}  // namespace urllc
