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

#include "urllc/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "urllc/errors.hpp"

namespace urllc {

ZetaTable::ZetaTable(double seed) : seed_(seed) {
  if (!(seed > 0.0)) throw DomainError("zeta seed must be positive");
}

std::optional<double> ZetaTable::find(std::size_t tier, int K, double ratio) const {
  for (const auto& e : entries_) {
    if (e.tier == tier && e.K == K &&
        std::abs(e.mu_over_lambda_tilde - ratio) <= 1e-9 * std::max(1.0, std::abs(ratio))) {
      return e.zeta;
    }
  }
  return std::nullopt;
}

double ZetaTable::get(std::size_t tier, int K, double ratio) const {
  return find(tier, K, ratio).value_or(seed_);
}

double ZetaTable::get(std::size_t tier, const NetworkConfig& config) const {
  const auto g = tier_geometry(config);
  return get(tier, config.K, config.user_density / g.lambda_tilde_m.at(tier));
}

void ZetaTable::insert(const ZetaEntry& entry) {
  if (!(entry.zeta > 0.0)) throw DomainError("zeta must be positive");
  for (auto& e : entries_) {
    if (e.tier == entry.tier && e.K == entry.K &&
        std::abs(e.mu_over_lambda_tilde - entry.mu_over_lambda_tilde) <=
            1e-9 * std::max(1.0, std::abs(entry.mu_over_lambda_tilde))) {
      e = entry;
      return;
    }
  }
  entries_.push_back(entry);
}

double load_mean(std::size_t tier, const NetworkConfig& config) {
  const auto g = tier_geometry(config);
  return config.K * config.user_density / g.lambda_tilde_m.at(tier);
}

double nb_pmf(std::uint64_t n, double mean, double zeta) {
  if (!(zeta > 0.0)) throw DomainError("zeta must be positive");
  if (mean <= 0.0) return n == 0 ? 1.0 : 0.0;
  const double a = mean / zeta;
  const double dn = static_cast<double>(n);
  const double log_p = std::lgamma(dn + zeta) - std::lgamma(dn + 1.0) - std::lgamma(zeta) +
                       dn * std::log(a) - (dn + zeta) * std::log1p(a);
  return std::exp(log_p);
}

double load_pmf(std::size_t tier, std::uint64_t n, const NetworkConfig& config,
                const ZetaTable& zeta) {
  return nb_pmf(n, load_mean(tier, config), zeta.get(tier, config));
}

double void_prob(std::size_t tier, const NetworkConfig& config, const ZetaTable& zeta) {
  return load_pmf(tier, 0, config, zeta);
}

double laplace_s_minus_k(double s, int K, double lambda_tilde, double alpha,
                         const QuadratureSpec& spec) {
  if (!(s >= 0.0)) throw DomainError("s must be >= 0");
  if (K < 1) throw DomainError("K must be >= 1");
  if (s == 0.0) return 1.0;
  const double z = 2.0 / alpha;
  const double c = std::numbers::pi * lambda_tilde;
  QuadratureSpec inner = spec;
  inner.relative_tolerance = std::min(spec.relative_tolerance, 1e-11);
  const double log_norm = -std::lgamma(static_cast<double>(K));
  // u = pi lambda_tilde y.
  auto f = [&](double u) {
    if (u <= 0.0) return 0.0;
    const double y = s * std::pow(c / u, alpha / 2.0);
    return std::exp(log_norm + (K - 1) * std::log(u) - u * (1.0 + ell(y, z, inner)));
  };
  return integrate_semi_infinite(f, spec);
}

double laplace_scaled_s_minus_k(double phi, int K, double alpha) {
  if (!(phi >= 0.0)) throw DomainError("phi must be >= 0");
  return std::pow(1.0 + ell(phi, 2.0 / alpha), -K);
}

double distance_power_laplace(double t, int k, double lambda_tilde, double alpha,
                              const QuadratureSpec& spec) {
  if (!(t >= 0.0)) throw DomainError("t must be >= 0");
  if (t == 0.0) return 1.0;
  const double c = std::numbers::pi * lambda_tilde;
  const double log_norm = -std::lgamma(static_cast<double>(k));
  auto f = [&](double u) {
    if (u <= 0.0) return k == 1 ? 1.0 : 0.0;
    return std::exp(log_norm + (k - 1) * std::log(u) - u - t * std::pow(u / c, alpha / 2.0));
  };
  return integrate_semi_infinite(f, spec);
}

double tail_bound_s_k(double y, int K, double lambda_tilde, double alpha) {
  if (!(y >= 0.0)) throw DomainError("y must be >= 0");
  double prod = 1.0;
  for (int k = 1; k <= K; ++k) {
    const double t = 2.0 * k * y / (static_cast<double>(K) * (K + 1));
    prod *= 1.0 - distance_power_laplace(t, k, lambda_tilde, alpha);
  }
  return std::clamp(1.0 - prod, 0.0, 1.0);
}

double noncollision_term(double mean, double zeta, double delta, LoadWeighting weighting) {
  if (mean <= 0.0) return weighting == LoadWeighting::per_ap ? 0.0 : 1.0;
  const double a = mean / zeta;
  if (weighting == LoadWeighting::size_biased) return std::pow(1.0 + a * delta, -zeta - 1.0);
  if (delta >= 1.0) return nb_pmf(1, mean, zeta);
  return (std::pow(1.0 + a * delta, -zeta) - std::pow(1.0 + a, -zeta)) / (1.0 - delta);
}

double uplink_noncollision_ap(const NetworkConfig& config, const ZetaTable& zeta,
                              LoadWeighting weighting) {
  const auto up = config.with_link_biases(Link::uplink);
  const auto g = tier_geometry(up);
  double rho = 0.0;
  for (std::size_t m = 0; m < up.tiers.size(); ++m) {
    if (g.theta_m[m] == 0.0) continue;
    rho += g.theta_m[m] *
           noncollision_term(load_mean(m, up), zeta.get(m, up), up.delta, weighting);
  }
  return rho;
}

double uplink_noncollision_user(double rho_ul, int K) {
  if (!(rho_ul >= 0.0 && rho_ul <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  return 1.0 - std::pow(1.0 - rho_ul, K);
}

double uplink_void_prob(const NetworkConfig& config, const ZetaTable& zeta) {
  const auto up = config.with_link_biases(Link::uplink);
  const auto g = tier_geometry(up);
  double p0 = 0.0;
  for (std::size_t m = 0; m < up.tiers.size(); ++m) {
    if (g.theta_m[m] > 0.0) p0 += g.theta_m[m] * void_prob(m, up, zeta);
  }
  return p0;
}

LinkParams uplink_link_params(const NetworkConfig& config, double theta, const ZetaTable& zeta,
                              LoadWeighting weighting) {
  LinkParams l;
  l.theta = theta;
  l.rho_ul = uplink_noncollision_ap(config, zeta, weighting);
  l.p0 = uplink_void_prob(config, zeta);
  l.delta = config.delta;
  l.alpha = config.alpha;
  l.K = config.K;
  return l;
}

namespace {

void check_link(const LinkParams& l) {
  if (!(l.theta > 0.0)) throw DomainError("theta must be positive");
  if (!(l.alpha > 2.0)) throw DomainError("alpha must exceed 2");
  if (l.K < 1) throw DomainError("K must be >= 1");
}

// 1 + delta theta^(2/alpha) (1 - p0) / sinc(2/alpha).
double uplink_base(const LinkParams& l, double theta) {
  const double z = 2.0 / l.alpha;
  return 1.0 + l.delta * std::pow(theta, z) * (1.0 - l.p0) / sinc(z);
}

}  // namespace

double uplink_reliability_noncollab(const LinkParams& l) {
  check_link(l);
  const double base = uplink_base(l, l.theta);
  double prod = 1.0;
  for (int k = 1; k <= l.K; ++k) prod *= 1.0 - l.rho_ul * std::pow(base, -k);
  return 1.0 - prod;
}

double uplink_reliability_limit(double theta, double delta, double rho_ul, double alpha) {
  const double z = 2.0 / alpha;
  return 1.0 - std::exp(-rho_ul / (delta * std::pow(theta, z)) * sinc(z));
}

double uplink_reliability_collab_bound(const LinkParams& l) {
  check_link(l);
  const double K = l.K;
  double prod = 1.0;
  for (int k = 1; k <= l.K; ++k) {
    const double share = 2.0 * k * l.theta / (K * (K + 1.0));
    prod *= 1.0 - std::pow(uplink_base(l, share), -k);
  }
  return l.rho_ul * (1.0 - prod);
}

double downlink_active_fraction(const NetworkConfig& config, const ZetaTable& zeta) {
  const auto down = config.with_link_biases(Link::downlink);
  const auto g = tier_geometry(down);
  double a = 0.0;
  for (std::size_t m = 0; m < down.tiers.size(); ++m) {
    if (g.theta_m[m] > 0.0) a += g.theta_m[m] * (1.0 - void_prob(m, down, zeta));
  }
  return a;
}

double downlink_reliability_noncollab_bound(int K, double theta, double delta, double alpha,
                                            double active_fraction) {
  if (!(theta > 0.0)) throw DomainError("theta must be positive");
  const double base = 1.0 + delta * ell(theta, 2.0 / alpha) * active_fraction;
  double prod = 1.0;
  for (int k = 1; k <= K; ++k) prod *= 1.0 - std::pow(base, -k);
  return 1.0 - prod;
}

double downlink_reliability_noncollab_bound(int K, double theta, const NetworkConfig& config,
                                            const ZetaTable& zeta) {
  return downlink_reliability_noncollab_bound(K, theta, config.delta, config.alpha,
                                              downlink_active_fraction(config, zeta));
}

double downlink_reliability_limit(double theta, double delta, double alpha) {
  const double z = 2.0 / alpha;
  return 1.0 - std::exp(-sinc(z) / (delta * std::pow(theta, z)));
}

double downlink_reliability_limit(double theta, const NetworkConfig& config) {
  return downlink_reliability_limit(theta, config.delta, config.alpha);
}

namespace {

double collab_base(int K, double theta, double delta, double alpha, double active_fraction) {
  const double shrunk = theta / std::pow(static_cast<double>(K), alpha / 2.0 + 1.0);
  return 1.0 + delta * ell(shrunk, 2.0 / alpha) * active_fraction;
}

}  // namespace

double downlink_reliability_collab_bound(int K, double theta, double delta, double alpha,
                                         double active_fraction) {
  if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
  const double base = collab_base(K, theta, delta, alpha, active_fraction);
  const double v = 1.0 - std::pow(1.0 - std::pow(base, -K), K);
  return std::clamp(v, 0.0, 1.0);
}

double downlink_reliability_collab_bound(int K, double theta, const NetworkConfig& config,
                                         const ZetaTable& zeta) {
  return downlink_reliability_collab_bound(K, theta, config.delta, config.alpha,
                                           downlink_active_fraction(config, zeta));
}

double downlink_reliability_collab_as_printed(int K, double theta, double delta, double alpha,
                                              double active_fraction) {
  const double base = collab_base(K, theta, delta, alpha, active_fraction);
  return 1.0 - std::pow(1.0 - std::pow(base, K), -K);
}

void DelayModel::validate() const {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (!(slot_ms > 0.0)) throw DomainError("slot must be positive");
  for (double p : {q, rho_ul_K, eta_ul_K, eta_dl_K}) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("success probabilities must lie in [0, 1]");
  }
}

double default_backhaul_success(const LinkParams& l) {
  check_link(l);
  const double base = uplink_base(l, l.theta);
  double sum = 0.0;
  for (int k = 1; k <= l.K; ++k) sum += std::pow(base, -k);
  return l.rho_ul * sum / l.K;
}

double uplink_backhaul_mean(double beta, int K, double q, Collaboration mode) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (mode == Collaboration::collaborative) return 1.0 / beta;
  if (!(q > 0.0 && q <= 1.0)) throw DegenerateReliability("per-AP success probability must be in (0, 1]");
  const double floor_mass = std::pow(1.0 - q, K);
  // Survivor of the earliest backhaul completion among successful APs, given at least one.
  auto f = [&](double v) { return std::pow(1.0 - q + q * std::exp(-v), K) - floor_mass; };
  return integrate_semi_infinite(f) / (beta * (1.0 - floor_mass));
}

double downlink_backhaul_mean(double beta, int K, Collaboration mode) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (mode == Collaboration::non_collaborative) return 1.0 / (beta * K);
  double h = 0.0;
  for (int k = 1; k <= K; ++k) h += 1.0 / k;
  return h / beta;
}

double mean_uplink_delay(const DelayModel& d, int K, Collaboration mode) {
  d.validate();
  if (d.rho_ul_K <= 0.0 || d.eta_ul_K <= 0.0) {
    throw DegenerateReliability("uplink reliabilities must be positive");
  }
  return d.slot_ms * (1.0 / d.rho_ul_K + 1.0 / d.eta_ul_K) +
         uplink_backhaul_mean(d.beta, K, d.q, mode);
}

double mean_downlink_delay(const DelayModel& d, int K, Collaboration mode) {
  d.validate();
  if (d.eta_dl_K <= 0.0) throw DegenerateReliability("downlink reliability must be positive");
  return d.slot_ms / d.eta_dl_K + downlink_backhaul_mean(d.beta, K, mode);
}

}  // namespace urllc
