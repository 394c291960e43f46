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
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "urllc/analysis.hpp"
#include "urllc/config.hpp"
#include "urllc/geometry.hpp"

namespace urllc {

enum class SimMode { model_matched, system_level };
enum class Fading { independent, distance_correlated };
enum class Termination { events, trial_cap };
// System-level uplink: K copies at power 1/K (one per member) or one unit-power copy.
enum class UplinkCopies { per_member, single };
// Model-matched uplink: member distances drawn from their Gamma marginals
// independently, or jointly as the ordered nearest points.
enum class MemberGeometry { marginal, joint };

struct StopRule {
  std::uint64_t target_events = 200;
  std::uint64_t max_trials = 20'000'000;
};

struct SimPlan {
  SimMode mode = SimMode::system_level;
  Fading fading = Fading::independent;
  Collaboration collaboration = Collaboration::non_collaborative;
  Link link = Link::uplink;
  StopRule stop;
  std::uint64_t seed = 1;
  std::size_t workers = 0;       // 0: hardware concurrency
  double window_km = 0.0;        // 0: default_window
  UplinkCopies copies = UplinkCopies::per_member;
  MemberGeometry member_geometry = MemberGeometry::marginal;
  double correlation_length_km = 0.001;  // unit of d in the correlated-fading model (1 m)
  bool record_trials = false;    // keep per-trial outcomes (at most 1e5)

  void validate() const;
};

// Analytic quantities the model-matched simulators draw from.
struct ModelInputs {
  double rho_ul = std::numeric_limits<double>::quiet_NaN();
  double p0 = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> tier_void;  // downlink p_{m,0} per tier
};

ModelInputs model_inputs(const NetworkConfig& config, const ZetaTable& zeta,
                         LoadWeighting weighting = LoadWeighting::per_ap);

struct ReliabilityEstimate {
  double reliability = 0.0;
  double outage = 0.0;  // events / trials
  std::uint64_t trials = 0;
  std::uint64_t events = 0;
  double std_error = 0.0;
  Termination terminated_by = Termination::trial_cap;
  std::vector<std::uint8_t> trial_outages;
};

ReliabilityEstimate estimate_uplink_reliability(const NetworkConfig& config, const SimPlan& plan,
                                                double theta, const ModelInputs& inputs = {});
ReliabilityEstimate estimate_downlink_reliability(const NetworkConfig& config,
                                                  const SimPlan& plan, double theta,
                                                  const ModelInputs& inputs = {});

// Counts outage trials of `trial(index)` under the stop rule. Blocks of trials are
// distributed over workers and merged in trial order, so the result does not depend
// on the worker count.
ReliabilityEstimate run_outage_trials(const std::function<bool(std::uint64_t)>& trial,
                                      const StopRule& stop, std::size_t workers,
                                      bool record = false);

// Fixed-count accumulation of `width` per-trial values; returns means and standard errors.
struct MeanEstimate {
  std::vector<double> mean;
  std::vector<double> std_error;
  std::uint64_t trials = 0;
};
MeanEstimate run_mean_trials(std::size_t width,
                             const std::function<void(std::uint64_t, double*)>& trial,
                             std::uint64_t trials, std::size_t workers);

struct LoadHistogram {
  std::vector<double> counts;  // counts[n] = APs carrying n users

  double total() const;
  double mean() const;
  double variance() const;
  void add(std::size_t n, double weight = 1.0);
};

struct LoadPmfEstimate {
  std::vector<LoadHistogram> tiers;
  std::uint64_t realizations = 0;
};

// Per-tier load histograms over APs inside an inner disc of each realization.
LoadPmfEstimate estimate_load_pmf(const NetworkConfig& config, std::uint64_t realizations,
                                  std::uint64_t seed, double window_km, double inner_km,
                                  std::size_t workers = 0);

double tv_distance(const LoadHistogram& histogram, const std::function<double(std::size_t)>& pmf);

struct NonCollisionEstimate {
  double per_ap = 0.0;       // AP average of the non-collided share of its users (void: 0)
  double per_ap_se = 0.0;
  double per_member = 0.0;   // non-collision frequency seen by a tagged user at its members
  double per_member_se = 0.0;
  std::uint64_t trials = 0;
};

NonCollisionEstimate estimate_noncollision(const NetworkConfig& config, std::uint64_t trials,
                                           std::uint64_t seed, double window_km, double inner_km,
                                           std::size_t workers = 0);

struct ShotLaplaceEstimate {
  std::vector<int> K;
  std::vector<double> s;
  std::vector<double> phi;
  // Indexed [K][grid point].
  std::vector<std::vector<double>> s_k, s_k_se;              // E[exp(-s S_K)]
  std::vector<std::vector<double>> s_minus_k, s_minus_k_se;  // E[exp(-s S_-K)]
  std::vector<std::vector<double>> scaled, scaled_se;        // E[exp(-phi Y_K^(alpha/2) S_-K)]
  std::uint64_t trials = 0;
};

// sampled: draw the unit-mean exponential marks; conditional: average them out given the
// point distances, leaving only the geometry random.
enum class ShotMarks { sampled, conditional };

struct ShotOptions {
  std::size_t extra_points = 16;  // points drawn beyond max(K)
  std::size_t workers = 0;
  ShotMarks marks = ShotMarks::sampled;
  // Importance sampling: the first `tilted_gaps` squared-distance gaps are drawn at
  // `tilt` times their rate and each trial carries the likelihood ratio.
  double tilt = 1.0;
  std::size_t tilted_gaps = 0;
};

// Shot processes of a PPP with density lambda_tilde. The nearest max(K) + extra_points
// points are drawn with their marks; the points beyond the last drawn one enter through
// the exact conditional transform of the remaining PPP.
ShotLaplaceEstimate estimate_shot_laplace(double lambda_tilde, double alpha,
                                          const std::vector<int>& K,
                                          const std::vector<double>& s_grid,
                                          const std::vector<double>& phi_grid,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const ShotOptions& options = {});

// P[S_K >= y] for each y.
MeanEstimate estimate_shot_tail(double lambda_tilde, double alpha, int K,
                                const std::vector<double>& y_grid, std::uint64_t trials,
                                std::uint64_t seed, std::size_t workers = 0);

// log E[exp(-c sum_{|x|^2 > a} H |x|^-alpha)] for a unit-density PPP outside radius sqrt(a).
double ppp_tail_log_laplace(double c, double a, double alpha);

struct DelayEstimate {
  double mean_ms = 0.0;
  double mean_se = 0.0;
  double outage = 0.0;  // P[total > budget]
  double outage_se = 0.0;
  std::uint64_t trials = 0;
};

DelayEstimate estimate_delay(const DelayModel& delay, int K, Collaboration mode,
                             double budget_ms, std::uint64_t trials, std::uint64_t seed,
                             std::size_t workers = 0);

std::string to_string(SimMode m);
std::string to_string(Fading f);
std::string to_string(Collaboration c);
std::string to_string(Link l);
std::string to_string(Termination t);

}  // namespace urllc
