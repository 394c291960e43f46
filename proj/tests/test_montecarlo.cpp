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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "urllc/errors.hpp"
#include "urllc/montecarlo.hpp"
#include "urllc/rng.hpp"

using namespace urllc;

namespace {

SimPlan fixed_trials(std::uint64_t n, std::uint64_t seed = 11) {
  SimPlan p;
  p.stop = {n, n};
  p.seed = seed;
  p.workers = 1;
  return p;
}

}  // namespace

TEST_CASE("outage engine is independent of the worker count") {
  auto trial = [](std::uint64_t i) {
    RngStream r(5, i);
    return r.uniform() < 0.03;
  };
  const auto a = run_outage_trials(trial, {150, 100000}, 1, true);
  const auto b = run_outage_trials(trial, {150, 100000}, 4, true);
  CHECK(a.trials == b.trials);
  CHECK(a.events == b.events);
  CHECK(a.trial_outages == b.trial_outages);
  CHECK(a.terminated_by == Termination::events);
  CHECK(a.events == 150);
  // The run stops on the trial that produced the last event.
  CHECK(a.trial_outages.back() == 1);
  CHECK(a.std_error == doctest::Approx(std::sqrt(a.outage * (1 - a.outage) / a.trials)));
}

TEST_CASE("outage engine trial cap") {
  const auto e = run_outage_trials([](std::uint64_t) { return false; }, {10, 1000}, 2);
  CHECK(e.trials == 1000);
  CHECK(e.events == 0);
  CHECK(e.terminated_by == Termination::trial_cap);
  CHECK(e.reliability == 1.0);
}

TEST_CASE("mean engine is bit-identical across worker counts") {
  auto trial = [](std::uint64_t i, double* x) {
    RngStream r(9, i);
    x[0] = r.exponential();
    x[1] = r.uniform();
  };
  const auto a = run_mean_trials(2, trial, 10'000, 1);
  const auto b = run_mean_trials(2, trial, 10'000, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.mean[0] == doctest::Approx(1.0).epsilon(0.05));
  CHECK(a.std_error[1] == doctest::Approx(std::sqrt(1.0 / 12 / 10'000)).epsilon(0.05));
}

TEST_CASE("plan validation") {
  SimPlan p;
  p.stop = {0, 10};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.stop = {20, 10};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.stop = {1, 10};
  CHECK_NOTHROW(p.validate());
  const auto c = reference_config();
  p.link = Link::downlink;
  CHECK_THROWS_AS(estimate_uplink_reliability(c, p, 1.0), ConfigError);
  p.link = Link::uplink;
  p.mode = SimMode::model_matched;
  CHECK_THROWS_AS(estimate_uplink_reliability(c, p, 1.0), ConfigError);
}

TEST_CASE("model-matched uplink: vanishing threshold leaves only collisions") {
  auto c = reference_config(250, 0.5, 3);
  ModelInputs in;
  in.rho_ul = 0.6;
  in.p0 = 0.3;
  auto p = fixed_trials(20'000);
  p.mode = SimMode::model_matched;
  const auto e = estimate_uplink_reliability(c, p, 1e-12, in);
  const double expected = 1.0 - std::pow(0.4, 3);
  CHECK(std::abs(e.reliability - expected) < 4 * e.std_error);
}

TEST_CASE("model-matched uplink without interference or collisions always succeeds") {
  auto c = reference_config(250, 0.5, 1);
  ModelInputs in;
  in.rho_ul = 1.0;
  in.p0 = 1.0;  // mu_a = 0
  auto p = fixed_trials(2'000);
  p.mode = SimMode::model_matched;
  CHECK(estimate_uplink_reliability(c, p, 10.0, in).reliability == 1.0);
}

TEST_CASE("model-matched uplink follows the product form") {
  const ZetaTable z;
  for (int K : {1, 3}) {
    const auto c = reference_config(250, 0.5, K);
    const double theta = 3.0;
    const auto in = model_inputs(c, z);
    auto p = fixed_trials(20'000, 100 + K);
    p.mode = SimMode::model_matched;
    const auto e = estimate_uplink_reliability(c, p, theta, in);
    const double analytic = uplink_reliability_noncollab(uplink_link_params(c, theta, z));
    CHECK(std::abs(e.reliability - analytic) < 3 * e.std_error);
  }
}

TEST_CASE("downlink: only member APs active means no interference") {
  const auto c = reference_config(250, 0.5, 1, Link::downlink);
  ModelInputs in;
  in.tier_void = {1.0, 1.0};
  auto p = fixed_trials(1'000);
  p.mode = SimMode::model_matched;
  p.link = Link::downlink;
  CHECK(estimate_downlink_reliability(c, p, 100.0, in).reliability == 1.0);
}

TEST_CASE("downlink: collaboration never hurts on paired seeds") {
  const auto c = reference_config(250, 0.5, 3, Link::downlink);
  auto p = fixed_trials(400);
  p.link = Link::downlink;
  p.window_km = 0.6;
  p.record_trials = true;
  const double theta = 20.0;
  const auto nc = estimate_downlink_reliability(c, p, theta);
  p.collaboration = Collaboration::collaborative;
  const auto co = estimate_downlink_reliability(c, p, theta);
  REQUIRE(nc.trial_outages.size() == co.trial_outages.size());
  for (std::size_t i = 0; i < nc.trial_outages.size(); ++i) {
    CHECK(co.trial_outages[i] <= nc.trial_outages[i]);
  }
  CHECK(co.events < nc.events);
}

TEST_CASE("downlink: correlated fading stays close to independent fading") {
  const auto c = reference_config(250.0, 0.5, 4);
  const auto inputs = model_inputs(c, ZetaTable{});
  SimPlan p;
  p.mode = SimMode::model_matched;
  p.link = Link::downlink;
  p.stop = {200, 200'000};
  p.seed = 14;
  const auto ind = estimate_downlink_reliability(c, p, 0.6964, inputs);
  p.fading = Fading::distance_correlated;
  const auto cor = estimate_downlink_reliability(c, p, 0.6964, inputs);
  CHECK(std::abs(std::log10(cor.outage / ind.outage)) <= 0.3);
  // Distances in km instead of m make the members nearly fully correlated.
  p.correlation_length_km = 1.0;
  const auto strong = estimate_downlink_reliability(c, p, 0.6964, inputs);
  CHECK(strong.outage > cor.outage);
}

TEST_CASE("system-level runs are deterministic across workers") {
  const auto c = reference_config(250, 0.5, 2);
  auto p = fixed_trials(300);
  p.window_km = 0.6;
  const auto a = estimate_uplink_reliability(c, p, 2.0);
  p.workers = 3;
  const auto b = estimate_uplink_reliability(c, p, 2.0);
  CHECK(a.events == b.events);
  CHECK(a.trials == b.trials);
}

TEST_CASE("uplink: vanishing threshold in the system-level model") {
  // With theta -> 0 only collisions fail; the tagged user fails iff every member collides.
  const auto c = reference_config(250, 0.5, 2);
  auto p = fixed_trials(3'000);
  p.window_km = 0.6;
  const auto e = estimate_uplink_reliability(c, p, 1e-12);
  const auto nc = estimate_noncollision(c, 3'000, 11, 0.6, 0.3, 1);
  // Member-level non-collision near 0.96 implies user-level outage of a few 1e-3.
  CHECK(nc.per_member > 0.9);
  CHECK(e.outage < 0.02);
}

TEST_CASE("load histogram statistics") {
  LoadHistogram h;
  h.add(0, 2);
  h.add(2, 2);
  CHECK(h.total() == 4);
  CHECK(h.mean() == 1.0);
  CHECK(h.variance() == 1.0);
  CHECK(tv_distance(h, [](std::size_t n) { return n == 0 || n == 2 ? 0.5 : 0.0; }) ==
        doctest::Approx(0.0));
  CHECK(tv_distance(h, [](std::size_t n) { return n == 1 ? 1.0 : 0.0; }) == doctest::Approx(1.0));
}

TEST_CASE("load PMF: no users, and the mean load") {
  auto c = reference_config(100, 0.5, 2);
  c.user_density = 0.0;
  auto e = estimate_load_pmf(c, 20, 1, 0.5, 0.3, 1);
  CHECK(e.tiers[1].counts.size() == 1);
  CHECK(e.tiers[1].total() > 0);

  c = reference_config(100, 1.0, 2);
  e = estimate_load_pmf(c, 400, 2, 0.8, 0.55, 1);
  const ZetaTable z;
  CHECK(e.tiers[1].mean() == doctest::Approx(load_mean(1, c)).epsilon(0.03));
  CHECK(e.tiers[1].total() > 1000);
}

TEST_CASE("per-AP non-collision frequency against the closed form") {
  const auto c = reference_config(250, 0.5, 1);
  const auto e = estimate_noncollision(c, 2'000, 4, 0.5, 0.3, 1);
  const ZetaTable z;
  CHECK(std::abs(e.per_ap - uplink_noncollision_ap(c, z)) < 0.03);
  CHECK(std::abs(e.per_member - uplink_noncollision_ap(c, z, LoadWeighting::size_biased)) < 0.03);
}

TEST_CASE("far-field transform of a PPP") {
  // Unit-density PPP outside radius sqrt(a): -pi sqrt(c) atan(sqrt(c)/a) for alpha = 4.
  CHECK(ppp_tail_log_laplace(0.0, 1.0, 4.0) == 0.0);
  CHECK(ppp_tail_log_laplace(2.0, 0.5, 4.0) ==
        doctest::Approx(-std::numbers::pi * std::sqrt(2.0) * std::atan(std::sqrt(2.0) / 0.5)));
  for (double c : {0.01, 1.0, 50.0}) {
    for (double a : {0.1, 1.0, 10.0}) {
      // v = a / x^2 maps (a, inf) onto (0, 1] with a smooth integrand.
      auto f = [&](double x) { return 2 * a * c / (c * x * x * x + std::pow(a, 1.5)); };
      const double ref = -std::numbers::pi * oracle::simpson(f, 0.0, 1.0, 20000);
      CHECK(ppp_tail_log_laplace(c, a, 3.0) == doctest::Approx(ref).epsilon(1e-5));
    }
  }
}

TEST_CASE("shot transforms") {
  const auto e = estimate_shot_laplace(1.0, 4.0, {2}, {0.0, 0.1, 1.0}, {0.0, 1.0}, 100'000, 3);
  CHECK(e.s_minus_k[0][0] == 1.0);
  CHECK(e.s_k[0][0] == 1.0);
  CHECK(e.scaled[0][0] == 1.0);
  for (std::size_t j = 1; j < 3; ++j) {
    const double ref = laplace_s_minus_k(e.s[j], 2, 1.0, 4.0);
    CHECK(std::abs(e.s_minus_k[0][j] - ref) < 4 * e.s_minus_k_se[0][j]);
  }
  CHECK(std::abs(e.scaled[0][1] - std::pow(1 + std::numbers::pi / 4, -2)) < 4 * e.scaled_se[0][1]);
  // Tail probabilities at the two extremes.
  const auto t = estimate_shot_tail(1.0, 4.0, 1, {0.0, 1e9}, 1000, 2);
  CHECK(t.mean[0] == 1.0);
  CHECK(t.mean[1] < 0.01);
}

TEST_CASE("shot transforms: tilted gaps and averaged marks stay unbiased") {
  ShotOptions tilted;
  tilted.tilt = 0.35;
  tilted.tilted_gaps = 3;
  ShotOptions averaged;
  averaged.marks = ShotMarks::conditional;
  for (const auto& o : {tilted, averaged}) {
    const auto e = estimate_shot_laplace(1.0, 4.0, {1, 3}, {1.0, 10.0}, {1.0}, 200'000, 9, o);
    for (std::size_t ki = 0; ki < 2; ++ki) {
      for (std::size_t j = 0; j < 2; ++j) {
        const double ref = laplace_s_minus_k(e.s[j], e.K[ki], 1.0, 4.0);
        CHECK(std::abs(e.s_minus_k[ki][j] - ref) < 4 * e.s_minus_k_se[ki][j]);
      }
      const double closed = std::pow(1 + std::numbers::pi / 4, -e.K[ki]);
      CHECK(std::abs(e.scaled[ki][0] - closed) < 4 * e.scaled_se[ki][0]);
    }
  }
  CHECK_THROWS_AS(estimate_shot_laplace(1.0, 4.0, {1}, {1.0}, {}, 10, 1, {.tilt = 0.0}), DomainError);
}

TEST_CASE("delay: degenerate reliabilities and the fast-backhaul limit") {
  DelayModel d;
  d.rho_ul_K = d.eta_ul_K = d.eta_dl_K = 1.0;
  d.beta = 1e12;
  const auto e = estimate_delay(d, 3, Collaboration::collaborative, 0.2, 1000, 1);
  CHECK(e.mean_ms == doctest::Approx(3 * d.slot_ms).epsilon(1e-6));
  CHECK(e.outage == 0.0);
  d.eta_dl_K = 0.0;
  CHECK_THROWS_AS(estimate_delay(d, 3, Collaboration::collaborative, 1.0, 10, 1),
                  DegenerateReliability);
}

TEST_CASE("delay means against the closed forms") {
  DelayModel d;
  d.rho_ul_K = 0.9;
  d.eta_ul_K = 0.8;
  d.eta_dl_K = 0.95;
  d.q = 0.6;
  for (auto mode : {Collaboration::non_collaborative, Collaboration::collaborative}) {
    const auto e = estimate_delay(d, 3, mode, 1.0, 200'000, 8);
    const double ref = mean_uplink_delay(d, 3, mode) + mean_downlink_delay(d, 3, mode);
    CHECK(std::abs(e.mean_ms - ref) < 4 * e.mean_se);
  }
}
