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

#include "urllc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <thread>

#include "urllc/association.hpp"
#include "urllc/errors.hpp"
#include "urllc/numerics.hpp"
#include "urllc/rng.hpp"

namespace urllc {

namespace {

constexpr std::uint64_t kBlock = 256;
constexpr std::uint64_t kMaxRecorded = 100'000;

enum Substream : std::uint32_t { kGeometry = 1, kFading = 2, kGates = 3, kInterferers = 4 };

std::size_t resolve_workers(std::size_t workers) {
  if (workers > 0) return workers;
  const unsigned h = std::thread::hardware_concurrency();
  return h > 0 ? h : 1;
}

// Evaluates job(b) for b in [0, count) and stores the results in block order.
template <class R, class Job>
void run_blocks(std::size_t count, std::size_t workers, std::vector<R>& out, const Job& job) {
  out.assign(count, R{});
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t b; (b = next.fetch_add(1)) < count;) {
      try {
        out[b] = job(b);
      } catch (...) {
        errors[b] = std::current_exception();
      }
    }
  };
  const std::size_t n = std::min(workers, count);
  if (n <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n);
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

struct Moments {
  std::vector<double> mean;
  std::vector<double> m2;
  std::uint64_t n = 0;

  explicit Moments(std::size_t width = 0) : mean(width, 0.0), m2(width, 0.0) {}

  void add(const double* x) {
    ++n;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double d = x[i] - mean[i];
      mean[i] += d / static_cast<double>(n);
      m2[i] += d * (x[i] - mean[i]);
    }
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
    const double total = na + nb;
    for (std::size_t i = 0; i < mean.size(); ++i) {
      const double d = o.mean[i] - mean[i];
      mean[i] += d * nb / total;
      m2[i] += o.m2[i] + d * d * na * nb / total;
    }
    n += o.n;
  }
};

double power_law(double squared_distance, double alpha) {
  return std::pow(squared_distance, -alpha / 2.0);
}

// Gain of member k given the first member's gain; d is the normalised member separation.
double correlated_gain(double first, double fresh, double d, double alpha) {
  const double da = std::pow(d, alpha);
  return first / (1.0 + da) + da / (1.0 + da) * fresh;
}

double window_radius(const NetworkConfig& config, const SimPlan& plan) {
  return plan.window_km > 0.0 ? plan.window_km : default_window(config).radius_km;
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ConfigError(std::string("model-matched run needs ") + what);
}

// ---- uplink ------------------------------------------------------------------

std::function<bool(std::uint64_t)> uplink_model_matched(const NetworkConfig& config,
                                                        const SimPlan& plan, double theta,
                                                        const ModelInputs& inputs) {
  require_finite(inputs.rho_ul, "rho_ul");
  require_finite(inputs.p0, "p0");
  if (plan.fading != Fading::independent) {
    throw ConfigError("model-matched uplink supports independent fading only");
  }
  const auto up = config.with_link_biases(Link::uplink);
  const double lt = tier_geometry(up).lambda_tilde;
  const double mu_a = up.delta * (1.0 - inputs.p0) * lt;
  constexpr double kInterferers = 400.0;
  const double r2 = mu_a > 0.0 ? kInterferers / (std::numbers::pi * mu_a) : 0.0;
  const int K = up.K;
  const double alpha = up.alpha;
  const double rho = inputs.rho_ul;
  const bool collab = plan.collaboration == Collaboration::collaborative;
  const bool joint = plan.member_geometry == MemberGeometry::joint;
  const std::uint64_t seed = plan.seed;

  return [=](std::uint64_t i) {
    RngStream geo(seed, i, kGeometry), fad(seed, i, kFading), gate(seed, i, kGates),
        intf(seed, i, kInterferers);
    auto interference = [&] {
      if (mu_a <= 0.0) return 0.0;
      const std::uint64_t n = intf.poisson(kInterferers);
      double sum = 0.0;
      for (std::uint64_t j = 0; j < n; ++j) {
        const double d2 = r2 * intf.uniform();
        sum += intf.exponential() * power_law(d2, alpha);
      }
      return sum;
    };
    double y = 0.0;
    std::vector<double> signal(K);
    for (int k = 0; k < K; ++k) {
      if (joint) {
        y += geo.exponential(std::numbers::pi * lt);
      } else {
        y = sample_gamma(k + 1, std::numbers::pi * lt, geo);
      }
      signal[k] = fad.exponential() * power_law(y, alpha);
    }
    if (collab) {
      if (!gate.bernoulli(rho)) return true;
      double total = 0.0;
      for (double s : signal) total += s;
      return total < theta * interference();
    }
    for (int k = 0; k < K; ++k) {
      if (gate.bernoulli(rho) && signal[k] >= theta * interference()) return false;
    }
    return true;
  };
}

std::function<bool(std::uint64_t)> uplink_system_level(const NetworkConfig& config,
                                                       const SimPlan& plan, double theta) {
  const auto up = config.with_link_biases(Link::uplink);
  up.validate();
  const double R = window_radius(up, plan);
  const double guard = association_guard_km(up);
  const double R_ap = std::min(R, 4.0 * guard);
  const auto weights = up.biases();
  const auto K = static_cast<std::size_t>(up.K);
  const std::uint32_t rrus = up.rru_count();
  const double alpha = up.alpha;
  const bool collab = plan.collaboration == Collaboration::collaborative;
  const bool single = plan.copies == UplinkCopies::single;
  const bool correlated = plan.fading == Fading::distance_correlated;
  const double L = plan.correlation_length_km;
  const std::uint64_t seed = plan.seed;

  return [=](std::uint64_t i) {
    RngStream geo(seed, i, kGeometry), fad(seed, i, kFading), rr(seed, i, kGates);
    Realization real;
    real.window = {R_ap};
    for (const auto& t : up.tiers) real.aps.push_back(sample_ppp(t.density, {R_ap}, geo));
    real.users = sample_ppp(up.user_density, {R}, geo);
    const ApIndex index(real, weights, alpha);
    const auto members = index.nearest({}, K);
    std::vector<Point> v(K);
    for (std::size_t k = 0; k < K; ++k) v[k] = index.position(members[k].ap);

    // Users sharing a member AP with the typical user, with the slot of that AP in their cell.
    const std::size_t N = real.users.size();
    std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> sharers(K);
    const double guard2 = guard * guard;
    for (std::uint32_t j = 0; j < N; ++j) {
      const Point u = real.users[j];
      bool near = false;
      for (std::size_t k = 0; k < K && !near; ++k) near = squared_distance(u, v[k]) <= guard2;
      if (!near) continue;
      const auto cell = index.nearest(u, K);
      const std::size_t slots = single ? 1 : K;
      for (std::uint32_t p = 0; p < slots; ++p) {
        for (std::size_t k = 0; k < K; ++k) {
          if (cell[p].ap == members[k].ap) sharers[k].emplace_back(j, p);
        }
      }
    }

    std::vector<std::uint32_t> own(K);
    for (auto& r : own) r = rr.uniform_index(rrus);
    std::vector<std::uint32_t> picks(N * K);
    for (auto& r : picks) r = rr.uniform_index(rrus);

    std::vector<bool> clear(K, true);
    for (std::size_t k = 0; k < K; ++k) {
      for (const auto& [j, p] : sharers[k]) {
        if (picks[j * K + p] == own[k]) clear[k] = false;
      }
    }

    // Interferer copy power relative to the typical user's per-copy power 1/K.
    const double copy_power = single ? static_cast<double>(K) : 1.0;
    std::vector<double> first_gain(N, -1.0);
    auto user_gain = [&](std::uint32_t j, std::size_t k) {
      if (!correlated) return fad.exponential();
      if (first_gain[j] < 0.0) first_gain[j] = fad.exponential();
      if (k == 0) return first_gain[j];
      const double d = std::sqrt(squared_distance(v[k], v[0])) / L;
      return correlated_gain(first_gain[j], fad.exponential(), d, alpha);
    };

    std::vector<double> h(K);
    for (std::size_t k = 0; k < K; ++k) {
      h[k] = fad.exponential();
      if (correlated && k > 0) {
        const double d = std::sqrt(squared_distance(v[k], v[0])) / L;
        h[k] = correlated_gain(h[0], h[k], d, alpha);
      }
    }

    double sir_sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      if (!clear[k]) continue;
      double interference = 0.0;
      for (std::uint32_t j = 0; j < N; ++j) {
        double copies = 0.0;
        if (single) {
          copies = picks[j * K] == own[k] ? 1.0 : 0.0;
        } else {
          for (std::size_t p = 0; p < K; ++p) copies += picks[j * K + p] == own[k] ? 1.0 : 0.0;
        }
        if (copies == 0.0) continue;
        interference += copies * copy_power * user_gain(j, k) *
                        power_law(squared_distance(real.users[j], v[k]), alpha);
      }
      const double signal = h[k] * power_law(squared_norm(v[k]), alpha);
      if (collab) {
        sir_sum += interference > 0.0 ? signal / interference
                                      : std::numeric_limits<double>::infinity();
      } else if (signal >= theta * interference) {
        return false;
      }
    }
    return !(collab && sir_sum >= theta);
  };
}

// ---- downlink ----------------------------------------------------------------

double downlink_power(const Tier& tier, double squared_distance, double alpha) {
  return tier.power_w * power_law(squared_distance, alpha);
}

bool score_downlink(const std::vector<double>& signal, double external, double theta,
                    bool collab) {
  double total = 0.0;
  for (double s : signal) total += s;
  if (collab) return total < theta * external;
  for (double s : signal) {
    if (s >= theta * (external + total - s)) return false;
  }
  return true;
}

std::vector<double> member_gains(const std::vector<Point>& v, RngStream& fad, bool correlated,
                                 double L, double alpha) {
  std::vector<double> h(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    h[k] = fad.exponential();
    if (correlated && k > 0) {
      const double d = std::sqrt(squared_distance(v[k], v[0])) / L;
      h[k] = correlated_gain(h[0], h[k], d, alpha);
    }
  }
  return h;
}

std::function<bool(std::uint64_t)> downlink_model_matched(const NetworkConfig& config,
                                                          const SimPlan& plan, double theta,
                                                          const ModelInputs& inputs) {
  const auto down = config.with_link_biases(Link::downlink);
  const auto g = tier_geometry(down);
  if (inputs.tier_void.size() != down.tiers.size()) {
    throw ConfigError("model-matched downlink needs one void probability per tier");
  }
  const auto K = static_cast<std::size_t>(down.K);
  const std::size_t count = std::max<std::size_t>(2000, 100 * K);
  const double alpha = down.alpha;
  const double delta = down.delta;
  const bool collab = plan.collaboration == Collaboration::collaborative;
  const bool correlated = plan.fading == Fading::distance_correlated;
  const double L = plan.correlation_length_km;
  const std::uint64_t seed = plan.seed;
  const auto tier_void = inputs.tier_void;

  return [=](std::uint64_t i) {
    RngStream geo(seed, i, kGeometry), fad(seed, i, kFading), gate(seed, i, kGates);
    const auto pts = sample_nearest_weighted(g, count, geo);
    std::vector<Point> v(K);
    for (std::size_t k = 0; k < K; ++k) v[k] = pts[k].position;
    const auto h = member_gains(v, fad, correlated, L, alpha);
    std::vector<double> signal(K);
    for (std::size_t k = 0; k < K; ++k) {
      const auto& t = down.tiers[pts[k].ap.tier];
      signal[k] = h[k] * downlink_power(t, squared_norm(pts[k].position), alpha);
    }
    double external = 0.0;
    for (std::size_t n = K; n < count; ++n) {
      const auto m = pts[n].ap.tier;
      const bool active = gate.bernoulli(1.0 - tier_void[m]);
      const bool same_rru = gate.bernoulli(delta);
      double gain = fad.exponential();
      if (correlated) {
        gain = correlated_gain(h[0], gain, std::sqrt(squared_distance(pts[n].position, v[0])) / L,
                               alpha);
      }
      if (active && same_rru) {
        external += gain * downlink_power(down.tiers[m], squared_norm(pts[n].position), alpha);
      }
    }
    return score_downlink(signal, external, theta, collab);
  };
}

std::function<bool(std::uint64_t)> downlink_system_level(const NetworkConfig& config,
                                                         const SimPlan& plan, double theta) {
  const auto down = config.with_link_biases(Link::downlink);
  down.validate();
  const double R = window_radius(down, plan);
  const auto weights = down.biases();
  const auto K = static_cast<std::size_t>(down.K);
  const double alpha = down.alpha;
  const double delta = down.delta;
  const bool collab = plan.collaboration == Collaboration::collaborative;
  const bool correlated = plan.fading == Fading::distance_correlated;
  const double L = plan.correlation_length_km;
  const std::uint64_t seed = plan.seed;

  return [=](std::uint64_t i) {
    RngStream geo(seed, i, kGeometry), fad(seed, i, kFading), gate(seed, i, kGates);
    const auto real = realize_network(down, {R}, geo);
    const ApIndex index(real, weights, alpha);
    const auto loads = tally_loads(real, build_virtual_cells(index, real.users, down.K));
    const auto members = index.nearest({}, K);
    std::vector<Point> v(K);
    for (std::size_t k = 0; k < K; ++k) v[k] = index.position(members[k].ap);
    const auto h = member_gains(v, fad, correlated, L, alpha);
    std::vector<double> signal(K);
    for (std::size_t k = 0; k < K; ++k) {
      signal[k] = h[k] * downlink_power(down.tiers[members[k].ap.tier], squared_norm(v[k]), alpha);
    }
    double external = 0.0;
    for (std::uint32_t m = 0; m < real.aps.size(); ++m) {
      for (std::uint32_t a = 0; a < real.aps[m].size(); ++a) {
        const ApRef ap{m, a};
        if (std::find_if(members.begin(), members.end(),
                         [&](const WeightedEntry& e) { return e.ap == ap; }) != members.end()) {
          continue;
        }
        const bool same_rru = gate.bernoulli(delta);
        double gain = fad.exponential();
        if (correlated) {
          gain = correlated_gain(h[0], gain,
                                 std::sqrt(squared_distance(real.aps[m][a], v[0])) / L, alpha);
        }
        if (same_rru && !loads.is_void(ap)) {
          external += gain * downlink_power(down.tiers[m], squared_norm(real.aps[m][a]), alpha);
        }
      }
    }
    return score_downlink(signal, external, theta, collab);
  };
}

// ---- shot processes ----------------------------------------------------------

// Integral of c / (c + v^(alpha/2)) over (a, inf) for c < a^(alpha/2) / 2, as a series.
double tail_series(double c, double a, double alpha) {
  const double x = c / std::pow(a, alpha / 2.0);
  double sum = 0.0, term = 1.0;
  for (int n = 1; n < 200; ++n) {
    term *= x;
    const double add = term / (n * alpha / 2.0 - 1.0);
    sum += (n % 2 == 1) ? add : -add;
    if (add < 1e-17 * std::abs(sum)) break;
  }
  return a * sum;
}

double geometric_slots(double p, RngStream& rng) {
  if (p >= 1.0) return 1.0;
  return 1.0 + std::floor(std::log(rng.uniform()) / std::log1p(-p));
}

}  // namespace

void SimPlan::validate() const {
  if (stop.target_events < 1) throw ConfigError("target event count must be >= 1");
  if (stop.max_trials < stop.target_events) {
    throw ConfigError("max trials must be >= target event count");
  }
  if (window_km < 0.0 || !std::isfinite(window_km)) throw ConfigError("window must be >= 0");
  if (!(correlation_length_km > 0.0)) throw ConfigError("correlation length must be positive");
}

ModelInputs model_inputs(const NetworkConfig& config, const ZetaTable& zeta,
                         LoadWeighting weighting) {
  ModelInputs in;
  in.rho_ul = uplink_noncollision_ap(config, zeta, weighting);
  in.p0 = uplink_void_prob(config, zeta);
  const auto down = config.with_link_biases(Link::downlink);
  for (std::size_t m = 0; m < down.tiers.size(); ++m) {
    in.tier_void.push_back(void_prob(m, down, zeta));
  }
  return in;
}

ReliabilityEstimate run_outage_trials(const std::function<bool(std::uint64_t)>& trial,
                                      const StopRule& stop, std::size_t workers, bool record) {
  workers = resolve_workers(workers);
  ReliabilityEstimate est;
  std::uint64_t next = 0;
  std::size_t wave = workers;
  bool done = false;
  while (!done && next < stop.max_trials) {
    const std::uint64_t remaining = stop.max_trials - next;
    const auto blocks =
        static_cast<std::size_t>(std::min<std::uint64_t>(wave, (remaining + kBlock - 1) / kBlock));
    std::vector<std::vector<std::uint8_t>> out;
    run_blocks(blocks, workers, out, [&](std::size_t b) {
      const std::uint64_t begin = next + b * kBlock;
      const std::uint64_t end = std::min(begin + kBlock, stop.max_trials);
      std::vector<std::uint8_t> flags(end - begin);
      for (std::uint64_t t = begin; t < end; ++t) flags[t - begin] = trial(t) ? 1 : 0;
      return flags;
    });
    for (const auto& flags : out) {
      for (auto f : flags) {
        ++est.trials;
        est.events += f;
        if (record && est.trial_outages.size() < kMaxRecorded) est.trial_outages.push_back(f);
        if (est.events == stop.target_events) {
          done = true;
          break;
        }
      }
      if (done) break;
    }
    next += static_cast<std::uint64_t>(blocks) * kBlock;
    wave = std::min(wave * 2, 64 * workers);
  }
  est.terminated_by = done ? Termination::events : Termination::trial_cap;
  est.outage = static_cast<double>(est.events) / static_cast<double>(est.trials);
  est.reliability = 1.0 - est.outage;
  est.std_error = std::sqrt(est.outage * (1.0 - est.outage) / static_cast<double>(est.trials));
  return est;
}

MeanEstimate run_mean_trials(std::size_t width,
                             const std::function<void(std::uint64_t, double*)>& trial,
                             std::uint64_t trials, std::size_t workers) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  workers = resolve_workers(workers);
  Moments total(width);
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  constexpr std::uint64_t kWave = 1024;
  for (std::uint64_t first = 0; first < blocks; first += kWave) {
    const auto count = static_cast<std::size_t>(std::min(kWave, blocks - first));
    std::vector<Moments> out;
    run_blocks(count, workers, out, [&](std::size_t b) {
      Moments m(width);
      std::vector<double> x(width);
      const std::uint64_t begin = (first + b) * kBlock;
      const std::uint64_t end = std::min(begin + kBlock, trials);
      for (std::uint64_t t = begin; t < end; ++t) {
        std::fill(x.begin(), x.end(), 0.0);
        trial(t, x.data());
        m.add(x.data());
      }
      return m;
    });
    for (const auto& m : out) total.merge(m);
  }
  MeanEstimate est;
  est.trials = total.n;
  est.mean = total.mean;
  est.std_error.resize(width, 0.0);
  if (total.n > 1) {
    const double n = static_cast<double>(total.n);
    for (std::size_t i = 0; i < width; ++i) est.std_error[i] = std::sqrt(total.m2[i] / (n - 1) / n);
  }
  return est;
}

ReliabilityEstimate estimate_uplink_reliability(const NetworkConfig& config, const SimPlan& plan,
                                                double theta, const ModelInputs& inputs) {
  plan.validate();
  config.validate();
  if (plan.link != Link::uplink) throw ConfigError("plan is not an uplink plan");
  if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
  const auto trial = plan.mode == SimMode::model_matched
                         ? uplink_model_matched(config, plan, theta, inputs)
                         : uplink_system_level(config, plan, theta);
  return run_outage_trials(trial, plan.stop, plan.workers, plan.record_trials);
}

ReliabilityEstimate estimate_downlink_reliability(const NetworkConfig& config,
                                                  const SimPlan& plan, double theta,
                                                  const ModelInputs& inputs) {
  plan.validate();
  config.validate();
  if (plan.link != Link::downlink) throw ConfigError("plan is not a downlink plan");
  if (!(theta >= 0.0)) throw DomainError("theta must be >= 0");
  const auto trial = plan.mode == SimMode::model_matched
                         ? downlink_model_matched(config, plan, theta, inputs)
                         : downlink_system_level(config, plan, theta);
  return run_outage_trials(trial, plan.stop, plan.workers, plan.record_trials);
}

double LoadHistogram::total() const {
  double t = 0.0;
  for (double c : counts) t += c;
  return t;
}

double LoadHistogram::mean() const {
  double s = 0.0;
  for (std::size_t n = 0; n < counts.size(); ++n) s += static_cast<double>(n) * counts[n];
  return s / total();
}

double LoadHistogram::variance() const {
  const double m = mean();
  double s = 0.0;
  for (std::size_t n = 0; n < counts.size(); ++n) {
    const double d = static_cast<double>(n) - m;
    s += d * d * counts[n];
  }
  return s / total();
}

void LoadHistogram::add(std::size_t n, double weight) {
  if (counts.size() <= n) counts.resize(n + 1, 0.0);
  counts[n] += weight;
}

LoadPmfEstimate estimate_load_pmf(const NetworkConfig& config, std::uint64_t realizations,
                                  std::uint64_t seed, double window_km, double inner_km,
                                  std::size_t workers) {
  config.validate();
  if (realizations < 1) throw ConfigError("realizations must be >= 1");
  if (!(inner_km > 0.0 && inner_km <= window_km)) {
    throw ConfigError("inner radius must lie in (0, window]");
  }
  const std::size_t tiers = config.tiers.size();
  const std::uint64_t blocks = (realizations + kBlock - 1) / kBlock;
  std::vector<std::vector<LoadHistogram>> out;
  run_blocks(static_cast<std::size_t>(blocks), resolve_workers(workers), out,
             [&](std::size_t b) {
               std::vector<LoadHistogram> h(tiers);
               const std::uint64_t begin = b * kBlock;
               const std::uint64_t end = std::min(begin + kBlock, realizations);
               for (std::uint64_t t = begin; t < end; ++t) {
                 RngStream geo(seed, t, kGeometry);
                 const auto real = realize_network(config, {window_km}, geo);
                 const auto loads = associate_all_users(real, config);
                 for (std::size_t m = 0; m < tiers; ++m) {
                   for (std::size_t a = 0; a < real.aps[m].size(); ++a) {
                     if (squared_norm(real.aps[m][a]) <= inner_km * inner_km) {
                       h[m].add(loads.load[m][a]);
                     }
                   }
                 }
               }
               return h;
             });
  LoadPmfEstimate est;
  est.tiers.resize(tiers);
  est.realizations = realizations;
  for (const auto& block : out) {
    for (std::size_t m = 0; m < tiers; ++m) {
      for (std::size_t n = 0; n < block[m].counts.size(); ++n) {
        est.tiers[m].add(n, block[m].counts[n]);
      }
    }
  }
  return est;
}

double tv_distance(const LoadHistogram& histogram,
                   const std::function<double(std::size_t)>& pmf) {
  const double total = histogram.total();
  if (!(total > 0.0)) throw DomainError("histogram is empty");
  double sum = 0.0, covered = 0.0;
  for (std::size_t n = 0; n < histogram.counts.size(); ++n) {
    const double p = pmf(n);
    covered += p;
    sum += std::abs(histogram.counts[n] / total - p);
  }
  // Analytic mass beyond the largest observed load.
  sum += std::max(0.0, 1.0 - covered);
  return 0.5 * sum;
}

NonCollisionEstimate estimate_noncollision(const NetworkConfig& config, std::uint64_t trials,
                                           std::uint64_t seed, double window_km, double inner_km,
                                           std::size_t workers) {
  const auto up = config.with_link_biases(Link::uplink);
  up.validate();
  if (!(inner_km > 0.0 && inner_km <= window_km)) {
    throw ConfigError("inner radius must lie in (0, window]");
  }
  const auto weights = up.biases();
  const double inner2 = inner_km * inner_km;
  // Per trial: summed AP shares, AP count, per-trial AP average, tagged-user member share.
  const auto m = run_mean_trials(
      4,
      [&](std::uint64_t t, double* x) {
        RngStream geo(seed, t, kGeometry), rr(seed, t, kGates);
        auto real = realize_network(up, {window_km}, geo);
        const std::size_t owner = real.users.size();
        real.users.push_back({});
        const ApIndex index(real, weights, up.alpha);
        const auto cells = build_virtual_cells(index, real.users, up.K);
        const auto assignment = select_rrus(real, cells, up, rr);
        double share = 0.0, aps = 0.0;
        for (std::size_t tier = 0; tier < real.aps.size(); ++tier) {
          for (std::size_t a = 0; a < real.aps[tier].size(); ++a) {
            if (squared_norm(real.aps[tier][a]) > inner2) continue;
            aps += 1.0;
            const auto& occ = assignment.occupancy[tier][a];
            double users = 0.0, clear = 0.0;
            for (const auto& o : occ) {
              if (o.user == owner) continue;
              users += 1.0;
              bool alone = true;
              for (const auto& other : occ) {
                if (other.user != owner && other.user != o.user && other.rru == o.rru) {
                  alone = false;
                  break;
                }
              }
              clear += alone ? 1.0 : 0.0;
            }
            if (users > 0.0) share += clear / users;
          }
        }
        const auto tagged = detect_collisions(assignment, cells[owner]);
        double member = 0.0;
        for (bool c : tagged) member += c ? 1.0 : 0.0;
        x[0] = share;
        x[1] = aps;
        x[2] = aps > 0.0 ? share / aps : 0.0;
        x[3] = member / static_cast<double>(tagged.size());
      },
      trials, workers);
  NonCollisionEstimate est;
  est.trials = m.trials;
  est.per_ap = m.mean[1] > 0.0 ? m.mean[0] / m.mean[1] : 0.0;
  est.per_ap_se = m.std_error[2];
  est.per_member = m.mean[3];
  est.per_member_se = m.std_error[3];
  return est;
}

double ppp_tail_log_laplace(double c, double a, double alpha) {
  if (!(alpha > 2.0)) throw DomainError("alpha must exceed 2");
  if (!(c >= 0.0) || !(a > 0.0)) throw DomainError("tail transform needs c >= 0 and a > 0");
  if (c == 0.0) return 0.0;
  if (alpha == 4.0) {
    const double r = std::sqrt(c);
    return -std::numbers::pi * r * std::atan(r / a);
  }
  const double knee = std::pow(2.0 * c, 2.0 / alpha);
  if (a >= knee) return -std::numbers::pi * tail_series(c, a, alpha);
  const double head =
      integrate([&](double v) { return c / (c + std::pow(v, alpha / 2.0)); }, a, knee);
  return -std::numbers::pi * (head + tail_series(c, knee, alpha));
}

ShotLaplaceEstimate estimate_shot_laplace(double lambda_tilde, double alpha,
                                          const std::vector<int>& K,
                                          const std::vector<double>& s_grid,
                                          const std::vector<double>& phi_grid,
                                          std::uint64_t trials, std::uint64_t seed,
                                          const ShotOptions& options) {
  if (!(lambda_tilde > 0.0)) throw InsufficientPoints("density must be positive");
  if (!(alpha > 2.0)) throw DomainError("alpha must exceed 2");
  if (K.empty()) throw DomainError("at least one K required");
  for (int k : K) {
    if (k < 1) throw DomainError("K must be >= 1");
  }
  for (double s : s_grid) {
    if (!(s >= 0.0)) throw DomainError("s must be >= 0");
  }
  for (double p : phi_grid) {
    if (!(p >= 0.0)) throw DomainError("phi must be >= 0");
  }
  if (!(options.tilt > 0.0 && options.tilt <= 1.0)) throw DomainError("tilt must lie in (0, 1]");
  const auto marks = options.marks;
  const auto kmax = static_cast<std::size_t>(*std::max_element(K.begin(), K.end()));
  const std::size_t points = kmax + std::max<std::size_t>(options.extra_points, 1);
  const std::size_t tilted = std::min(options.tilted_gaps, points);
  const std::size_t ns = s_grid.size(), np = phi_grid.size();
  const std::size_t per_k = 2 * ns + np;
  const double rate = std::numbers::pi * lambda_tilde;

  const auto m = run_mean_trials(
      K.size() * per_k,
      [&](std::uint64_t t, double* x) {
        RngStream geo(seed, t, kGeometry), fad(seed, t, kFading);
        std::vector<double> y(points), gain(points), shot(points);
        double key = 0.0, log_weight = 0.0;
        for (std::size_t n = 0; n < points; ++n) {
          if (n < tilted) {
            const double g = geo.exponential(rate * options.tilt);
            log_weight -= std::log(options.tilt) + (1.0 - options.tilt) * rate * g;
            key += g;
          } else {
            key += geo.exponential(rate);
          }
          y[n] = key;
          gain[n] = power_law(key, alpha);
          shot[n] = marks == ShotMarks::sampled ? fad.exponential() * gain[n] : 0.0;
        }
        // log E[exp(-c sum_{from <= n < to} H_n g_n)] given the distances.
        auto near = [&](double c, std::size_t from, std::size_t to) {
          double v = 0.0;
          if (marks == ShotMarks::sampled) {
            for (std::size_t n = from; n < to; ++n) v -= c * shot[n];
          } else {
            for (std::size_t n = from; n < to; ++n) v -= std::log1p(c * gain[n]);
          }
          return v;
        };
        // Beyond the last drawn point the PPP is unconstrained; in squared-distance
        // units it has density pi lambda_tilde, i.e. lambda_tilde in the unit-density form.
        const double last = y.back();
        auto far = [&](double c) { return lambda_tilde * ppp_tail_log_laplace(c, last, alpha); };
        for (std::size_t ki = 0; ki < K.size(); ++ki) {
          const auto k = static_cast<std::size_t>(K[ki]);
          double* row = x + ki * per_k;
          for (std::size_t j = 0; j < ns; ++j) {
            row[j] = std::exp(log_weight + near(s_grid[j], 0, k));
            row[ns + j] = std::exp(log_weight + near(s_grid[j], k, points) + far(s_grid[j]));
          }
          const double scale = std::pow(y[k - 1], alpha / 2.0);
          for (std::size_t j = 0; j < np; ++j) {
            const double c = phi_grid[j] * scale;
            row[2 * ns + j] = std::exp(log_weight + near(c, k, points) + far(c));
          }
        }
      },
      trials, options.workers);

  ShotLaplaceEstimate est;
  est.K = K;
  est.s = s_grid;
  est.phi = phi_grid;
  est.trials = m.trials;
  for (std::size_t ki = 0; ki < K.size(); ++ki) {
    const std::size_t o = ki * per_k;
    auto slice = [&](const std::vector<double>& v, std::size_t from, std::size_t n) {
      return std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(o + from),
                                 v.begin() + static_cast<std::ptrdiff_t>(o + from + n));
    };
    est.s_k.push_back(slice(m.mean, 0, ns));
    est.s_k_se.push_back(slice(m.std_error, 0, ns));
    est.s_minus_k.push_back(slice(m.mean, ns, ns));
    est.s_minus_k_se.push_back(slice(m.std_error, ns, ns));
    est.scaled.push_back(slice(m.mean, 2 * ns, np));
    est.scaled_se.push_back(slice(m.std_error, 2 * ns, np));
  }
  return est;
}

MeanEstimate estimate_shot_tail(double lambda_tilde, double alpha, int K,
                                const std::vector<double>& y_grid, std::uint64_t trials,
                                std::uint64_t seed, std::size_t workers) {
  if (!(lambda_tilde > 0.0)) throw InsufficientPoints("density must be positive");
  if (K < 1) throw DomainError("K must be >= 1");
  const double rate = std::numbers::pi * lambda_tilde;
  return run_mean_trials(
      y_grid.size(),
      [&](std::uint64_t t, double* x) {
        RngStream geo(seed, t, kGeometry), fad(seed, t, kFading);
        double key = 0.0, shot = 0.0;
        for (int k = 0; k < K; ++k) {
          key += geo.exponential(rate);
          shot += fad.exponential() * power_law(key, alpha);
        }
        for (std::size_t j = 0; j < y_grid.size(); ++j) x[j] = shot >= y_grid[j] ? 1.0 : 0.0;
      },
      trials, workers);
}

DelayEstimate estimate_delay(const DelayModel& delay, int K, Collaboration mode,
                             double budget_ms, std::uint64_t trials, std::uint64_t seed,
                             std::size_t workers) {
  delay.validate();
  if (K < 1) throw DomainError("K must be >= 1");
  if (!(budget_ms > 0.0)) throw DomainError("budget must be positive");
  if (delay.rho_ul_K <= 0.0 || delay.eta_ul_K <= 0.0 || delay.eta_dl_K <= 0.0 ||
      (mode == Collaboration::non_collaborative && delay.q <= 0.0)) {
    throw DegenerateReliability("success probabilities must be positive");
  }
  const bool collab = mode == Collaboration::collaborative;
  const auto m = run_mean_trials(
      2,
      [&](std::uint64_t t, double* x) {
        RngStream rng(seed, t, kGates);
        double total = delay.slot_ms * (geometric_slots(delay.rho_ul_K, rng) +
                                        geometric_slots(delay.eta_ul_K, rng) +
                                        geometric_slots(delay.eta_dl_K, rng));
        if (collab) {
          total += rng.exponential(delay.beta);
        } else {
          // Earliest backhaul among the APs that decoded, given at least one did.
          double first = std::numeric_limits<double>::infinity();
          while (!std::isfinite(first)) {
            for (int k = 0; k < K; ++k) {
              const bool ok = rng.bernoulli(delay.q);
              const double e = rng.exponential(delay.beta);
              if (ok) first = std::min(first, e);
            }
          }
          total += first;
        }
        double dl = collab ? 0.0 : std::numeric_limits<double>::infinity();
        for (int k = 0; k < K; ++k) {
          const double e = rng.exponential(delay.beta);
          dl = collab ? std::max(dl, e) : std::min(dl, e);
        }
        total += dl;
        x[0] = total;
        x[1] = total > budget_ms ? 1.0 : 0.0;
      },
      trials, workers);
  DelayEstimate est;
  est.mean_ms = m.mean[0];
  est.mean_se = m.std_error[0];
  est.outage = m.mean[1];
  est.outage_se = m.std_error[1];
  est.trials = m.trials;
  return est;
}

std::string to_string(SimMode m) {
  return m == SimMode::model_matched ? "model_matched" : "system_level";
}
std::string to_string(Fading f) {
  return f == Fading::independent ? "independent" : "distance_correlated";
}
std::string to_string(Collaboration c) {
  return c == Collaboration::collaborative ? "collaborative" : "non_collaborative";
}
std::string to_string(Link l) { return l == Link::uplink ? "uplink" : "downlink"; }
std::string to_string(Termination t) {
  return t == Termination::events ? "events" : "trial_cap";
}

}  // namespace urllc
