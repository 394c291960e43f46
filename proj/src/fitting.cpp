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

#include "urllc/fitting.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "urllc/errors.hpp"

namespace urllc {

double load_log_likelihood(const LoadHistogram& histogram, double mean, double zeta) {
  double ll = 0.0;
  for (std::size_t n = 0; n < histogram.counts.size(); ++n) {
    const double c = histogram.counts[n];
    if (c == 0.0) continue;
    const double dn = static_cast<double>(n);
    const double a = mean / zeta;
    // log nb_pmf, written out to stay finite far in the tail.
    ll += c * (std::lgamma(dn + zeta) - std::lgamma(dn + 1.0) - std::lgamma(zeta) +
               dn * std::log(a / (1.0 + a)) - zeta * std::log1p(a));
  }
  return ll;
}

FitResult fit_zeta(const LoadHistogram& histogram, double mean, const FitOptions& options) {
  if (!(options.lower > 0.0 && options.upper > options.lower)) {
    throw FitFailure("invalid zeta bracket");
  }
  const double total = histogram.total();
  if (total < options.min_samples) {
    throw FitFailure("histogram holds " + std::to_string(total) + " samples, need " +
                     std::to_string(options.min_samples));
  }
  std::size_t support = 0;
  for (double c : histogram.counts) support += c > 0.0 ? 1 : 0;
  if (support < 2 || !(mean > 0.0)) throw FitFailure("degenerate histogram");

  auto ll = [&](double log_zeta) {
    return load_log_likelihood(histogram, mean, std::exp(log_zeta)) / total;
  };

  // Coarse scan to locate the mode and check unimodality.
  const double lo = std::log(options.lower), hi = std::log(options.upper);
  constexpr int kGrid = 64;
  std::vector<double> grid(kGrid + 1), value(kGrid + 1);
  std::size_t best = 0;
  for (int i = 0; i <= kGrid; ++i) {
    grid[i] = lo + (hi - lo) * i / kGrid;
    value[i] = ll(grid[i]);
    if (value[i] > value[best]) best = static_cast<std::size_t>(i);
  }
  constexpr double kSlack = 1e-9;
  for (std::size_t i = 1; i <= best; ++i) {
    if (value[i] < value[i - 1] - kSlack) throw FitFailure("likelihood is not unimodal");
  }
  for (std::size_t i = best + 1; i < grid.size(); ++i) {
    if (value[i] > value[i - 1] + kSlack) throw FitFailure("likelihood is not unimodal");
  }

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min(best + 1, grid.size() - 1)];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = ll(c), fd = ll(d);
  int iterations = 0;
  while (b - a > options.log_tolerance && iterations < 500) {
    ++iterations;
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = ll(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = ll(d);
    }
  }
  double log_zeta = 0.5 * (a + b);
  // Never return a point worse than the seed.
  const double seed_log = std::log(options.seed);
  if (seed_log >= lo && seed_log <= hi && ll(seed_log) > ll(log_zeta)) log_zeta = seed_log;

  FitResult r;
  r.zeta = std::exp(log_zeta);
  r.log_likelihood = ll(log_zeta) * total;
  r.tv_distance = tv_distance(histogram, [&](std::size_t n) { return nb_pmf(n, mean, r.zeta); });
  r.iterations = iterations;
  return r;
}

FitResult fit_zeta(const LoadHistogram& histogram, std::size_t tier, const NetworkConfig& config,
                   const FitOptions& options) {
  return fit_zeta(histogram, load_mean(tier, config), options);
}

double moment_zeta(const LoadHistogram& histogram, double mean) {
  const double total = histogram.total();
  if (!(total > 1.0)) throw FitFailure("histogram too small");
  double ss = 0.0;
  for (std::size_t n = 0; n < histogram.counts.size(); ++n) {
    const double d = static_cast<double>(n) - mean;
    ss += d * d * histogram.counts[n];
  }
  const double excess = ss / total - mean;
  if (!(excess > 0.0)) throw FitFailure("histogram is not overdispersed");
  return mean * mean / excess;
}

void write_zeta_csv(std::ostream& out, const ZetaTable& table) {
  out << "tier,K,mu_over_lambda_tilde,zeta,samples,tv_distance\n";
  char buf[256];
  for (const auto& e : table.entries()) {
    std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%.17g,%llu,%.9g\n", e.tier + 1, e.K,
                  e.mu_over_lambda_tilde, e.zeta, static_cast<unsigned long long>(e.samples),
                  e.tv_distance);
    out << buf;
  }
}

ZetaTable read_zeta_csv(std::istream& in, double seed) {
  std::string line;
  if (!std::getline(in, line) || line != "tier,K,mu_over_lambda_tilde,zeta,samples,tv_distance") {
    throw SchemaMismatch("unexpected zeta table header");
  }
  ZetaTable table(seed);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<std::string> f;
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 6) throw SchemaMismatch("zeta table row " + std::to_string(row) + " malformed");
    try {
      ZetaEntry e;
      const long tier = std::stol(f[0]);
      if (tier < 1) throw SchemaMismatch("tier must be >= 1");
      e.tier = static_cast<std::size_t>(tier - 1);
      e.K = std::stoi(f[1]);
      e.mu_over_lambda_tilde = std::stod(f[2]);
      e.zeta = std::stod(f[3]);
      e.samples = std::stoull(f[4]);
      e.tv_distance = std::stod(f[5]);
      if (!(e.zeta > 0.0)) throw SchemaMismatch("zeta must be positive");
      table.insert(e);
    } catch (const std::logic_error&) {
      throw SchemaMismatch("zeta table row " + std::to_string(row) + " is not numeric");
    }
  }
  return table;
}

}  // namespace urllc
