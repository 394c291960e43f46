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
#include <iosfwd>

#include "urllc/analysis.hpp"
#include "urllc/config.hpp"
#include "urllc/montecarlo.hpp"

namespace urllc {

struct FitResult {
  double zeta = 0.0;
  double log_likelihood = 0.0;
  double tv_distance = 0.0;
  int iterations = 0;
};

struct FitOptions {
  double lower = 0.1;
  double upper = 100.0;
  double seed = 3.5;
  double min_samples = 1000.0;
  double log_tolerance = 1e-7;  // bracket width in log(zeta)
};

// Maximum-likelihood shape of the Gamma-Poisson load PMF with the given mean.
// Throws FitFailure for degenerate or undersized histograms and non-unimodal likelihoods.
FitResult fit_zeta(const LoadHistogram& histogram, double mean, const FitOptions& options = {});
FitResult fit_zeta(const LoadHistogram& histogram, std::size_t tier, const NetworkConfig& config,
                   const FitOptions& options = {});

double load_log_likelihood(const LoadHistogram& histogram, double mean, double zeta);

// Variance matching: var = mean + mean^2 / zeta.
double moment_zeta(const LoadHistogram& histogram, double mean);

// CSV columns: tier,K,mu_over_lambda_tilde,zeta,samples,tv_distance (tier is 1-based).
void write_zeta_csv(std::ostream& out, const ZetaTable& table);
ZetaTable read_zeta_csv(std::istream& in, double seed = 3.5);

}  // namespace urllc
