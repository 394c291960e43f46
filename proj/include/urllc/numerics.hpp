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
#include <functional>

namespace urllc {

class RngStream;

struct QuadratureSpec {
  double relative_tolerance = 1e-10;
  double absolute_tolerance = 1e-14;
  std::size_t max_subdivisions = 1u << 15;
  // |partial result| above this is reported as divergence.
  double divergence_ceiling = 1e100;

  void validate() const;
};

double sinc(double x);

// l(y, z) = y^z / sinc(z) - int_0^1 y / (y + t^(1/z)) dt, for y >= 0 and 0 < z < 1.
double ell(double y, double z, const QuadratureSpec& spec = {});

// Gaussian tail probability Q(x) = P[N(0,1) > x].
double q_function(double x);
double inverse_q(double eps);

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

// int_0^inf f(x) dx through x = t / (1 - t).
double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec = {});

double sample_gamma(double shape, double rate, RngStream& rng);

}  // namespace urllc
