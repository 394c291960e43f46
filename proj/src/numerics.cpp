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

#include "urllc/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "urllc/errors.hpp"
#include "urllc/rng.hpp"

namespace urllc {

void QuadratureSpec::validate() const {
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0)) {
    throw DomainError("quadrature tolerances must be positive");
  }
  if (max_subdivisions < 1) throw DomainError("max_subdivisions must be at least 1");
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  spec.validate();
  if (a == b) return 0.0;
  const auto depth =
      static_cast<unsigned>(std::ceil(std::log2(static_cast<double>(spec.max_subdivisions))));
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, depth, spec.relative_tolerance, &error, &l1);
  if (!std::isfinite(value) || std::abs(value) > spec.divergence_ceiling) {
    throw DivergenceError("integral diverged (result " + std::to_string(value) + ")");
  }
  if (error > std::max(spec.absolute_tolerance, spec.relative_tolerance * l1)) {
    throw QuadratureError("quadrature did not converge: error estimate " +
                          std::to_string(error) + " for result " + std::to_string(value));
  }
  return value;
}

double integrate_semi_infinite(const std::function<double(double)>& f,
                               const QuadratureSpec& spec) {
  auto mapped = [&f](double t) {
    const double u = 1.0 - t;
    const double x = t / u;
    if (!std::isfinite(x)) return 0.0;
    return f(x) / (u * u);
  };
  return integrate(mapped, 0.0, 1.0, spec);
}

double ell(double y, double z, const QuadratureSpec& spec) {
  if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("ell: y must be finite and >= 0");
  if (!(z > 0.0 && z < 1.0)) throw DomainError("ell: z must lie in (0, 1)");
  if (y == 0.0) return 0.0;
  if (y > 1e8) {
    // int_0^1 y / (y + t^(1/z)) dt = 1 - 1 / (y (1 + 1/z)) + O(y^-2).
    return std::pow(y, z) / sinc(z) - 1.0 + 1.0 / (y * (1.0 + 1.0 / z));
  }
  // With t = u^(-z) and u = v^(-1/(1-z)) the definition becomes
  // z/(1-z) * int_0^1 y / (1 + y v^(1/(1-z))) dv, smooth for every z and free of
  // the cancellation between the two printed terms.
  const double q = z / (1.0 - z);
  const double p = 1.0 / (1.0 - z);
  auto g = [y, p](double v) { return y / (1.0 + y * std::pow(v, p)); };
  if (y <= 1.0) return q * integrate(g, 0.0, 1.0, spec);
  // Split at the knee v = y^(-(1-z)) so each piece is well resolved.
  const double knee = std::pow(y, -(1.0 - z));
  return q * (integrate(g, 0.0, knee, spec) + integrate(g, knee, 1.0, spec));
}

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double inverse_q(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("inverse_q: eps must lie in (0, 1)");
  double x = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * eps);
  const double density = std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
  if (density > 0.0) x += (q_function(x) - eps) / density;
  return x;
}

double sample_gamma(double shape, double rate, RngStream& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw DomainError("sample_gamma: shape and rate must be > 0");
  boost::random::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(rng);
}

}  // namespace urllc
