// Independent reference computations used only by the tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

inline double q_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// Plain bisection on Q(x) = eps.
inline double q_inverse_bisect(double eps) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 300; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (q_tail(mid) > eps) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Gamma(k, rate) CDF for integer k: 1 - e^{-x} sum_{j<k} x^j / j!.
inline double gamma_cdf_int(int k, double rate, double y) {
  const double x = rate * y;
  double term = 1.0, sum = 0.0;
  for (int j = 0; j < k; ++j) {
    sum += term;
    term *= x / (j + 1);
  }
  return 1.0 - std::exp(-x) * sum;
}

template <class Cdf>
double ks_distance(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return d;
}

// Asymptotic 1% critical value of the one-sample KS statistic.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

// ell at z = 1/2 reduces to sqrt(y) * atan(sqrt(y)).
inline double ell_half(double y) { return std::sqrt(y) * std::atan(std::sqrt(y)); }

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace oracle
