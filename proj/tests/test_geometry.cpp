#include "doctest.h"
#include "oracles.hpp"
#include "urllc/errors.hpp"
#include "urllc/geometry.hpp"
#include "urllc/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace urllc;

TEST_CASE("sample_ppp counts") {
  RngStream rng(1, 0);
  CHECK(sample_ppp(0.0, {2.0}, rng).empty());
  const int n = 10000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    RngStream r(2, i);
    const double c = static_cast<double>(sample_ppp(10.0, {2.0}, r).size());
    sum += c;
    sq += c * c;
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(10.0 * std::numbers::pi * 4.0).epsilon(0.01));
  CHECK((sq / n - mean * mean) / mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("points fall inside the window") {
  RngStream rng(3, 0);
  for (const auto& p : sample_ppp(50.0, {1.5}, rng)) CHECK(squared_norm(p) <= 1.5 * 1.5);
}

TEST_CASE("superposition of tiers has additive mean count") {
  NetworkConfig c;
  c.tiers = {{1, 3.0, 1}, {1, 7.0, 1}};
  double sum = 0;
  for (int i = 0; i < 4000; ++i) {
    RngStream r(4, i);
    sum += static_cast<double>(realize_network(c, {1.0}, r).ap_count());
  }
  CHECK(sum / 4000 == doctest::Approx(10.0 * std::numbers::pi).epsilon(0.02));
}

TEST_CASE("realize_network") {
  NetworkConfig empty;
  empty.tiers = {{20, 0.0, 1}, {5, 0.0, 1}};
  RngStream r0(1, 0);
  CHECK(realize_network(empty, {2.0}, r0).ap_count() == 0);

  const auto c = reference_config(250.0, 0.2);
  double sum = 0;
  for (int i = 0; i < 200; ++i) {
    RngStream r(5, i);
    sum += static_cast<double>(realize_network(c, {2.0}, r).ap_count());
  }
  CHECK(sum / 200 == doctest::Approx(251.0 * std::numbers::pi * 4.0).epsilon(0.01));

  RngStream a(6, 1), b(6, 1);
  const auto ra = realize_network(c, {0.5}, a);
  const auto rb = realize_network(c, {0.5}, b);
  REQUIRE(ra.users.size() == rb.users.size());
  for (std::size_t i = 0; i < ra.users.size(); ++i) {
    CHECK(ra.users[i].x == rb.users[i].x);
    CHECK(ra.users[i].y == rb.users[i].y);
  }
}

TEST_CASE("weighted transform ordering") {
  Realization one;
  one.window = {5.0};
  one.aps = {{{1.0, 0.0}}};
  const std::vector<double> w1{1.0};
  auto l = weighted_distance_transform(one, w1, 4.0);
  REQUIRE(l.size() == 1);
  CHECK(l[0].key == doctest::Approx(1.0));

  Realization two;
  two.window = {5.0};
  two.aps = {{{2.0, 0.0}}, {{0.0, 3.0}}};
  const std::vector<double> w{1.0, 16.0};
  l = weighted_distance_transform(two, w, 4.0);
  CHECK(l[0].ap.tier == 1);
  CHECK(l[0].key == doctest::Approx(2.25));
  CHECK(l[1].ap.tier == 0);

  const std::vector<double> scaled{3.0, 48.0};
  const auto l2 = weighted_distance_transform(two, scaled, 4.0);
  CHECK(l2[0].ap == l[0].ap);
  CHECK(l2[1].ap == l[1].ap);
}

TEST_CASE("grid index agrees with full sort") {
  NetworkConfig c = reference_config(40.0, 1.0, 6, Link::downlink);
  for (int t = 0; t < 30; ++t) {
    RngStream r(7, t);
    const auto real = realize_network(c, {1.0}, r);
    const auto w = c.biases();
    const ApIndex index(real, w, c.alpha);
    for (int q = 0; q < 20; ++q) {
      const double rho = 0.99 * std::sqrt(r.uniform());
      const double phi = 6.283185307179586 * r.uniform();
      const Point p{rho * std::cos(phi), rho * std::sin(phi)};
      const auto full = weighted_distance_transform(real, w, c.alpha, p);
      const auto fast = index.nearest(p, 6);
      for (int k = 0; k < 6; ++k) {
        CHECK(fast[k].ap == full[k].ap);
        CHECK(fast[k].key == full[k].key);
      }
    }
  }
  Realization tiny;
  tiny.window = {1.0};
  tiny.aps = {{{0.1, 0.1}}};
  const std::vector<double> w{1.0};
  const ApIndex idx(tiny, w, 4.0);
  CHECK_THROWS_AS(idx.nearest({0, 0}, 2), InsufficientPoints);
}

TEST_CASE("k-th weighted distance is Gamma(k, pi lambda_tilde)") {
  NetworkConfig c = reference_config(10.0, 1.0, 3, Link::downlink);
  const auto g = tier_geometry(c);
  const auto w = c.biases();
  std::vector<std::vector<double>> keys(3);
  for (int t = 0; t < 10000; ++t) {
    RngStream r(8, t);
    const auto real = realize_network(c, {2.5}, r);
    const ApIndex idx(real, w, c.alpha);
    const auto l = idx.nearest({0, 0}, 3);
    for (int k = 0; k < 3; ++k) keys[k].push_back(l[k].key);
  }
  const double rate = std::numbers::pi * g.lambda_tilde;
  for (int k = 0; k < 3; ++k) {
    const double d = oracle::ks_distance(keys[k], [&](double y) { return oracle::gamma_cdf_int(k + 1, rate, y); });
    CHECK(d < 0.02);
  }
}

TEST_CASE("radial sampler matches the distance law") {
  const auto c = reference_config(10.0, 1.0, 3, Link::downlink);
  const auto g = tier_geometry(c);
  std::vector<double> first;
  int tier1 = 0;
  for (int t = 0; t < 20000; ++t) {
    RngStream r(9, t);
    const auto pts = sample_nearest_weighted(g, 3, r);
    first.push_back(pts[0].key);
    tier1 += pts[0].ap.tier == 0;
    CHECK(pts[0].key <= pts[1].key);
    const double f = g.distance_factor[pts[1].ap.tier];
    CHECK(f * squared_norm(pts[1].position) == doctest::Approx(pts[1].key).epsilon(1e-9));
  }
  const double rate = std::numbers::pi * g.lambda_tilde;
  CHECK(oracle::ks_distance(first, [&](double y) { return 1 - std::exp(-rate * y); }) < 0.015);
  CHECK(tier1 / 20000.0 == doctest::Approx(g.theta_m[0]).epsilon(0.05));
}

TEST_CASE("default window holds enough APs") {
  const auto c = reference_config(250.0, 0.5, 4);
  const double r = default_window(c).radius_km;
  CHECK(std::numbers::pi * r * r * 251.0 == doctest::Approx(5000.0));
}
