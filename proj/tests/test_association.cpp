#include "doctest.h"
#include "urllc/association.hpp"
#include "urllc/errors.hpp"
#include "urllc/rng.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace urllc;

namespace {

NetworkConfig two_tier(double w1, double w2, int K) {
  NetworkConfig c;
  c.tiers = {{20, 1, w1}, {5, 1, w2}};
  c.K = K;
  return c;
}

}  // namespace

TEST_CASE("build_virtual_cell basics") {
  Realization r;
  r.window = {10.0};
  r.aps = {{{1.0, 0.0}}, {}};
  auto c = two_tier(1, 1, 1);
  auto cell = build_virtual_cell(r, {0, 0}, c);
  REQUIRE(cell.members.size() == 1);
  CHECK(cell.members[0].ap == ApRef{0, 0});

  r.aps = {{{3.0, 0.0}, {1.0, 0.0}}, {{0.0, 2.0}}};
  c.K = 2;
  cell = build_virtual_cell(r, {0, 0}, c);
  CHECK(cell.members[0].ap == ApRef{0, 1});
  CHECK(cell.members[1].ap == ApRef{1, 0});
  CHECK(cell.members[1].distance_km == doctest::Approx(2.0));

  c.K = 4;
  CHECK_THROWS_AS(build_virtual_cell(r, {0, 0}, c), InsufficientPoints);
}

TEST_CASE("strongest AP ranking uses w = P") {
  Realization r;
  r.window = {10.0};
  r.aps = {{{2.0, 0.0}}, {{1.1, 0.0}}};
  const auto c = two_tier(20, 5, 1);
  const auto cell = build_virtual_cell(r, {0, 0}, c);
  CHECK(cell.members[0].ap.tier == 1);
  CHECK(20 * std::pow(2.0, -4) < 5 * std::pow(1.1, -4));
}

TEST_CASE("virtual cell members are ordered and distinct") {
  const auto c = reference_config(50.0, 1.0, 5, Link::downlink);
  RngStream rng(1, 0);
  const auto real = realize_network(c, {1.0}, rng);
  const auto cell = build_virtual_cell(real, {0.1, -0.2}, c);
  for (std::size_t k = 1; k < cell.members.size(); ++k) {
    const auto& a = cell.members[k - 1];
    const auto& b = cell.members[k];
    CHECK(!(a.ap == b.ap));
    const double pa = c.tiers[a.ap.tier].bias * std::pow(a.distance_km, -c.alpha);
    const double pb = c.tiers[b.ap.tier].bias * std::pow(b.distance_km, -c.alpha);
    CHECK(pa >= pb);
  }
}

TEST_CASE("loads") {
  auto c = reference_config(50.0, 1.0, 3);
  RngStream rng(2, 0);
  auto real = realize_network(c, {1.0}, rng);
  const auto loads = associate_all_users(real, c);
  CHECK(loads.total() == 3 * real.users.size());
  for (std::size_t m = 0; m < loads.load.size(); ++m) {
    for (std::uint32_t i = 0; i < loads.load[m].size(); ++i) {
      CHECK(loads.is_void({static_cast<std::uint32_t>(m), i}) == (loads.load[m][i] == 0));
    }
  }
  // Raising K never lowers an AP's load on the same realization.
  const auto more = associate_all_users(real, c.with_K(4));
  for (std::size_t m = 0; m < loads.load.size(); ++m) {
    for (std::size_t i = 0; i < loads.load[m].size(); ++i) CHECK(more.load[m][i] >= loads.load[m][i]);
  }
  real.users.clear();
  const auto none = associate_all_users(real, c);
  CHECK(none.total() == 0);
}

TEST_CASE("mean tier load equals K mu / lambda_tilde_m") {
  auto c = reference_config(25.0, 2.0, 2, Link::downlink);
  const auto g = tier_geometry(c);
  const double inner = 1.2;
  std::vector<double> sum(2, 0.0), count(2, 0.0);
  for (int t = 0; t < 300; ++t) {
    RngStream r(3, t);
    const auto real = realize_network(c, {2.0}, r);
    const auto loads = associate_all_users(real, c);
    for (std::size_t m = 0; m < 2; ++m) {
      for (std::size_t i = 0; i < real.aps[m].size(); ++i) {
        if (squared_norm(real.aps[m][i]) > inner * inner) continue;
        sum[m] += loads.load[m][i];
        count[m] += 1;
      }
    }
  }
  for (std::size_t m = 0; m < 2; ++m) {
    CHECK(sum[m] / count[m] == doctest::Approx(c.K * c.user_density / g.lambda_tilde_m[m]).epsilon(0.05));
  }
}

TEST_CASE("rru selection and collisions") {
  Realization r;
  r.window = {5.0};
  r.aps = {{{0.0, 0.0}}};
  NetworkConfig c;
  c.tiers = {{1, 1, 1}};
  c.delta = 1.0;
  c.K = 1;
  std::vector<VirtualCell> cells(2);
  cells[0] = {0, {{{0, 0}, 1.0, 1.0}}};
  cells[1] = {1, {{{0, 0}, 1.0, 1.0}}};
  RngStream rng(4, 0);
  auto a = select_rrus(r, cells, c, rng);
  CHECK(a.picks[0][0] == 0);
  CHECK(detect_collisions(a, cells[0])[0] == false);
  CHECK(detect_collisions(a, cells[1])[0] == false);

  std::vector<VirtualCell> alone(cells.begin(), cells.begin() + 1);
  a = select_rrus(r, alone, c, rng);
  CHECK(detect_collisions(a, alone[0])[0] == true);
}

TEST_CASE("rru picks are uniform (chi-square, 1%)") {
  Realization r;
  r.window = {5.0};
  r.aps = {{{0.0, 0.0}}};
  NetworkConfig c;
  c.tiers = {{1, 1, 1}};
  c.delta = 0.05;
  c.K = 1;
  std::vector<VirtualCell> cells(1000000, VirtualCell{0, {{{0, 0}, 1.0, 1.0}}});
  RngStream rng(5, 0);
  const auto a = select_rrus(r, cells, c, rng);
  std::vector<double> counts(20, 0.0);
  for (const auto& p : a.picks) counts[p[0]] += 1;
  double chi2 = 0;
  for (double n : counts) chi2 += (n - 50000.0) * (n - 50000.0) / 50000.0;
  CHECK(chi2 < 36.19);  // chi-square(19) 99th percentile
}

TEST_CASE("delta must map to an integer RRU count") {
  auto c = reference_config();
  c.delta = 0.3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.delta = 0.05;
  CHECK_NOTHROW(c.validate());
  CHECK(c.rru_count() == 20);
}
