#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"

#include "flockspc/errors.hpp"
#include "flockspc/flock_model.hpp"

using namespace flockspc;

namespace {

CostParams two_drone_params() {
  CostParams p;
  p.w_coh = 20;
  p.w_sep = 9;
  p.w_tar = 0;
  p.w_obs = 0;
  p.r_drone = 0;
  return p;
}

void check_vec(const Vec3& a, const Vec3& b, double eps) {
  CHECK(a.x == doctest::Approx(b.x).epsilon(eps));
  CHECK(a.y == doctest::Approx(b.y).epsilon(eps));
  CHECK(a.z == doctest::Approx(b.z).epsilon(eps));
}

Vec3 rotate_z(const Vec3& v, double a) {
  return {std::cos(a) * v.x - std::sin(a) * v.y, std::sin(a) * v.x + std::cos(a) * v.y, v.z};
}

}  // namespace

TEST_CASE("cost of two drones one metre apart") {
  const std::vector<Vec3> nb{{0, 0, 1}};
  auto p = two_drone_params();
  auto c = evaluate_cost({1, 0, 1}, nb, p);
  CHECK(c.coh == doctest::Approx(20));
  CHECK(c.sep == doctest::Approx(9));
  CHECK(c.tar == 0.0);
  CHECK(c.obs == 0.0);
  CHECK(c.total == doctest::Approx(29));

  p.w_tar = 150;
  p.target = Vec3{0, 0, 1};
  c = evaluate_cost({1, 0, 1}, nb, p);
  CHECK(c.tar == doctest::Approx(37.5));
  CHECK(c.total == doctest::Approx(66.5));
}

TEST_CASE("coincident neighbour gives a finite clamped separation") {
  const std::vector<Vec3> nb{{1, 2, 3}};
  const auto p = two_drone_params();
  const auto c = evaluate_cost({1, 2, 3}, nb, p);
  CHECK(std::isfinite(c.sep));
  CHECK(c.sep == doctest::Approx(9.0 / (p.zero_hat * p.zero_hat)));

  const auto g = evaluate_gradient({1, 2, 3}, nb, p);
  CHECK(is_finite(g.total));
  CHECK(g.sep.x < 0.0);  // repels along +x
  CHECK(g.sep.y == 0.0);
  CHECK(g.sep.z == 0.0);
}

TEST_CASE("gradient closed forms on the two-drone example") {
  const std::vector<Vec3> nb{{0, 0, 1}};
  auto p = two_drone_params();
  auto g = evaluate_gradient({1, 0, 1}, nb, p);
  check_vec(g.coh, {40, 0, 0}, 1e-12);
  check_vec(g.sep, {-18, 0, 0}, 1e-12);
  check_vec(g.total, {22, 0, 0}, 1e-12);
  check_vec(finite_difference_gradient({1, 0, 1}, nb, p, 1e-6), {22, 0, 0}, 1e-5);

  p.w_tar = 150;
  p.target = Vec3{0, 0, 1};
  g = evaluate_gradient({1, 0, 1}, nb, p);
  check_vec(g.tar, {75, 0, 0}, 1e-12);
  check_vec(g.total, {97, 0, 0}, 1e-12);
}

TEST_CASE("lone agent without target or obstacles has zero gradient") {
  CostParams p;
  const auto g = evaluate_gradient({3, 4, 5}, {}, p);
  CHECK(g.total == Vec3{});
  const auto fd = finite_difference_gradient({3, 4, 5}, {}, p, 1e-6);
  CHECK(norm(fd) < 1e-6);
  CHECK(evaluate_cost({3, 4, 5}, {}, p).total == 0.0);
}

TEST_CASE("lone agent still seeks the target") {
  CostParams p;
  p.target = Vec3{1, 0, 0};
  const auto g = evaluate_gradient({0, 0, 0}, {}, p);
  check_vec(g.tar, {-2 * p.w_tar, 0, 0}, 1e-12);
}

TEST_CASE("zero weights contribute exactly zero") {
  CostParams p;
  p.w_coh = p.w_sep = p.w_tar = p.w_obs = 0;
  p.target = Vec3{9, 9, 9};
  p.obstacles = {{{0.1, 0}, 0.15}};
  const std::vector<Vec3> nb{{0.01, 0, 0}};
  const auto c = evaluate_cost({0, 0, 0}, nb, p);
  CHECK(c.total == 0.0);
  CHECK(evaluate_gradient({0, 0, 0}, nb, p).total == Vec3{});
}

TEST_CASE("obstacle term is planar") {
  CostParams p;
  p.obstacles = {{{1, 1}, 0.15}};
  const auto g = evaluate_gradient({0, 0, 7}, {}, p);
  CHECK(g.obs.z == 0.0);
  const auto c1 = evaluate_cost({0, 0, 7}, {}, p);
  const auto c2 = evaluate_cost({0, 0, -3}, {}, p);
  CHECK(c1.obs == c2.obs);
}

TEST_CASE("non-finite input is rejected") {
  CostParams p;
  const std::vector<Vec3> nb{{0, 0, NAN}};
  CHECK_THROWS_AS(evaluate_cost({0, 0, 0}, nb, p), InvalidInput);
  CHECK_THROWS_AS(evaluate_gradient({INFINITY, 0, 0}, {}, p), InvalidInput);
}

TEST_CASE("parameter validation") {
  CostParams p;
  p.w_sep = -1;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  p.zero_hat = 0;
  CHECK_THROWS_AS(p.validate(), InvalidInput);
  p = {};
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("cost matches the scalar oracle on random configurations") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 500; ++t) {
    const auto c = oracle::random_config(rng, 30, 11, 0.05);
    const double expected = oracle::cost(c.self, c.neighbors, c.params);
    const auto got = evaluate_cost(c.self, c.neighbors, c.params);
    REQUIRE(got.total == doctest::Approx(expected).epsilon(1e-12));
    CHECK(got.total == doctest::Approx(got.coh + got.sep + got.tar + got.obs).epsilon(1e-14));
    CHECK(got.coh >= 0.0);
    CHECK(got.sep >= 0.0);
    CHECK(got.tar >= 0.0);
    CHECK(got.obs >= 0.0);
  }
}

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 300; ++t) {
    const auto c = oracle::random_config(rng, 30, 11);
    const Vec3 g = evaluate_gradient(c.self, c.neighbors, c.params).total;
    const Vec3 fd = finite_difference_gradient(c.self, c.neighbors, c.params, 1e-6);
    REQUIRE(norm(g - fd) / std::max(norm(g), 1.0) < 1e-4);
  }
}

TEST_CASE("gradient breakdown sums to the total") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto c = oracle::random_config(rng, 10, 5);
    const auto g = evaluate_gradient(c.self, c.neighbors, c.params);
    CHECK(norm(g.total - (g.coh + g.sep + g.tar + g.obs)) <= 1e-9 * std::max(1.0, norm(g.total)));
  }
}

TEST_CASE("translation invariance") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 100; ++t) {
    auto c = oracle::random_config(rng, 12, 6);
    const Vec3 shift = oracle::uniform_point(rng, -3, 3);
    const auto before = evaluate_cost(c.self, c.neighbors, c.params);
    c.self += shift;
    for (auto& q : c.neighbors) q += shift;
    for (auto& o : c.params.obstacles) o.center = o.center + shift.xy();
    *c.params.target += shift;
    const auto after = evaluate_cost(c.self, c.neighbors, c.params);
    CHECK(after.total == doctest::Approx(before.total).epsilon(1e-9));
  }
}

TEST_CASE("rotation about z rotates the gradient") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> angle(0, 6.283);
  for (int t = 0; t < 100; ++t) {
    auto c = oracle::random_config(rng, 12, 6);
    const double a = angle(rng);
    const Vec3 g = evaluate_gradient(c.self, c.neighbors, c.params).total;
    c.self = rotate_z(c.self, a);
    for (auto& q : c.neighbors) q = rotate_z(q, a);
    for (auto& o : c.params.obstacles) {
      const Vec3 r = rotate_z({o.center.x, o.center.y, 0}, a);
      o.center = {r.x, r.y};
    }
    *c.params.target = rotate_z(*c.params.target, a);
    const Vec3 g_rot = evaluate_gradient(c.self, c.neighbors, c.params).total;
    CHECK(norm(g_rot - rotate_z(g, a)) <= 1e-9 * std::max(1.0, norm(g)));
  }
}

TEST_CASE("separation and obstacle terms decrease with distance") {
  CostParams p;
  p.w_coh = 0;
  p.w_tar = 0;
  p.obstacles = {{{0, 0}, 0.15}};
  double prev_sep = INFINITY;
  double prev_obs = INFINITY;
  for (double d = 0.2; d < 3.0; d += 0.05) {
    const std::vector<Vec3> nb{{0, 0, 0}};
    const auto c = evaluate_cost({d + 0.3, 0, 0}, nb, p);
    CHECK(c.sep < prev_sep);
    CHECK(c.obs < prev_obs);
    prev_sep = c.sep;
    prev_obs = c.obs;
  }
}

TEST_CASE("equilibrium distance") {
  CHECK(equilibrium_distance(20, 9, 0) == doctest::Approx(std::pow(0.45, 0.25)).epsilon(1e-15));
  CHECK(equilibrium_distance(20, 9, 0) == doctest::Approx(0.81904).epsilon(1e-5));
  CHECK(equilibrium_distance(1, 1, 0) == 1.0);
  const double d = equilibrium_distance(20, 9, 0.07);
  CHECK(d == doctest::Approx(0.9263).epsilon(1e-4));
  CHECK(20 * d * std::pow(d - 0.14, 3) == doctest::Approx(9).epsilon(1e-7));
  CHECK_THROWS_AS(equilibrium_distance(0, 9, 0), NoEquilibrium);
  CHECK_THROWS_AS(equilibrium_distance(-1, 9, 0), NoEquilibrium);
}

TEST_CASE("two drones at the equilibrium are stationary") {
  for (double r : {0.0, 0.03, 0.07}) {
    auto p = two_drone_params();
    p.r_drone = r;
    const double d = equilibrium_distance(p.w_coh, p.w_sep, r);
    for (const Vec3 dir : {Vec3{1, 0, 0}, Vec3{0, 0.6, 0.8}, Vec3{-0.48, 0.6, 0.64}}) {
      const std::vector<Vec3> nb{{0, 0, 0}};
      const auto g = evaluate_gradient(dir * d, nb, p);
      CHECK(norm(g.coh + g.sep) < 1e-9);
    }
  }
}
