// Copyright 2026 The Geocell Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geocell/curve.hpp"

#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace geocell;
using testutil::coil_path;

TEST_CASE("clamped evaluation hits the end control points") {
  Curve3 helix = coil_path();
  Vec3 a = helix.evaluate(0.0);
  CHECK(distance(a, Vec3{10, 0, 0}) < 1e-14);
  Vec3 b = helix.evaluate(12.0);
  CHECK(distance(b, Vec3{10, 0, 24}) < 1e-14);
}

TEST_CASE("degree-1 curve interpolates linearly") {
  Curve2 line(1, {0, 0, 1, 1}, {{0, 0}, {1, 1}});
  Vec2 mid = line.evaluate(0.5);
  CHECK(mid.x == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mid.y == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("rational quarter arc reproduces the circle") {
  // 90 degree arc with the standard middle weight.
  const double s = 1.0 / std::sqrt(2.0);
  Curve2 arc(2, {0, 0, 0, 1, 1, 1}, {{1, 0}, {1, 1}, {0, 1}}, {1, s, 1});
  for (double xi : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    Vec2 p = arc.evaluate(xi);
    CHECK(norm(p) == doctest::Approx(1.0).epsilon(1e-13));
  }
  // Tangent perpendicular to the radius vector at the midpoint.
  Vec2 p, d;
  arc.derivatives(0.5, 1, p, d);
  CHECK(std::abs(dot(p, d)) < 1e-12 * norm(d));
}

TEST_CASE("derivative of a straight segment is the chord over the span") {
  Curve2 seg(1, {0, 0, 1, 1}, {{0, 0}, {2, 0}});
  Vec2 p, d;
  seg.derivatives(0.3, 1, p, d);
  CHECK(d.x == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(d.y == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("parameter range and derivative order are enforced") {
  Curve3 helix = coil_path();
  CHECK_THROWS_AS(helix.evaluate(-0.5), Error);
  CHECK_THROWS_AS(helix.evaluate(12.5), Error);
  Vec3 p, d, dd;
  CHECK_THROWS_AS(helix.derivatives(1.0, 3, p, d, &dd), Error);
}

TEST_CASE("first derivatives match central differences") {
  Curve3 helix = coil_path();
  auto gen = testutil::rng(7);
  const double h = 1e-6 * helix.xi_span();
  for (int trial = 0; trial < 200; ++trial) {
    double xi = testutil::uniform(gen, helix.xi_min() + 2 * h, helix.xi_max() - 2 * h);
    Vec3 p, d;
    helix.derivatives(xi, 1, p, d);
    Vec3 fd = (helix.evaluate(xi + h) - helix.evaluate(xi - h)) / (2.0 * h);
    CHECK(distance(d, fd) <= 1e-5 * (1.0 + norm(d)));
  }
}

TEST_CASE("stationarity value matches finite differences at a probe parameter") {
  Curve3 helix = coil_path();
  Vec3 probe{10.5, 0.3, 0.1};
  Vec3 p, d;
  helix.derivatives(0.5, 1, p, d);
  double f = dot(d, probe - p);
  const double h = 1e-6 * helix.xi_span();
  double dist_plus = norm2(probe - helix.evaluate(0.5 + h));
  double dist_minus = norm2(probe - helix.evaluate(0.5 - h));
  // f = -0.5 d/dxi |probe - C|^2
  double fd = -0.5 * (dist_plus - dist_minus) / (2.0 * h);
  CHECK(f == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("closest point on a straight line is the perpendicular foot") {
  Curve3 line(1, {0, 0, 1, 1}, {{0, 0, 0}, {10, 0, 0}});
  auto cp = line.closest_point({3, 4, 0});
  CHECK(cp.status == ProjectionStatus::kConverged);
  CHECK(cp.distance == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cp.point.x == doctest::Approx(3.0).epsilon(1e-10));
}

TEST_CASE("on-axis query against a full circle reports tied minimizers") {
  Curve3 circle = make_circle_path({0, 0, 0}, 10.0, {1, 0, 0}, {0, 1, 0});
  auto cp = circle.closest_point({0, 0, 5});
  CHECK(cp.distance == doctest::Approx(std::sqrt(125.0)).epsilon(1e-12));
  CHECK(cp.ties.size() > 1);
}

TEST_CASE("coil closest point beats a dense sampling oracle") {
  Curve3 helix = coil_path();
  Vec3 probe{10.5, 0, 0.1};
  auto cp = helix.closest_point(probe);
  CHECK(cp.distance < 1.0);

  const int n = 200000;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= n; ++i) {
    double xi = helix.xi_min() + helix.xi_span() * i / n;
    best = std::min(best, distance(helix.evaluate(xi), probe));
  }
  CHECK(cp.distance <= best + 1e-8 * (1.0 + best));
  CHECK(cp.distance >= best - 1e-6 * (1.0 + best));
}

TEST_CASE("closest point never loses to its own seeding polygon") {
  Curve3 helix = coil_path();
  auto gen = testutil::rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 probe{testutil::uniform(gen, -15, 15), testutil::uniform(gen, -15, 15),
               testutil::uniform(gen, -5, 30)};
    auto cp = helix.closest_point(probe);
    double best_sample = std::numeric_limits<double>::infinity();
    for (const Vec3& s : helix.polygon_points())
      best_sample = std::min(best_sample, distance(s, probe));
    CHECK(cp.distance <= best_sample * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("interior minimizers satisfy the scaled stationarity bound") {
  Curve3 helix = coil_path();
  auto gen = testutil::rng(13);
  const double range = helix.xi_span();
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 probe{testutil::uniform(gen, -12, 12), testutil::uniform(gen, -12, 12),
               testutil::uniform(gen, 0, 24)};
    auto cp = helix.closest_point(probe);
    if (cp.status != ProjectionStatus::kConverged) continue;
    for (double xi : cp.ties) {
      if (xi <= helix.xi_min() + 1e-9 * range || xi >= helix.xi_max() - 1e-9 * range) continue;
      Vec3 p, d;
      helix.derivatives(xi, 1, p, d);
      double f = dot(d, probe - p);
      CHECK(std::abs(f) <= 1e-10 * norm(d) * (1.0 + norm(probe - p)));
    }
  }
}

TEST_CASE("evaluation is affine equivariant") {
  Curve3 helix = coil_path();
  // Rigid rotation about z by 30 degrees plus a shift.
  double c = std::cos(kPi / 6), s = std::sin(kPi / 6);
  auto map = [&](Vec3 p) { return Vec3{c * p.x - s * p.y + 1.5, s * p.x + c * p.y - 2.0, p.z + 3.0}; };
  std::vector<Vec3> pts;
  for (const Vec3& p : helix.control_points()) pts.push_back(map(p));
  Curve3 moved(helix.degree(), helix.knots(), std::move(pts), helix.weights());
  auto gen = testutil::rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    double xi = testutil::uniform(gen, helix.xi_min(), helix.xi_max());
    CHECK(distance(moved.evaluate(xi), map(helix.evaluate(xi))) < 1e-12 * 30.0);
  }
}
