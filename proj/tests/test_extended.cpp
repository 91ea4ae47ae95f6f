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

#include "geocell/extended.hpp"

#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace geocell;

TEST_CASE("frame of a straight path points along the axis") {
  Curve3 path = make_line_path({0, 0, 0}, {0, 0, 2});
  Frame f = frenet_frame(path, 0.5);
  CHECK(distance(f.axis(2), Vec3{0, 0, 1}) < 1e-14);
  CHECK(std::abs(dot(f.axis(0), f.axis(2))) < 1e-14);
  CHECK(std::abs(dot(f.axis(1), f.axis(2))) < 1e-14);
}

TEST_CASE("frame of a circle has the normal pointing to the center") {
  Curve3 circle = make_circle_path({0, 0, 0}, 10.0, {1, 0, 0}, {0, 1, 0});
  Frame f = frenet_frame(circle, 0.0);  // at (10, 0, 0)
  CHECK(distance(f.axis(2), Vec3{0, 1, 0}) < 1e-12);
  CHECK(distance(f.axis(0), Vec3{-1, 0, 0}) < 1e-12);
}

TEST_CASE("helix frames stay orthonormal with the tangent as third axis") {
  auto path = std::make_shared<Curve3>(testutil::coil_path());
  PathFrames frames(path);
  for (double xi : {0.5, 1.7, 3.0, 6.25, 9.9, 11.5}) {
    Frame f = frames.at(xi);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        CHECK(std::abs(dot(f.axis(i), f.axis(j)) - (i == j ? 1.0 : 0.0)) < 1e-12);
    Vec3 c, cd;
    path->derivatives(xi, 1, c, cd);
    CHECK(dot(f.axis(2), cd) == doctest::Approx(norm(cd)).epsilon(1e-12));
  }
}

TEST_CASE("frames vary continuously along the path") {
  auto path = std::make_shared<Curve3>(testutil::coil_path());
  PathFrames frames(path);
  Frame prev = frames.at(0.0);
  for (int i = 1; i <= 480; ++i) {
    Frame cur = frames.at(12.0 * i / 480);
    CHECK(dot(cur.axis(0), prev.axis(0)) > 0.5);  // no flips
    prev = cur;
  }
}

TEST_CASE("extrusion of a circle equals the cylinder") {
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  auto solid = make_extrusion(sketch, Frame(), 2.0);
  CHECK(solid->contains({0.5, 0, 1}));
  SimplePrimitive cyl(Cylinder{{0, 0, 0}, 1.0, 2.0});
  auto gen = testutil::rng(43);
  int checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    Vec3 p{testutil::uniform(gen, -1.6, 1.6), testutil::uniform(gen, -1.6, 1.6),
           testutil::uniform(gen, -0.8, 2.8)};
    double rad = std::sqrt(p.x * p.x + p.y * p.y);
    if (std::abs(rad - 1.0) < 1e-9 || std::abs(p.z) < 1e-9 || std::abs(p.z - 2.0) < 1e-9) continue;
    ++checked;
    CHECK(solid->contains(p) == cyl.contains(p));
  }
  CHECK(checked > 9000);
}

TEST_CASE("sweep along a circle equals the torus") {
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  auto path = std::make_shared<Curve3>(make_circle_path({0, 0, 0}, 10.0, {1, 0, 0}, {0, 1, 0}));
  SweepSolid solid(path, sketch, {});
  CHECK(solid.contains({10, 0, 0.5}));
  SimplePrimitive torus(Torus{{0, 0, 0}, 10.0, 1.0});
  auto gen = testutil::rng(47);
  for (int trial = 0; trial < 3000; ++trial) {
    Vec3 p{testutil::uniform(gen, -12, 12), testutil::uniform(gen, -12, 12),
           testutil::uniform(gen, -1.5, 1.5)};
    double ring = std::sqrt(p.x * p.x + p.y * p.y) - 10.0;
    double tube = std::sqrt(ring * ring + p.z * p.z);
    if (std::abs(tube - 1.0) < 1e-7) continue;
    CHECK(solid.contains(p) == torus.contains(p));
  }
}

TEST_CASE("revolution helper builds the same torus") {
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  auto solid = make_revolution(sketch, {0, 0, 0}, {0, 0, 1}, {10, 0, 0}, 2.0 * kPi);
  SimplePrimitive torus(Torus{{0, 0, 0}, 10.0, 1.0});
  auto gen = testutil::rng(53);
  for (int trial = 0; trial < 2000; ++trial) {
    Vec3 p{testutil::uniform(gen, -12, 12), testutil::uniform(gen, -12, 12),
           testutil::uniform(gen, -1.5, 1.5)};
    double ring = std::sqrt(p.x * p.x + p.y * p.y) - 10.0;
    double tube = std::sqrt(ring * ring + p.z * p.z);
    if (std::abs(tube - 1.0) < 1e-7) continue;
    CHECK(solid->contains(p) == torus.contains(p));
  }
}

TEST_CASE("coil sweep tube follows the helix pitch") {
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  auto path = std::make_shared<Curve3>(testutil::coil_path());
  SweepSolid coil(path, sketch, {});
  // The helix rises 8 per turn, so the tube crosses the positive-x plane at
  // z = 0, 8, 16, 24. Between those heights the same (x, y) is 4 away from
  // the path (dense-sampling oracle) and lies outside the radius-1 tube.
  CHECK(coil.contains({10, 0, 8}));
  CHECK(coil.contains({10, 0, 16}));
  CHECK(coil.contains({10, 0.3, 16.4}));
  CHECK(!coil.contains({10, 0, 12}));
  CHECK(!coil.contains({0, 0, 12}));
}

TEST_CASE("orthogonal plane root reduces to the closest point") {
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  auto path = std::make_shared<Curve3>(testutil::coil_path());
  SweepSolid coil(path, sketch, {});
  Vec3 p{9.5, 0.5, 6.2};
  PlaneRoot root = coil.rotated_plane_root(p);
  auto cp = path->closest_point(p);
  bool matches_tie = false;
  for (double t : cp.ties) matches_tie = matches_tie || std::abs(t - root.xi) < 1e-9 * 12.0;
  CHECK(matches_tie);
}

TEST_CASE("tilted plane root zeroes the local height") {
  // Straight path along z with the sketch plane tilted 30 degrees about x.
  auto path = std::make_shared<Curve3>(make_line_path({0, 0, 0}, {0, 0, 4}));
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  double c = std::cos(kPi / 6), s = std::sin(kPi / 6);
  FrameSpec spec;
  spec.mode = FrameMode::kConstantDihedral;
  Mat3 axes;
  axes.col[0] = {1, 0, 0};
  axes.col[1] = {0, c, s};
  axes.col[2] = {0, -s, c};
  spec.sketch_axes_start = axes;
  SweepSolid solid(path, sketch, spec);

  Vec3 p{0, 0.5, 1};
  PlaneRoot root = solid.rotated_plane_root(p);
  Vec3 local = root.frame.to_local(p);
  CHECK(std::abs(local.z) < 1e-9 * 3.0);
  // Closed form: plane through (0, 0, z) with normal n contains p when
  // n.y p.y + n.z (p.z - z) = 0.
  Vec3 n = axes.col[2];
  double z_root = (n.y * p.y + n.z * p.z) / n.z;
  CHECK(root.frame.origin().z == doctest::Approx(z_root).epsilon(1e-8));
}

TEST_CASE("parallel mode finds the axis foot") {
  auto path = std::make_shared<Curve3>(make_line_path({0, 0, 0}, {0, 0, 4}));
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  FrameSpec spec;
  spec.mode = FrameMode::kParallel;
  spec.sketch_axes_start = Mat3{};
  SweepSolid solid(path, sketch, spec);
  Vec3 p{0.3, -0.2, 2.75};
  PlaneRoot root = solid.rotated_plane_root(p);
  CHECK(root.frame.origin().z == doctest::Approx(2.75).epsilon(1e-9));
}

TEST_CASE("membership is invariant under a rigid motion of solid and point") {
  auto sketch = std::make_shared<Sketch>(testutil::rectangle_sketch(1.0, 0.6));
  auto path = std::make_shared<Curve3>(testutil::coil_path());
  SweepSolid original(path, sketch, {});

  double c = std::cos(0.7), s = std::sin(0.7);
  auto map = [&](Vec3 p) {
    return Vec3{c * p.x - s * p.y + 2.0, s * p.x + c * p.y - 1.0, p.z + 0.5};
  };
  std::vector<Vec3> moved_pts;
  for (const Vec3& q : path->control_points()) moved_pts.push_back(map(q));
  auto moved_path = std::make_shared<Curve3>(path->degree(), path->knots(), std::move(moved_pts),
                                             path->weights());
  SweepSolid moved(moved_path, sketch, {});

  auto gen = testutil::rng(59);
  int disagreements = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    Vec3 p{testutil::uniform(gen, -12, 12), testutil::uniform(gen, -12, 12),
           testutil::uniform(gen, -2, 26)};
    if (original.contains(p) != moved.contains(map(p))) ++disagreements;
  }
  // Identical up to boundary-band grazes.
  CHECK(disagreements <= 2);
}

TEST_CASE("degenerate loft equals the cylinder") {
  auto circle = std::make_shared<Sketch>(testutil::circle_sketch());
  auto path = std::make_shared<Curve3>(make_line_path({0, 0, 0}, {0, 0, 2}));
  LoftSolid loft(path, circle, circle, {});
  SimplePrimitive cyl(Cylinder{{0, 0, 0}, 1.0, 2.0});
  auto gen = testutil::rng(61);
  for (int trial = 0; trial < 3000; ++trial) {
    Vec3 p{testutil::uniform(gen, -1.5, 1.5), testutil::uniform(gen, -1.5, 1.5),
           testutil::uniform(gen, -0.5, 2.5)};
    double rad = std::sqrt(p.x * p.x + p.y * p.y);
    if (std::abs(rad - 1.0) < 1e-9 || std::abs(p.z) < 1e-9 || std::abs(p.z - 2.0) < 1e-9) continue;
    CHECK(loft.contains(p) == cyl.contains(p));
  }
}

TEST_CASE("loft of concentric circles equals the cone frustum") {
  auto start = std::make_shared<Sketch>(testutil::circle_sketch(1.0));
  auto end = std::make_shared<Sketch>(testutil::circle_sketch(2.0));
  auto path = std::make_shared<Curve3>(make_line_path({0, 0, 0}, {0, 0, 3}));
  LoftSolid loft(path, start, end, {});
  SimplePrimitive cone(ConeFrustum{{0, 0, 0}, 1.0, 2.0, 3.0});
  auto gen = testutil::rng(67);
  for (int trial = 0; trial < 3000; ++trial) {
    Vec3 p{testutil::uniform(gen, -2.5, 2.5), testutil::uniform(gen, -2.5, 2.5),
           testutil::uniform(gen, -0.5, 3.5)};
    if (p.z < 1e-6 || p.z > 3.0 - 1e-6) continue;
    double rad = std::sqrt(p.x * p.x + p.y * p.y);
    if (std::abs(rad - (1.0 + p.z / 3.0)) < 1e-7) continue;
    CHECK(loft.contains(p) == cone.contains(p));
  }
}

TEST_CASE("loft of the same sketch equals the sweep") {
  auto sketch = std::make_shared<Sketch>(testutil::rectangle_sketch(0.8, 0.5));
  auto path = std::make_shared<Curve3>(make_circle_path({0, 0, 0}, 6.0, {1, 0, 0}, {0, 1, 0}));
  SweepSolid sweep(path, sketch, {});
  LoftSolid loft(path, sketch, sketch, {});
  auto gen = testutil::rng(71);
  for (int trial = 0; trial < 2000; ++trial) {
    Vec3 p{testutil::uniform(gen, -8, 8), testutil::uniform(gen, -8, 8),
           testutil::uniform(gen, -1, 1)};
    CHECK(sweep.contains(p) == loft.contains(p));
  }
}

TEST_CASE("loft boundary point at the path midpoint is inside") {
  auto start = std::make_shared<Sketch>(testutil::circle_sketch(1.0));
  auto end = std::make_shared<Sketch>(testutil::rectangle_sketch(2.0, 2.0));
  auto path = std::make_shared<Curve3>(make_line_path({0, 0, 0}, {0, 0, 4}));
  LoftSolid loft(path, start, end, {});
  // At the midpoint the interpolated distance of (1.5, 0) vanishes:
  // d0 = -0.5 outside the circle, d_end = +0.5 inside the rectangle.
  CHECK(loft.contains({1.5, 0, 2}));
  CHECK(!loft.contains({1.55, 0, 2}));
  CHECK(loft.contains({1.45, 0, 2}));
}

TEST_CASE("accepted plane roots satisfy the height tolerance") {
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  auto path = std::make_shared<Curve3>(testutil::coil_path());
  double c = std::cos(0.3), s = std::sin(0.3);
  FrameSpec spec;
  spec.mode = FrameMode::kConstantDihedral;
  Mat3 axes;
  Frame start = frenet_frame(*path, 0.0);
  // Tilt the starting sketch basis about its first axis.
  axes.col[0] = start.axis(0);
  axes.col[1] = start.axis(1) * c + start.axis(2) * s;
  axes.col[2] = start.axis(2) * c - start.axis(1) * s;
  spec.sketch_axes_start = axes;
  SweepSolid solid(path, sketch, spec);
  auto gen = testutil::rng(73);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 p{testutil::uniform(gen, -11, 11), testutil::uniform(gen, -11, 11),
           testutil::uniform(gen, 0, 24)};
    PlaneRoot root = solid.rotated_plane_root(p);
    if (root.reduced_accuracy) continue;
    Vec3 local = root.frame.to_local(p);
    CHECK(std::abs(local.z) < 1e-9 * 3.0);
  }
}

TEST_CASE("interpolated end frames blend and stay orthonormal") {
  auto path = std::make_shared<Curve3>(make_line_path({0, 0, 0}, {0, 0, 6}));
  auto sketch = std::make_shared<Sketch>(testutil::circle_sketch());
  double c = std::cos(kPi / 8), s = std::sin(kPi / 8);
  FrameSpec spec;
  spec.mode = FrameMode::kInterpolated;
  Mat3 start;  // orthogonal sketch at the start
  Mat3 tilted;  // tilted about x at the end
  tilted.col[0] = {1, 0, 0};
  tilted.col[1] = {0, c, s};
  tilted.col[2] = {0, -s, c};
  spec.sketch_axes_start = start;
  spec.sketch_axes_end = tilted;
  SweepSolid solid(path, sketch, spec);
  auto gen = testutil::rng(79);
  for (int trial = 0; trial < 100; ++trial) {
    Vec3 p{testutil::uniform(gen, -1, 1), testutil::uniform(gen, -1, 1),
           testutil::uniform(gen, 0.5, 5.5)};
    PlaneRoot root = solid.rotated_plane_root(p);
    if (root.reduced_accuracy) continue;
    Vec3 local = root.frame.to_local(p);
    CHECK(std::abs(local.z) < 1e-9 * 3.0);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j)
        CHECK(std::abs(dot(root.frame.axis(i), root.frame.axis(j)) - (i == j ? 1.0 : 0.0)) <
              1e-12);
  }
  // The normal rotates across the sweep.
  Frame near_start = solid.plane_frame(path->xi_min() + 0.01);
  Frame near_end = solid.plane_frame(path->xi_max() - 0.01);
  CHECK(dot(near_start.axis(2), Vec3{0, 0, 1}) > 0.99);
  CHECK(dot(near_end.axis(2), Vec3{0, -s, c}) > 0.99);
}

TEST_CASE("regularity is enforced") {
  // Duplicated control point makes the tangent vanish at the start.
  CHECK_THROWS_AS(SweepSolid(std::make_shared<Curve3>(Curve3(
                                 1, {0, 0, 0.5, 1, 1}, {{0, 0, 0}, {0, 0, 0}, {0, 0, 1}})),
                             std::make_shared<Sketch>(testutil::circle_sketch()), FrameSpec{}),
                  Error);
}
