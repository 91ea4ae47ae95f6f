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

#include "geocell/primitives.hpp"

#include <doctest.h>

#include <cmath>

#include "test_util.hpp"

using namespace geocell;

namespace {

Frame random_frame(std::mt19937_64& gen, double span) {
  while (true) {
    Vec3 origin{testutil::uniform(gen, -span, span), testutil::uniform(gen, -span, span),
                testutil::uniform(gen, -span, span)};
    Vec3 a1{testutil::uniform(gen, -1, 1), testutil::uniform(gen, -1, 1),
            testutil::uniform(gen, -1, 1)};
    Vec3 a2{testutil::uniform(gen, -1, 1), testutil::uniform(gen, -1, 1),
            testutil::uniform(gen, -1, 1)};
    if (norm(a1) < 0.1 || norm(cross(a1, a2)) < 0.1) continue;
    return Frame::from_two_axes(origin, a1, a2);
  }
}

}  // namespace

TEST_CASE("identity frame maps points to themselves") {
  Frame id;
  Vec3 p{1, 2, 3};
  CHECK(distance(id.to_local(p), p) == 0.0);
}

TEST_CASE("rotation about z maps world x onto local -y") {
  // Local axes are the world axes turned by 90 degrees.
  Frame f({0, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, 0, 1});
  Vec3 local = f.to_local({1, 0, 0});
  CHECK(distance(local, Vec3{0, -1, 0}) < 1e-15);
}

TEST_CASE("translation moves the origin") {
  Frame f({5, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1});
  CHECK(distance(f.to_local({5, 0, 0}), Vec3{0, 0, 0}) == 0.0);
}

TEST_CASE("to_local and from_local are inverse") {
  auto gen = testutil::rng(3);
  for (int i = 0; i < 200; ++i) {
    Frame f = random_frame(gen, 10.0);
    Vec3 p{testutil::uniform(gen, -10, 10), testutil::uniform(gen, -10, 10),
           testutil::uniform(gen, -10, 10)};
    CHECK(distance(f.from_local(f.to_local(p)), p) <= 1e-12 * (1.0 + norm(p)));
  }
}

TEST_CASE("frame validation rejects bad axes") {
  CHECK_THROWS_AS(Frame({0, 0, 0}, {1, 0, 0}, {1, 0, 0}, {0, 0, 1}), Error);
  CHECK_THROWS_AS(Frame({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, -1}), Error);
}

TEST_CASE("sphere includes its boundary") {
  SimplePrimitive sphere(Sphere{{0, 0, 0}, 1.0});
  CHECK(sphere.contains({0, 0, 1}));
  CHECK(!sphere.contains({0, 0, 1.0000001}));
}

TEST_CASE("complete cone narrows linearly") {
  SimplePrimitive cone(ConeFrustum{{0, 0, 0}, 2.0, 0.0, 4.0});
  // r(2) = (0 - 2)/4 * 2 + 2 = 1
  CHECK(cone.contains({0.5, 0, 2}));
  CHECK(cone.contains({1.0, 0, 2}));
  CHECK(!cone.contains({1.01, 0, 2}));
  CHECK(!cone.contains({0, 0, 4.5}));
}

TEST_CASE("cylinder rejects points beyond radius or height") {
  SimplePrimitive cyl(Cylinder{{0, 0, 0}, 1.0, 2.0});
  CHECK(!cyl.contains({0, 2, 1}));
  CHECK(cyl.contains({0, 1, 1}));
  CHECK(!cyl.contains({0, 0, 2.1}));
}

TEST_CASE("membership commutes with the frame mapping") {
  auto gen = testutil::rng(5);
  for (int trial = 0; trial < 1000; ++trial) {
    Frame f = random_frame(gen, 5.0);
    ConeFrustum shape{{0.3, -0.2, 0}, 1.5, 0.5, 2.0};
    SimplePrimitive axis_aligned(shape);
    SimplePrimitive oriented(shape, f);
    Vec3 p{testutil::uniform(gen, -8, 8), testutil::uniform(gen, -8, 8),
           testutil::uniform(gen, -8, 8)};
    CHECK(oriented.contains(p) == axis_aligned.contains(f.to_local(p)));
  }
}

TEST_CASE("growing a sphere never expels a point") {
  auto gen = testutil::rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Vec3 p{testutil::uniform(gen, -3, 3), testutil::uniform(gen, -3, 3),
           testutil::uniform(gen, -3, 3)};
    bool prev = false;
    for (double r = 0.5; r <= 6.0; r += 0.5) {
      bool now = SimplePrimitive(Sphere{{0, 0, 0}, r}).contains(p);
      CHECK((!prev || now));
      prev = now;
    }
  }
}

TEST_CASE("degenerate pyramid frustum equals the cuboid") {
  PyramidFrustum pyr{-1, 2, -0.5, 1.5, -1, 2, -0.5, 1.5, 0.25, 3.0};
  SimplePrimitive pyramid(pyr);
  SimplePrimitive box(Cuboid{{-1, -0.5, 0.25}, {2, 1.5, 3.25}});
  auto gen = testutil::rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec3 p{testutil::uniform(gen, -2, 3), testutil::uniform(gen, -2, 3),
           testutil::uniform(gen, -1, 4)};
    CHECK(pyramid.contains(p) == box.contains(p));
  }
}

TEST_CASE("degenerate cone frustum equals the cylinder") {
  SimplePrimitive cone(ConeFrustum{{0.5, 0, 1}, 1.25, 1.25, 2.0});
  SimplePrimitive cyl(Cylinder{{0.5, 0, 1}, 1.25, 2.0});
  auto gen = testutil::rng(11);
  for (int trial = 0; trial < 1000; ++trial) {
    Vec3 p{testutil::uniform(gen, -2, 3), testutil::uniform(gen, -2, 2),
           testutil::uniform(gen, -1, 4)};
    CHECK(cone.contains(p) == cyl.contains(p));
  }
}

TEST_CASE("torus membership follows the ring distance") {
  SimplePrimitive torus(Torus{{0, 0, 0}, 2.0, 0.5});
  CHECK(torus.contains({2, 0, 0}));
  CHECK(torus.contains({2.5, 0, 0}));
  CHECK(torus.contains({2, 0, 0.5}));
  CHECK(!torus.contains({2, 0, 0.51}));
  CHECK(!torus.contains({0, 0, 0}));
}

TEST_CASE("construction validates parameters") {
  CHECK_THROWS_AS(SimplePrimitive(Sphere{{0, 0, 0}, -1.0}), Error);
  CHECK_THROWS_AS(SimplePrimitive(Cylinder{{0, 0, 0}, 1.0, 0.0}), Error);
  CHECK_THROWS_AS(SimplePrimitive(PyramidFrustum{0, 2, 0, 2, 0.5, 2, 0, 2, 0, 1}), Error);
  // Unordered cuboid corners are normalized, not rejected.
  SimplePrimitive box(Cuboid{{1, 1, 1}, {0, 0, 0}});
  CHECK(box.contains({0.5, 0.5, 0.5}));
}

TEST_CASE("world bounding box is conservative") {
  auto gen = testutil::rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    Frame f = random_frame(gen, 4.0);
    SimplePrimitive prim(Cylinder{{0, 0, 0}, 1.0, 3.0}, f);
    Box3 box = prim.bounding_box();
    for (int i = 0; i < 50; ++i) {
      Vec3 p{testutil::uniform(gen, -10, 10), testutil::uniform(gen, -10, 10),
             testutil::uniform(gen, -10, 10)};
      if (prim.contains(p)) CHECK(box.contains(p));
    }
  }
}
