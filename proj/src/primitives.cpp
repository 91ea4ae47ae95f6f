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

#include <cmath>

namespace geocell {

namespace {
constexpr double kOrthoTol = 1e-12;

double det3(Vec3 a, Vec3 b, Vec3 c) { return dot(a, cross(b, c)); }
}  // namespace

Frame::Frame() : origin_{0, 0, 0}, axes_{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, identity_(true) {}

Frame::Frame(Vec3 origin, Vec3 a1, Vec3 a2, Vec3 a3) : origin_(origin), axes_{a1, a2, a3} {
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot(axes_[i], axes_[j]) - want) > 1e-9)
        throw Error("frame: axes not orthonormal");
    }
  if (det3(a1, a2, a3) < 0.0) throw Error("frame: axes must be right-handed");
  identity_ = norm(origin) == 0.0 && distance(a1, Vec3{1, 0, 0}) <= kOrthoTol &&
              distance(a2, Vec3{0, 1, 0}) <= kOrthoTol && distance(a3, Vec3{0, 0, 1}) <= kOrthoTol;
}

Frame Frame::from_two_axes(Vec3 origin, Vec3 a1, Vec3 a2) {
  Vec3 e1 = normalized(a1);
  Vec3 e2 = a2 - e1 * dot(a2, e1);
  if (norm(e2) < 1e-12) throw Error("frame: axes are parallel");
  e2 = normalized(e2);
  Vec3 e3 = cross(e1, e2);
  return Frame(origin, e1, e2, e3);
}

bool contains_local(const PrimitiveShape& shape, Vec3 p) {
  return std::visit(
      [&](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          return norm2(p - s.center) <= s.radius * s.radius;
        } else if constexpr (std::is_same_v<T, Cuboid>) {
          return p.x >= s.start.x && p.x <= s.end.x && p.y >= s.start.y && p.y <= s.end.y &&
                 p.z >= s.start.z && p.z <= s.end.z;
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          Vec2 r{p.x - s.center.x, p.y - s.center.y};
          return norm2(r) <= s.radius * s.radius && p.z >= s.center.z &&
                 p.z <= s.center.z + s.height;
        } else if constexpr (std::is_same_v<T, ConeFrustum>) {
          double z = p.z - s.center.z;
          if (z < 0.0 || z > s.height) return false;
          double rz = (s.r1 - s.r0) / s.height * z + s.r0;
          Vec2 r{p.x - s.center.x, p.y - s.center.y};
          return norm2(r) <= rz * rz;
        } else if constexpr (std::is_same_v<T, PyramidFrustum>) {
          double z = p.z - s.z_c;
          if (z < 0.0 || z > s.height) return false;
          double t = z / s.height;
          double xs = s.x_s0 + (s.x_s1 - s.x_s0) * t;
          double xe = s.x_e0 + (s.x_e1 - s.x_e0) * t;
          double ys = s.y_s0 + (s.y_s1 - s.y_s0) * t;
          double ye = s.y_e0 + (s.y_e1 - s.y_e0) * t;
          return p.x >= xs && p.x <= xe && p.y >= ys && p.y <= ye;
        } else if constexpr (std::is_same_v<T, Torus>) {
          double ring = std::sqrt((p.x - s.center.x) * (p.x - s.center.x) +
                                  (p.y - s.center.y) * (p.y - s.center.y)) -
                        s.major_radius;
          double z = p.z - s.center.z;
          return ring * ring + z * z <= s.minor_radius * s.minor_radius;
        } else {
          static_assert(std::is_same_v<T, Wedge>);
          if (p.x < s.lo.x || p.x > s.hi.x || p.y < s.lo.y || p.y > s.hi.y || p.z < s.lo.z ||
              p.z > s.hi.z)
            return false;
          double dx = s.hi.x - s.lo.x, dy = s.hi.y - s.lo.y;
          return (p.x - s.lo.x) * dy + (p.y - s.lo.y) * dx <= dx * dy;
        }
      },
      shape);
}

Box3 local_bounds(const PrimitiveShape& shape) {
  return std::visit(
      [&](const auto& s) -> Box3 {
        using T = std::decay_t<decltype(s)>;
        Box3 b = Box3::empty();
        if constexpr (std::is_same_v<T, Sphere>) {
          b.expand(s.center - Vec3{s.radius, s.radius, s.radius});
          b.expand(s.center + Vec3{s.radius, s.radius, s.radius});
        } else if constexpr (std::is_same_v<T, Cuboid>) {
          b.expand(s.start);
          b.expand(s.end);
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          b.expand(s.center - Vec3{s.radius, s.radius, 0});
          b.expand(s.center + Vec3{s.radius, s.radius, s.height});
        } else if constexpr (std::is_same_v<T, ConeFrustum>) {
          double r = std::max(s.r0, s.r1);
          b.expand(s.center - Vec3{r, r, 0});
          b.expand(s.center + Vec3{r, r, s.height});
        } else if constexpr (std::is_same_v<T, PyramidFrustum>) {
          b.expand({std::min(s.x_s0, s.x_s1), std::min(s.y_s0, s.y_s1), s.z_c});
          b.expand({std::max(s.x_e0, s.x_e1), std::max(s.y_e0, s.y_e1), s.z_c + s.height});
        } else if constexpr (std::is_same_v<T, Torus>) {
          double r = s.major_radius + s.minor_radius;
          b.expand(s.center - Vec3{r, r, s.minor_radius});
          b.expand(s.center + Vec3{r, r, s.minor_radius});
        } else {
          static_assert(std::is_same_v<T, Wedge>);
          b.expand(s.lo);
          b.expand(s.hi);
        }
        return b;
      },
      shape);
}

namespace {

PrimitiveShape validated(PrimitiveShape shape) {
  std::visit(
      [](auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Sphere>) {
          if (!(s.radius > 0.0)) throw Error("sphere: radius must be positive");
        } else if constexpr (std::is_same_v<T, Cuboid>) {
          // Modelers routinely supply unordered diagonals; normalize instead
          // of rejecting.
          for (int i = 0; i < 3; ++i)
            if (s.start[i] > s.end[i]) std::swap(s.start[i], s.end[i]);
        } else if constexpr (std::is_same_v<T, Cylinder>) {
          if (!(s.radius > 0.0)) throw Error("cylinder: radius must be positive");
          if (!(s.height > 0.0)) throw Error("cylinder: height must be positive");
        } else if constexpr (std::is_same_v<T, ConeFrustum>) {
          if (!(s.r0 > 0.0)) throw Error("cone: bottom radius must be positive");
          if (s.r1 < 0.0) throw Error("cone: top radius must be non-negative");
          if (!(s.height > 0.0)) throw Error("cone: height must be positive");
        } else if constexpr (std::is_same_v<T, PyramidFrustum>) {
          if (!(s.height > 0.0)) throw Error("pyramid: height must be positive");
          if (s.x_s0 > s.x_e0 || s.y_s0 > s.y_e0 || s.x_s1 > s.x_e1 || s.y_s1 > s.y_e1)
            throw Error("pyramid: rectangle bounds out of order");
          double ext = std::max({s.x_e0 - s.x_s0, s.y_e0 - s.y_s0, s.height});
          if (std::abs((s.x_s0 + s.x_e0) - (s.x_s1 + s.x_e1)) > 1e-9 * ext ||
              std::abs((s.y_s0 + s.y_e0) - (s.y_s1 + s.y_e1)) > 1e-9 * ext)
            throw Error("pyramid: bottom and top rectangles must share a center");
        } else if constexpr (std::is_same_v<T, Torus>) {
          if (!(s.major_radius > 0.0) || !(s.minor_radius > 0.0))
            throw Error("torus: radii must be positive");
        } else {
          static_assert(std::is_same_v<T, Wedge>);
          for (int i = 0; i < 3; ++i)
            if (s.lo[i] > s.hi[i]) std::swap(s.lo[i], s.hi[i]);
        }
      },
      shape);
  return shape;
}

}  // namespace

SimplePrimitive::SimplePrimitive(PrimitiveShape shape, Frame frame)
    : shape_(validated(std::move(shape))), frame_(frame) {
  Box3 local = local_bounds(shape_);
  world_box_ = Box3::empty();
  for (int i = 0; i < 8; ++i) {
    Vec3 corner{(i & 1) ? local.hi.x : local.lo.x, (i & 2) ? local.hi.y : local.lo.y,
                (i & 4) ? local.hi.z : local.lo.z};
    world_box_.expand(frame_.from_local(corner));
  }
}

bool SimplePrimitive::contains(Vec3 p) const {
  return contains_local(shape_, frame_.is_identity() ? p : frame_.to_local(p));
}

}  // namespace geocell
