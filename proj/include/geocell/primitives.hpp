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

#pragma once

#include <memory>
#include <variant>

#include "geocell/body.hpp"
#include "geocell/vec.hpp"

namespace geocell {

/// Right-handed orthonormal frame. Maps between world coordinates and the
/// local coordinates a primitive was constructed in.
class Frame {
 public:
  /// Identity frame at the world origin.
  Frame();
  /// Frame with explicit axes; validates orthonormality and det = +1.
  Frame(Vec3 origin, Vec3 a1, Vec3 a2, Vec3 a3);
  /// Frame from origin and two spanning axes; a2 is re-orthonormalized
  /// against a1 and a3 completes the right-handed triple.
  static Frame from_two_axes(Vec3 origin, Vec3 a1, Vec3 a2);

  Vec3 origin() const { return origin_; }
  Vec3 axis(int i) const { return axes_[i]; }

  /// World point expressed in local coordinates (rotate-then-translate with
  /// the axis components as matrix rows).
  Vec3 to_local(Vec3 p) const {
    Vec3 d = p - origin_;
    return {dot(axes_[0], d), dot(axes_[1], d), dot(axes_[2], d)};
  }
  Vec3 from_local(Vec3 q) const {
    return origin_ + axes_[0] * q.x + axes_[1] * q.y + axes_[2] * q.z;
  }
  /// Rotation only, for directions.
  Vec3 direction_from_local(Vec3 q) const {
    return axes_[0] * q.x + axes_[1] * q.y + axes_[2] * q.z;
  }

  bool is_identity() const { return identity_; }

 private:
  Vec3 origin_;
  Vec3 axes_[3];
  bool identity_;
};

struct Sphere {
  Vec3 center;
  double radius = 1.0;
};

struct Cuboid {
  Vec3 start, end;  // normalized componentwise at construction
};

struct Cylinder {
  Vec3 center;  // bottom circle center in local coordinates
  double radius = 1.0;
  double height = 1.0;
};

/// Bottom radius r0 at the center plane, top radius r1 at height h0; r1 = 0
/// gives a complete cone.
struct ConeFrustum {
  Vec3 center;
  double r0 = 1.0;
  double r1 = 0.0;
  double height = 1.0;
};

/// Rectangular frustum; bottom and top rectangles share a center.
struct PyramidFrustum {
  double x_s0, x_e0, y_s0, y_e0;  // bottom rectangle
  double x_s1, x_e1, y_s1, y_e1;  // top rectangle
  double z_c = 0.0;
  double height = 1.0;
};

struct Torus {
  Vec3 center;
  double major_radius = 2.0;  // ring radius in the local x-y plane
  double minor_radius = 0.5;  // tube radius
};

/// Triangular prism along local z: the cuboid [lo, hi] cut by the plane
/// through (hi.x, lo.y) and (lo.x, hi.y), keeping the corner at (lo.x, lo.y).
struct Wedge {
  Vec3 lo, hi;
};

using PrimitiveShape =
    std::variant<Sphere, Cuboid, Cylinder, ConeFrustum, PyramidFrustum, Torus, Wedge>;

/// Analytic primitive positioned by an owning frame.
class SimplePrimitive final : public Body {
 public:
  SimplePrimitive(PrimitiveShape shape, Frame frame = Frame());

  bool contains(Vec3 p) const override;
  Box3 bounding_box() const override { return world_box_; }

  const PrimitiveShape& shape() const { return shape_; }
  const Frame& frame() const { return frame_; }

 private:
  PrimitiveShape shape_;
  Frame frame_;
  Box3 world_box_;
};

/// Membership in local coordinates, closed-body convention throughout.
bool contains_local(const PrimitiveShape& shape, Vec3 p);

/// Axis-aligned bounds of the shape in its local frame.
Box3 local_bounds(const PrimitiveShape& shape);

}  // namespace geocell
