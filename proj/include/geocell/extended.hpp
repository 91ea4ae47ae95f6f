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
#include <optional>
#include <vector>

#include "geocell/body.hpp"
#include "geocell/curve.hpp"
#include "geocell/primitives.hpp"
#include "geocell/sketch.hpp"

namespace geocell {

/// 3x3 matrix stored by columns.
struct Mat3 {
  Vec3 col[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  Vec3 operator*(Vec3 v) const { return col[0] * v.x + col[1] * v.y + col[2] * v.z; }
};

/// Orthonormal frames along a path: Frenet where the curvature allows it,
/// parallel transport across straight or inflection stretches, and sign
/// continuity between neighboring samples so the normal never flips.
class PathFrames {
 public:
  explicit PathFrames(std::shared_ptr<const Curve3> path);

  /// Frame with axis 3 along the tangent; origin at the curve point.
  Frame at(double xi) const;

  const Curve3& path() const { return *path_; }

 private:
  Frame frame_near(double xi, const Frame* reference) const;

  std::shared_ptr<const Curve3> path_;
  std::vector<double> xi_;
  std::vector<Frame> frames_;
};

/// Convenience single query; builds the frame table for `path` on the fly.
Frame frenet_frame(const Curve3& path, double xi);

enum class FrameMode { kFrenet, kConstantDihedral, kParallel, kInterpolated };

/// Sketch-plane orientation along the path. For the non-Frenet modes the
/// world axes of the sketch basis at the path start (and end, when
/// interpolated) must be supplied; the relation to the path frame is fixed
/// once at construction.
struct FrameSpec {
  FrameMode mode = FrameMode::kFrenet;
  std::optional<Mat3> sketch_axes_start;
  std::optional<Mat3> sketch_axes_end;
};

struct PlaneRoot {
  double xi = 0.0;
  Frame frame;
  bool reduced_accuracy = false;
};

namespace detail {

/// Machinery shared by sweeps and lofts: plane location per frame mode,
/// arc-length table, conservative bounds.
class SweptBase : public Body {
 public:
  Box3 bounding_box() const override { return world_box_; }

  const Curve3& path() const { return *path_; }
  const PathFrames& frames() const { return frames_; }
  double total_arc_length() const { return arc_length_.back(); }
  double arc_length_at(double xi) const;

  /// Sketch-plane frame at `xi` for the configured mode.
  Frame plane_frame(double xi) const;

  /// All parameters whose sketch plane passes through `p` (|local z| below
  /// tolerance), found from closest-point seeds plus a sign-change scan of
  /// the sampled plane offset. Endpoint candidates carry the flat-cap
  /// half-space check.
  std::vector<PlaneRoot> plane_roots(Vec3 p, bool* reduced) const;

  PlaneRoot rotated_plane_root(Vec3 p) const;

 protected:
  SweptBase(std::shared_ptr<const Curve3> path, FrameSpec spec, double sketch_circumradius,
            std::vector<Box2> section_boxes);

  double plane_offset(double xi, Vec3 p) const;  // local z of p on the plane at xi
  bool cap_accepts(double xi, Vec3 p) const;

  std::shared_ptr<const Curve3> path_;
  FrameSpec spec_;
  PathFrames frames_;
  Mat3 relation0_, relation_end_;  // T_ij = A_i . B_j at the respective ends
  std::vector<double> arc_xi_, arc_length_;
  Box3 world_box_;
  double tol_z_;
  bool closed_;
};

}  // namespace detail

/// Solid formed by sweeping a planar sketch along a path. Open paths get
/// flat end caps; closed paths wrap around.
class SweepSolid final : public detail::SweptBase {
 public:
  SweepSolid(std::shared_ptr<const Curve3> path, std::shared_ptr<const Sketch> sketch,
             FrameSpec spec = {});

  bool contains(Vec3 p) const override;
  const Sketch& sketch() const { return *sketch_; }

 private:
  std::shared_ptr<const Sketch> sketch_;
};

/// Solid blending a start sketch into an end sketch along a path; the
/// section contour is the zero level of the arc-length interpolated signed
/// distances.
class LoftSolid final : public detail::SweptBase {
 public:
  LoftSolid(std::shared_ptr<const Curve3> path, std::shared_ptr<const Sketch> sketch_start,
            std::shared_ptr<const Sketch> sketch_end, FrameSpec spec = {});

  bool contains(Vec3 p) const override;
  const Sketch& sketch_start() const { return *start_; }
  const Sketch& sketch_end() const { return *end_; }

 private:
  std::shared_ptr<const Sketch> start_, end_;
};

/// Sweep along a straight line with the sketch basis held constant: the
/// extrusion. `placement` orients the sketch (axis 3 is the direction).
std::shared_ptr<SweepSolid> make_extrusion(std::shared_ptr<const Sketch> sketch, Frame placement,
                                           double length);

/// Sweep along a circular arc around an axis. The sketch local x points away
/// from the axis and local y along it; `anchor` fixes the circle through the
/// sketch origin. A full 360 degree angle closes the path.
std::shared_ptr<SweepSolid> make_revolution(std::shared_ptr<const Sketch> sketch, Vec3 axis_origin,
                                            Vec3 axis_dir, Vec3 anchor, double angle_rad);

/// Circular arc path through `center + r*u` spanning `angle_rad`, split into
/// rational quadratic segments of at most 90 degrees.
Curve3 make_arc_path(Vec3 center, double radius, Vec3 u, Vec3 v, double angle_rad);

}  // namespace geocell
