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

#include <atomic>
#include <memory>
#include <mutex>
#include <variant>
#include <vector>

#include "geocell/curve.hpp"
#include "geocell/vec.hpp"

namespace geocell {

enum class Membership : bool { kOutside = false, kInside = true };

struct LineSeg {
  Vec2 a, b;
};

/// Circular arc from start_angle to end_angle (radians) around `center`,
/// traversed counter-clockwise when `ccw`. Equal angles describe a full
/// circle.
struct ArcSeg {
  Vec2 center;
  double radius = 1.0;
  double start_angle = 0.0;
  double end_angle = 0.0;
  bool ccw = true;
};

/// Spline contour piece with the caches the ray-casting algorithm needs:
/// one curve parameter per control point, the closing line between the
/// first and last control point, and per-span control-point boxes (each
/// curve piece stays inside its span's hull).
struct SplineSeg {
  explicit SplineSeg(Curve2 c);

  Curve2 curve;
  std::vector<double> cp_params;
  Vec2 close_a, close_b;
  std::vector<Box2> span_boxes;
};

using Segment = std::variant<LineSeg, ArcSeg, SplineSeg>;

Vec2 segment_start(const Segment& s);
Vec2 segment_end(const Segment& s);
/// Uniform polyline approximation with n chords (n+1 points).
std::vector<Vec2> segment_polyline(const Segment& s, int n_chords);

enum class RayParity { kEven, kOdd };

struct SplineCastResult {
  RayParity parity = RayParity::kEven;
  bool degenerate = false;     ///< corner or tangential hit; caller should recast
  bool point_on_curve = false; ///< the query point itself lies on the spline
  bool used_newton = false;    ///< false means the control-polygon shortcut decided
  std::vector<Vec2> intersections;
};

/// Parity of crossings between the segment [p_out, p] and the spline. The
/// reference point must lie outside the convex hull of the control points or
/// on the closing line; otherwise the convex-hull shortcut is skipped and a
/// subdivision count is used.
SplineCastResult ray_cast_spline(const SplineSeg& spline, Vec2 p_out, Vec2 p,
                                 double tol);

/// Planar closed contour with parity-based point membership. Immutable after
/// construction; the acceleration quadtree is built once on first query.
class Sketch {
 public:
  explicit Sketch(std::vector<Segment> segments);

  // Copies and moves start with an unbuilt quadtree; it is rebuilt lazily.
  Sketch(const Sketch& other)
      : segments_(other.segments_), box_(other.box_), tol_(other.tol_), p_out_(other.p_out_) {}
  Sketch(Sketch&& other) noexcept
      : segments_(std::move(other.segments_)),
        box_(other.box_),
        tol_(other.tol_),
        p_out_(other.p_out_) {}
  Sketch& operator=(const Sketch&) = delete;
  Sketch& operator=(Sketch&&) = delete;

  const std::vector<Segment>& segments() const { return segments_; }
  Box2 bounding_box() const { return box_; }
  double diameter() const { return box_.diagonal(); }
  Vec2 reference_point() const { return p_out_; }

  /// Boundary points (within 1e-9 * diameter) classify as inside.
  Membership contains(Vec2 p) const;

  double signed_distance(Vec2 p) const;

  /// Next reference point after a degenerate ray towards `p`; returns the
  /// cached reference unchanged when the current ray is fine.
  Vec2 reposition_reference(Vec2 p) const;

  struct ClassifyStats {
    Membership result = Membership::kOutside;
    int retries = 0;
    bool winding_fallback = false;
    bool boundary = false;
  };
  /// Full classification from an explicit initial reference point (test and
  /// robustness hook); retries degenerate rays like contains() does.
  ClassifyStats classify_from(Vec2 p, Vec2 p_out) const;

  /// Number of rays that exhausted all retries since construction.
  std::uint64_t winding_fallback_count() const {
    return winding_fallbacks_.load(std::memory_order_relaxed);
  }

  /// Quadtree leaf lookup: 0 inside, 1 outside, 2 cut. Exposed for the
  /// leaf-consistency tests.
  int quadtree_class(Vec2 p) const;

  static constexpr int kMaxRetries = 16;
  static constexpr int kQuadtreeDepth = 6;

 private:
  struct QuadNode {
    Box2 box;
    int cls = 2;                         // 0 inside, 1 outside, 2 cut
    int child[4] = {-1, -1, -1, -1};     // quadrant order (x bit 0, y bit 1)
  };

  Vec2 reference_for_attempt(Vec2 p, int attempt) const;
  ClassifyStats classify_retrying(Vec2 p, Vec2 first_reference) const;
  void build_quadtree() const;
  int build_quad_rec(Box2 box, int depth, const std::vector<Box2>& covers) const;
  Membership winding_membership(Vec2 p) const;

  std::vector<Segment> segments_;
  Box2 box_;
  double tol_;
  Vec2 p_out_;

  mutable std::vector<QuadNode> quad_;
  mutable std::once_flag quad_once_;
  mutable std::atomic<std::uint64_t> winding_fallbacks_{0};
};

}  // namespace geocell
