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
#include <cstdint>
#include <vector>

#include "geocell/vec.hpp"

namespace geocell {

/// Outcome of a closest-point query. `kReduced` marks results recovered from
/// the sampling polygon after Newton failed on every seed; the parameter is
/// then only as accurate as the polygon resolution.
enum class ProjectionStatus { kConverged, kReduced };

template <class V>
struct ClosestPointT {
  double xi = 0.0;          ///< parameter of the global minimizer
  double distance = 0.0;    ///< Euclidean distance at `xi`
  V point{};                ///< curve point at `xi`
  std::vector<double> ties; ///< all minimizers within the tie tolerance (includes `xi`)
  ProjectionStatus status = ProjectionStatus::kConverged;
};

/// Piecewise-rational spline curve (NURBS) with a clamped knot vector.
/// Immutable after construction; all queries are safe to call concurrently.
template <class V>
class CurveT {
 public:
  /// Builds a curve with all weights equal to one (polynomial B-spline).
  CurveT(int degree, std::vector<double> knots, std::vector<V> control_points);
  CurveT(int degree, std::vector<double> knots, std::vector<V> control_points,
         std::vector<double> weights);

  // The evaluation counter is a debug probe, not geometry; copies start
  // fresh.
  CurveT(const CurveT& other)
      : degree_(other.degree_),
        knots_(other.knots_),
        points_(other.points_),
        weights_(other.weights_),
        poly_xi_(other.poly_xi_),
        poly_pt_(other.poly_pt_),
        box_(other.box_),
        closed_(other.closed_) {}
  CurveT(CurveT&& other) noexcept
      : degree_(other.degree_),
        knots_(std::move(other.knots_)),
        points_(std::move(other.points_)),
        weights_(std::move(other.weights_)),
        poly_xi_(std::move(other.poly_xi_)),
        poly_pt_(std::move(other.poly_pt_)),
        box_(other.box_),
        closed_(other.closed_) {}
  CurveT& operator=(const CurveT&) = delete;
  CurveT& operator=(CurveT&&) = delete;

  int degree() const { return degree_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<V>& control_points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  double xi_min() const { return knots_.front(); }
  double xi_max() const { return knots_.back(); }
  double xi_span() const { return xi_max() - xi_min(); }

  V evaluate(double xi) const;

  /// Point plus first (and optionally second) derivative. Second derivatives
  /// next to knots of multiplicity >= degree are taken by central finite
  /// differences since the analytic curvature jumps there.
  void derivatives(double xi, int order, V& point, V& d1, V* d2 = nullptr) const;

  ClosestPointT<V> closest_point(V p) const;

  /// Sampling polygon used to seed Newton iterations: 16 samples per
  /// non-empty knot span plus the end points.
  const std::vector<double>& polygon_params() const { return poly_xi_; }
  const std::vector<V>& polygon_points() const { return poly_pt_; }

  BoxT<V> bounding_box() const { return box_; }
  bool is_closed() const { return closed_; }

  /// Number of de Boor evaluations since construction. Debug probe for the
  /// ray-casting shortcut tests; relaxed atomic, not part of the geometry.
  std::uint64_t eval_count() const { return eval_count_.load(std::memory_order_relaxed); }
  void reset_eval_count() const { eval_count_.store(0, std::memory_order_relaxed); }

 private:
  int find_span(double xi) const;
  void basis_funs(int span, double xi, int n_derivs, double* out) const;
  void homogeneous_derivs(double xi, int order, V* a, double* w) const;
  bool c2_unavailable_near(double xi) const;

  int degree_;
  std::vector<double> knots_;
  std::vector<V> points_;
  std::vector<double> weights_;
  std::vector<double> poly_xi_;
  std::vector<V> poly_pt_;
  BoxT<V> box_ = BoxT<V>::empty();
  bool closed_ = false;
  mutable std::atomic<std::uint64_t> eval_count_{0};
};

using Curve2 = CurveT<Vec2>;
using Curve3 = CurveT<Vec3>;

/// Full circle as a nine-point rational quadratic in the plane spanned by
/// `u` and `v` (orthonormal), parameter range [0, 4].
Curve3 make_circle_path(Vec3 center, double radius, Vec3 u, Vec3 v);

/// Straight segment as a degree-1 curve over [0, 1].
Curve3 make_line_path(Vec3 a, Vec3 b);

extern template class CurveT<Vec2>;
extern template class CurveT<Vec3>;

}  // namespace geocell
