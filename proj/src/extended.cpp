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

#include <algorithm>
#include <cmath>

namespace geocell {

namespace {
constexpr double kCurvatureFloor = 1e-10;
constexpr int kArcLengthSamples = 256;

Vec3 pick_normal_for(Vec3 t) {
  // Complete a frame around a bare tangent: start from the axis least
  // aligned with it.
  int best = 0;
  double best_dot = std::abs(t.x);
  if (std::abs(t.y) < best_dot) { best = 1; best_dot = std::abs(t.y); }
  if (std::abs(t.z) < best_dot) best = 2;
  Vec3 e{best == 0 ? 1.0 : 0.0, best == 1 ? 1.0 : 0.0, best == 2 ? 1.0 : 0.0};
  return normalized(e - t * dot(e, t));
}
}  // namespace

PathFrames::PathFrames(std::shared_ptr<const Curve3> path) : path_(std::move(path)) {
  xi_ = path_->polygon_params();
  frames_.reserve(xi_.size());
  const Frame* prev = nullptr;
  for (double xi : xi_) {
    frames_.push_back(frame_near(xi, prev));
    prev = &frames_.back();
  }
}

Frame PathFrames::frame_near(double xi, const Frame* reference) const {
  Vec3 c, cd, cdd;
  path_->derivatives(xi, 2, c, cd, &cdd);
  double speed = norm(cd);
  if (speed <= 1e-12 * (1.0 + path_->bounding_box().diagonal()))
    throw Error("path: zero tangent, sweep path must be regular");
  Vec3 t = cd / speed;

  Vec3 n;
  if (norm(cross(cd, cdd)) > kCurvatureFloor * speed * speed) {
    n = normalized(cdd - t * dot(cdd, t));
    if (reference && dot(n, reference->axis(0)) < 0.0) n = -n;
  } else if (reference) {
    Vec3 carried = reference->axis(0) - t * dot(reference->axis(0), t);
    n = norm(carried) > 1e-12 ? normalized(carried) : pick_normal_for(t);
  } else {
    n = pick_normal_for(t);
  }
  return Frame(c, n, cross(t, n), t);
}

Frame PathFrames::at(double xi) const {
  auto it = std::lower_bound(xi_.begin(), xi_.end(), xi);
  size_t idx = std::min<size_t>(it - xi_.begin(), xi_.size() - 1);
  if (idx > 0 && std::abs(xi_[idx - 1] - xi) < std::abs(xi_[idx] - xi)) --idx;
  if (xi == xi_[idx]) return frames_[idx];
  return frame_near(xi, &frames_[idx]);
}

Frame frenet_frame(const Curve3& path, double xi) {
  PathFrames frames(std::shared_ptr<const Curve3>(&path, [](const Curve3*) {}));
  return frames.at(xi);
}

namespace detail {

SweptBase::SweptBase(std::shared_ptr<const Curve3> path, FrameSpec spec,
                     double sketch_circumradius, std::vector<Box2> section_boxes)
    : path_(std::move(path)), spec_(spec), frames_(path_) {
  closed_ = path_->is_closed();

  auto relation_from = [&](const Mat3& world_axes, double xi) {
    Frame a = frames_.at(xi);
    Mat3 rel;
    for (int j = 0; j < 3; ++j) {
      Vec3 bj = world_axes.col[j];
      if (std::abs(norm(bj) - 1.0) > 1e-9) throw Error("sweep: sketch axes must be orthonormal");
      rel.col[j] = {dot(a.axis(0), bj), dot(a.axis(1), bj), dot(a.axis(2), bj)};
    }
    return rel;
  };

  switch (spec_.mode) {
    case FrameMode::kFrenet:
      break;
    case FrameMode::kParallel:
    case FrameMode::kConstantDihedral:
      if (!spec_.sketch_axes_start) throw Error("sweep: mode requires start sketch axes");
      relation0_ = relation_from(*spec_.sketch_axes_start, path_->xi_min());
      break;
    case FrameMode::kInterpolated:
      if (!spec_.sketch_axes_start || !spec_.sketch_axes_end)
        throw Error("sweep: interpolated mode requires start and end sketch axes");
      relation0_ = relation_from(*spec_.sketch_axes_start, path_->xi_min());
      relation_end_ = relation_from(*spec_.sketch_axes_end, path_->xi_max());
      break;
  }

  // Cumulative chord arc length.
  arc_xi_.resize(kArcLengthSamples + 1);
  arc_length_.resize(kArcLengthSamples + 1);
  Vec3 prev = path_->evaluate(path_->xi_min());
  arc_xi_[0] = path_->xi_min();
  arc_length_[0] = 0.0;
  for (int i = 1; i <= kArcLengthSamples; ++i) {
    arc_xi_[i] = path_->xi_min() + path_->xi_span() * i / kArcLengthSamples;
    Vec3 cur = path_->evaluate(arc_xi_[i]);
    arc_length_[i] = arc_length_[i - 1] + distance(prev, cur);
    prev = cur;
  }
  if (!(arc_length_.back() > 0.0)) throw Error("sweep: path has zero length");

  tol_z_ = 1e-9 * (1.0 + 2.0 * sketch_circumradius);

  // Conservative bounds: every sampled section box, inflated by the largest
  // jump of a section corner between neighboring samples.
  const auto& params = path_->polygon_params();
  world_box_ = Box3::empty();
  double margin = 0.0;
  std::vector<Vec3> prev_corners;
  for (double xi : params) {
    Frame f = plane_frame(xi);
    std::vector<Vec3> corners;
    for (const Box2& sb : section_boxes) {
      for (int k = 0; k < 4; ++k) {
        Vec2 c2{k & 1 ? sb.hi.x : sb.lo.x, k & 2 ? sb.hi.y : sb.lo.y};
        Vec3 w = f.origin() + f.axis(0) * c2.x + f.axis(1) * c2.y;
        corners.push_back(w);
        world_box_.expand(w);
      }
    }
    if (!prev_corners.empty()) {
      for (size_t k = 0; k < corners.size(); ++k)
        margin = std::max(margin, distance(corners[k], prev_corners[k]));
    }
    prev_corners = std::move(corners);
  }
  world_box_ = world_box_.inflated(margin + 1e-9 * (1.0 + world_box_.diagonal()));
}

double SweptBase::arc_length_at(double xi) const {
  auto it = std::upper_bound(arc_xi_.begin(), arc_xi_.end(), xi);
  size_t hi = std::clamp<size_t>(it - arc_xi_.begin(), 1, arc_xi_.size() - 1);
  size_t lo = hi - 1;
  double t = std::clamp((xi - arc_xi_[lo]) / (arc_xi_[hi] - arc_xi_[lo]), 0.0, 1.0);
  return arc_length_[lo] + (arc_length_[hi] - arc_length_[lo]) * t;
}

Frame SweptBase::plane_frame(double xi) const {
  Frame a = frames_.at(xi);
  switch (spec_.mode) {
    case FrameMode::kFrenet:
      return a;
    case FrameMode::kParallel: {
      const Mat3& b = *spec_.sketch_axes_start;
      return Frame(a.origin(), b.col[0], b.col[1], b.col[2]);
    }
    case FrameMode::kConstantDihedral: {
      Vec3 b[3];
      for (int j = 0; j < 3; ++j)
        b[j] = a.axis(0) * relation0_.col[j].x + a.axis(1) * relation0_.col[j].y +
               a.axis(2) * relation0_.col[j].z;
      return Frame(a.origin(), b[0], b[1], b[2]);
    }
    case FrameMode::kInterpolated: {
      double t = arc_length_at(xi) / arc_length_.back();
      Vec3 b[3];
      for (int j = 0; j < 3; ++j) {
        Vec3 u = a.axis(0) * relation0_.col[j].x + a.axis(1) * relation0_.col[j].y +
                 a.axis(2) * relation0_.col[j].z;
        Vec3 v = a.axis(0) * relation_end_.col[j].x + a.axis(1) * relation_end_.col[j].y +
                 a.axis(2) * relation_end_.col[j].z;
        b[j] = u * (1.0 - t) + v * t;
      }
      // Re-orthonormalize, keeping the plane normal authoritative.
      Vec3 b3 = normalized(b[2]);
      Vec3 b1 = normalized(b[0] - b3 * dot(b[0], b3));
      return Frame(a.origin(), b1, cross(b3, b1), b3);
    }
  }
  throw Error("sweep: unknown frame mode");
}

double SweptBase::plane_offset(double xi, Vec3 p) const {
  Frame f = plane_frame(xi);
  return dot(f.axis(2), p - f.origin());
}

bool SweptBase::cap_accepts(double xi, Vec3 p) const {
  if (closed_) return true;
  double range = path_->xi_span();
  double z = plane_offset(xi, p);
  if (std::abs(xi - path_->xi_min()) <= 1e-9 * range) return z >= -tol_z_;
  if (std::abs(xi - path_->xi_max()) <= 1e-9 * range) return z <= tol_z_;
  return true;
}

std::vector<PlaneRoot> SweptBase::plane_roots(Vec3 p, bool* reduced) const {
  std::vector<PlaneRoot> out;
  const double lo = path_->xi_min(), hi = path_->xi_max(), range = hi - lo;
  auto push_unique = [&](double xi, bool flagged) {
    for (const PlaneRoot& r : out)
      if (std::abs(r.xi - xi) <= 1e-9 * (1.0 + range)) return;
    out.push_back({xi, plane_frame(xi), flagged});
  };

  auto cp = path_->closest_point(p);
  if (cp.status == ProjectionStatus::kReduced && reduced) *reduced = true;

  if (spec_.mode == FrameMode::kFrenet) {
    // The plane through the closest point is already orthogonal; endpoint
    // minima keep the end plane and are filtered by the cap half-space.
    for (double xi : cp.ties)
      if (cap_accepts(xi, p)) push_unique(xi, cp.status == ProjectionStatus::kReduced);
    return out;
  }

  const double d_xi = 1e-6 * range;
  auto newton = [&](double seed, double* result) {
    double xi = seed;
    for (int it = 0; it < 50; ++it) {
      double g = plane_offset(xi, p);
      if (std::abs(g) < tol_z_) {
        *result = xi;
        return true;
      }
      double g2 = plane_offset(std::min(xi + d_xi, hi), p);
      double denom = (g2 - g) / (std::min(xi + d_xi, hi) - xi);
      if (denom == 0.0) return false;
      double next = std::clamp(xi - g / denom, lo, hi);
      if (next == xi) return false;
      xi = next;
    }
    return false;
  };

  bool newton_failed = false;
  for (double seed : cp.ties) {
    double root;
    if (newton(seed, &root)) {
      if (cap_accepts(root, p)) push_unique(root, false);
    } else {
      newton_failed = true;
    }
  }

  // Sign-change scan over the sampled path catches the planes the seeds
  // missed and doubles as the fallback when Newton stalled.
  const auto& params = path_->polygon_params();
  double prev_g = plane_offset(params[0], p);
  if (std::abs(prev_g) <= tol_z_ && cap_accepts(params[0], p)) push_unique(params[0], false);
  for (size_t i = 1; i < params.size(); ++i) {
    double g = plane_offset(params[i], p);
    if (std::abs(g) <= tol_z_) {
      if (cap_accepts(params[i], p)) push_unique(params[i], false);
    } else if ((prev_g < 0.0) != (g < 0.0)) {
      double a = params[i - 1], b = params[i], ga = prev_g;
      for (int it = 0; it < 80 && b - a > 1e-14 * (1.0 + range); ++it) {
        double mid = 0.5 * (a + b);
        double gm = plane_offset(mid, p);
        if (gm == 0.0) { a = b = mid; break; }
        if ((gm < 0.0) == (ga < 0.0)) { a = mid; ga = gm; } else { b = mid; }
      }
      double root = 0.5 * (a + b);
      if (cap_accepts(root, p)) push_unique(root, newton_failed);
    }
    prev_g = g;
  }
  if (newton_failed && reduced) *reduced = true;
  return out;
}

PlaneRoot SweptBase::rotated_plane_root(Vec3 p) const {
  bool reduced = false;
  std::vector<PlaneRoot> roots = plane_roots(p, &reduced);
  if (roots.empty()) {
    // No plane reaches the point; report the nearer end plane.
    double xi = std::abs(plane_offset(path_->xi_min(), p)) <
                        std::abs(plane_offset(path_->xi_max(), p))
                    ? path_->xi_min()
                    : path_->xi_max();
    return {xi, plane_frame(xi), true};
  }
  PlaneRoot best = roots.front();
  for (const PlaneRoot& r : roots)
    if (std::abs(plane_offset(r.xi, p)) < std::abs(plane_offset(best.xi, p))) best = r;
  best.reduced_accuracy = best.reduced_accuracy || reduced;
  return best;
}

}  // namespace detail

namespace {

double sketch_circumradius(const Sketch& s) {
  Box2 b = s.bounding_box();
  double r = 0.0;
  for (int k = 0; k < 4; ++k)
    r = std::max(r, norm(Vec2{k & 1 ? b.hi.x : b.lo.x, k & 2 ? b.hi.y : b.lo.y}));
  return r;
}

}  // namespace

SweepSolid::SweepSolid(std::shared_ptr<const Curve3> path, std::shared_ptr<const Sketch> sketch,
                       FrameSpec spec)
    : SweptBase(std::move(path), spec, sketch_circumradius(*sketch), {sketch->bounding_box()}),
      sketch_(std::move(sketch)) {}

bool SweepSolid::contains(Vec3 p) const {
  if (!world_box_.contains(p)) return false;
  for (const PlaneRoot& r : plane_roots(p, nullptr)) {
    Vec3 local = r.frame.to_local(p);
    if (sketch_->contains({local.x, local.y}) == Membership::kInside) return true;
  }
  return false;
}

LoftSolid::LoftSolid(std::shared_ptr<const Curve3> path, std::shared_ptr<const Sketch> sketch_start,
                     std::shared_ptr<const Sketch> sketch_end, FrameSpec spec)
    : SweptBase(std::move(path), spec,
                std::max(sketch_circumradius(*sketch_start), sketch_circumradius(*sketch_end)),
                {sketch_start->bounding_box(), sketch_end->bounding_box()}),
      start_(std::move(sketch_start)),
      end_(std::move(sketch_end)) {}

bool LoftSolid::contains(Vec3 p) const {
  if (!world_box_.contains(p)) return false;
  const double l_all = total_arc_length();
  // Every tied plane is evaluated; one inside verdict decides.
  for (const PlaneRoot& r : plane_roots(p, nullptr)) {
    Vec3 local = r.frame.to_local(p);
    Vec2 q{local.x, local.y};
    double d0 = start_->signed_distance(q);
    double d_end = end_->signed_distance(q);
    double d = d0 + (d_end - d0) / l_all * arc_length_at(r.xi);
    if (d >= 0.0) return true;
  }
  return false;
}

std::shared_ptr<SweepSolid> make_extrusion(std::shared_ptr<const Sketch> sketch, Frame placement,
                                           double length) {
  if (!(length > 0.0)) throw Error("extrude: length must be positive");
  Vec3 a = placement.origin();
  Vec3 b = a + placement.axis(2) * length;
  auto path = std::make_shared<Curve3>(make_line_path(a, b));
  FrameSpec spec;
  spec.mode = FrameMode::kParallel;
  Mat3 axes;
  axes.col[0] = placement.axis(0);
  axes.col[1] = placement.axis(1);
  axes.col[2] = placement.axis(2);
  spec.sketch_axes_start = axes;
  return std::make_shared<SweepSolid>(std::move(path), std::move(sketch), spec);
}

Curve3 make_arc_path(Vec3 center, double radius, Vec3 u, Vec3 v, double angle_rad) {
  if (!(angle_rad > 0.0) || angle_rad > 2.0 * kPi + 1e-12)
    throw Error("arc path: angle must be in (0, 2*pi]");
  int n_seg = std::max(1, static_cast<int>(std::ceil(angle_rad / (0.5 * kPi) - 1e-12)));
  double seg = angle_rad / n_seg;
  double w_mid = std::cos(0.5 * seg);
  std::vector<Vec3> pts;
  std::vector<double> weights;
  std::vector<double> knots = {0, 0, 0};
  auto rim = [&](double ang) { return center + u * (radius * std::cos(ang)) + v * (radius * std::sin(ang)); };
  pts.push_back(rim(0.0));
  weights.push_back(1.0);
  for (int i = 0; i < n_seg; ++i) {
    double a0 = seg * i, a1 = seg * (i + 1), am = 0.5 * (a0 + a1);
    // Middle control point on the tangent intersection.
    Vec3 mid = center + (u * std::cos(am) + v * std::sin(am)) * (radius / std::cos(0.5 * seg));
    pts.push_back(mid);
    weights.push_back(w_mid);
    pts.push_back(rim(a1));
    weights.push_back(1.0);
    knots.push_back(i + 1);
    knots.push_back(i + 1);
  }
  knots.push_back(n_seg);
  return Curve3(2, std::move(knots), std::move(pts), std::move(weights));
}

std::shared_ptr<SweepSolid> make_revolution(std::shared_ptr<const Sketch> sketch, Vec3 axis_origin,
                                            Vec3 axis_dir, Vec3 anchor, double angle_rad) {
  Vec3 axis = normalized(axis_dir);
  Vec3 rel = anchor - axis_origin;
  Vec3 foot = axis_origin + axis * dot(rel, axis);
  Vec3 radial = anchor - foot;
  double radius = norm(radial);
  if (radius <= 0.0) throw Error("revolve: anchor lies on the axis");
  Vec3 u = radial / radius;
  Vec3 v = cross(axis, u);
  auto path = std::make_shared<Curve3>(make_arc_path(foot, radius, u, v, angle_rad));
  return std::make_shared<SweepSolid>(std::move(path), std::move(sketch), FrameSpec{});
}

}  // namespace geocell
