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

#include "geocell/sketch.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <iostream>

namespace geocell {

namespace {

double mod_2pi(double a) {
  double m = std::fmod(a, 2.0 * kPi);
  return m < 0.0 ? m + 2.0 * kPi : m;
}

Vec2 arc_point(const ArcSeg& arc, double angle) {
  return arc.center + Vec2{arc.radius * std::cos(angle), arc.radius * std::sin(angle)};
}

double arc_sweep(const ArcSeg& arc) {
  double s = arc.ccw ? mod_2pi(arc.end_angle - arc.start_angle)
                     : mod_2pi(arc.start_angle - arc.end_angle);
  return s == 0.0 ? 2.0 * kPi : s;  // equal angles mean a full circle
}

// 0 outside the angular range, 1 inside, 2 within `band` of an arc end.
int arc_angle_class(const ArcSeg& arc, double angle, double band) {
  double sweep = arc_sweep(arc);
  double u = arc.ccw ? mod_2pi(angle - arc.start_angle) : mod_2pi(arc.start_angle - angle);
  bool full = sweep >= 2.0 * kPi - 1e-15;
  if (!full && (u <= band || std::abs(u - sweep) <= band || 2.0 * kPi - u <= band)) return 2;
  return (u <= sweep) ? 1 : 0;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = norm2(ab);
  if (len2 == 0.0) return distance(p, a);
  double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return distance(p, a + ab * t);
}

Box2 arc_bbox(const ArcSeg& arc) {
  Box2 b = Box2::empty();
  b.expand(arc_point(arc, arc.start_angle));
  b.expand(arc_point(arc, arc.end_angle));
  for (int k = 0; k < 4; ++k) {
    double axis = k * kPi / 2.0;
    if (arc_angle_class(arc, axis, 0.0) == 1) b.expand(arc_point(arc, axis));
  }
  return b;
}

// True cover of a segment: polyline samples undershoot curved pieces, so
// arcs get their exact box and splines the control-point box.
Box2 segment_cover_box(const Segment& s) {
  if (const auto* line = std::get_if<LineSeg>(&s)) {
    Box2 b = Box2::empty();
    b.expand(line->a);
    b.expand(line->b);
    return b;
  }
  if (const auto* arc = std::get_if<ArcSeg>(&s)) return arc_bbox(*arc);
  return std::get<SplineSeg>(s).curve.bounding_box();
}

struct CrossOut {
  int count = 0;
  bool degenerate = false;
  bool boundary = false;
};

// Crossings of the ray segment [a, b] with the contour line [s, e].
CrossOut cross_line(Vec2 a, Vec2 b, Vec2 s, Vec2 e, double tol) {
  CrossOut out;
  if (point_segment_distance(b, s, e) <= tol) {
    out.boundary = true;
    return out;
  }
  Vec2 d = b - a, g = e - s;
  double dlen = norm(d), glen = norm(g);
  double denom = cross(d, g);
  if (std::abs(denom) <= 1e-14 * dlen * glen) {
    // Parallel; collinear overlap makes the parity ambiguous.
    if (std::abs(cross(g, s - a)) <= tol * glen) {
      double t0 = dot(s - a, d) / (dlen * dlen);
      double t1 = dot(e - a, d) / (dlen * dlen);
      if (std::max(std::min(t0, t1), 0.0) <= std::min(std::max(t0, t1), 1.0))
        out.degenerate = true;
    }
    return out;
  }
  double t = cross(s - a, g) / denom;
  double u = cross(s - a, d) / denom;
  double du = tol / glen;  // corner band in the contour-line parameter
  if (u < -du || u > 1.0 + du || t <= 0.0 || t >= 1.0) return out;
  if (u <= du || u >= 1.0 - du) {
    out.degenerate = true;  // ray meets the contour at a corner
    return out;
  }
  out.count = 1;
  return out;
}

CrossOut cross_arc(Vec2 a, Vec2 b, const ArcSeg& arc, double tol) {
  CrossOut out;
  // Boundary first: distance from b to the arc.
  {
    double r = distance(b, arc.center);
    double ang = std::atan2(b.y - arc.center.y, b.x - arc.center.x);
    if (std::abs(r - arc.radius) <= tol && arc_angle_class(arc, ang, 0.0) == 1) {
      out.boundary = true;
      return out;
    }
    if (distance(b, arc_point(arc, arc.start_angle)) <= tol ||
        distance(b, arc_point(arc, arc.end_angle)) <= tol) {
      out.boundary = true;
      return out;
    }
  }
  Vec2 d = b - a;
  Vec2 m = a - arc.center;
  double qa = norm2(d);
  double qb = 2.0 * dot(m, d);
  double qc = norm2(m) - arc.radius * arc.radius;
  double disc = qb * qb - 4.0 * qa * qc;
  if (disc < 0.0) return out;
  double sq = std::sqrt(disc);
  // Grazing ray: the two intersections are closer than the tolerance.
  if (sq / qa * norm(d) <= tol) {
    double t_mid = -qb / (2.0 * qa);
    if (t_mid > 0.0 && t_mid < 1.0) {
      double ang = std::atan2(m.y + t_mid * d.y, m.x + t_mid * d.x);
      if (arc_angle_class(arc, ang, tol / arc.radius) != 0) out.degenerate = true;
    }
    return out;
  }
  double band = tol / arc.radius;
  for (double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
    if (t <= 0.0 || t >= 1.0) continue;
    Vec2 x = a + d * t;
    double ang = std::atan2(x.y - arc.center.y, x.x - arc.center.x);
    int cls = arc_angle_class(arc, ang, band);
    if (cls == 2) {
      out.degenerate = true;
      return out;
    }
    if (cls == 1) ++out.count;
  }
  return out;
}

struct PolyHit {
  int line_index;  // -1 for the closing line
  double s;        // parameter along the control line
};

}  // namespace

SplineSeg::SplineSeg(Curve2 c) : curve(std::move(c)) {
  const auto& cps = curve.control_points();
  cp_params.reserve(cps.size());
  for (const Vec2& q : cps) cp_params.push_back(curve.closest_point(q).xi);
  close_a = cps.front();
  close_b = cps.back();
  const auto& knots = curve.knots();
  const int p = curve.degree();
  for (size_t i = p; i + p + 1 < knots.size(); ++i) {
    if (knots[i + 1] <= knots[i]) continue;
    Box2 b = Box2::empty();
    for (int j = static_cast<int>(i) - p; j <= static_cast<int>(i); ++j) b.expand(cps[j]);
    span_boxes.push_back(b);
  }
}

namespace {

// Robust crossing count for [p_out, p] by dense parameter sampling plus
// bracket bisection. Parity of transversal crossings is exact at the sample
// resolution; tangential touches contribute evenly and are reported as
// degenerate when they graze within `tol`.
SplineCastResult cast_spline_subdivision(const SplineSeg& sp, Vec2 p_out, Vec2 p, double tol) {
  SplineCastResult res;
  const Curve2& c = sp.curve;
  Vec2 d = p - p_out;
  double dlen = norm(d);
  Vec2 dir = d / dlen;
  Vec2 nrm = perp(dir);
  auto y_of = [&](double xi) { return dot(nrm, c.evaluate(xi) - p_out); };
  auto x_of = [&](double xi) { return dot(dir, c.evaluate(xi) - p_out); };

  const double lo = c.xi_min(), hi = c.xi_max(), range = hi - lo;
  int n_spans = 0;
  for (size_t i = 0; i + 1 < c.knots().size(); ++i)
    if (c.knots()[i + 1] > c.knots()[i]) ++n_spans;
  const int ns = std::max(1024, 256 * n_spans);

  std::vector<double> xs(ns + 1), ys(ns + 1);
  for (int i = 0; i <= ns; ++i) {
    xs[i] = lo + range * i / ns;
    ys[i] = y_of(xs[i]);
  }

  std::vector<double> roots;
  for (int i = 0; i < ns; ++i) {
    double ya = ys[i], yb = ys[i + 1];
    if (ya == 0.0) ya = 1e-300;  // push exact zeros into the bracket logic
    if ((ya < 0.0) == (yb < 0.0)) {
      // No sign change: a close graze without a crossing is ambiguous.
      if (std::min(std::abs(ya), std::abs(yb)) <= tol) {
        double xm = x_of(std::abs(ya) < std::abs(yb) ? xs[i] : xs[i + 1]);
        if (xm > -tol && xm < dlen + tol) res.degenerate = true;
      }
      continue;
    }
    double a = xs[i], b = xs[i + 1], fa = ya;
    for (int it = 0; it < 80; ++it) {
      double mid = 0.5 * (a + b);
      double fm = y_of(mid);
      if (fm == 0.0 || b - a < 1e-14 * (1.0 + range)) {
        a = b = mid;
        break;
      }
      if ((fm < 0.0) == (fa < 0.0)) {
        a = mid;
        fa = fm;
      } else {
        b = mid;
      }
    }
    roots.push_back(0.5 * (a + b));
  }

  int count = 0;
  for (double xi : roots) {
    double x = x_of(xi);
    if (std::abs(x - dlen) <= tol) {
      res.point_on_curve = true;
      continue;
    }
    Vec2 pt, tan;
    c.derivatives(xi, 1, pt, tan);
    if (std::abs(xi - lo) * norm(tan) <= tol || std::abs(hi - xi) * norm(tan) <= tol) {
      res.degenerate = true;  // crossing at the contour corner shared with the neighbor
      continue;
    }
    if (x > 0.0 && x < dlen) {
      ++count;
      res.intersections.push_back(pt);
    }
  }
  res.parity = (count % 2 == 1) ? RayParity::kOdd : RayParity::kEven;
  res.used_newton = true;
  return res;
}

}  // namespace

SplineCastResult ray_cast_spline(const SplineSeg& sp, Vec2 p_out, Vec2 p, double tol) {
  SplineCastResult res;
  const Curve2& c = sp.curve;
  Vec2 d = p - p_out;
  double dlen = norm(d);
  if (dlen <= tol) return res;  // zero-length ray: even

  // The count comparison and the Newton seeding both need the reference
  // point outside the convex hull; the bounding box is a conservative
  // stand-in.
  if (c.bounding_box().inflated(tol).contains(p_out))
    return cast_spline_subdivision(sp, p_out, p, tol);

  // A query point inside a span's control hull can sit between the curve
  // piece and its control polygon; the crossing counts cannot tell those
  // apart, so the intersection search must run.
  bool pocket = false;
  for (const Box2& b : sp.span_boxes) {
    if (b.inflated(tol).contains(p)) {
      pocket = true;
      break;
    }
  }

  const auto& cps = c.control_points();
  const int n = static_cast<int>(cps.size());
  Vec2 dir = d / dlen;

  int fin_count = 0;
  std::vector<PolyHit> inf_hits;
  bool unreliable = false;

  auto intersect_control_line = [&](Vec2 s, Vec2 e, int index) {
    Vec2 g = e - s;
    double glen = norm(g);
    if (glen == 0.0) return;
    double denom = cross(dir, g);
    if (std::abs(denom) <= 1e-14 * glen) {
      if (std::abs(cross(g, s - p_out)) <= 1e-12 * glen * (1.0 + dlen)) unreliable = true;
      return;
    }
    double t = cross(s - p_out, g) / denom;  // distance along the infinite ray
    double u = cross(s - p_out, dir) / denom;
    if (t <= 0.0 || u < -1e-9 || u > 1.0 + 1e-9) return;
    if (u <= 1e-9 || u >= 1.0 - 1e-9 || t <= 1e-12) {
      unreliable = true;  // grazing a control point; counts are not trustworthy
      return;
    }
    inf_hits.push_back({index, u});
    if (t < dlen) ++fin_count;
  };

  for (int i = 0; i + 1 < n; ++i) intersect_control_line(cps[i], cps[i + 1], i);
  int inf_polygon = static_cast<int>(inf_hits.size());
  intersect_control_line(sp.close_a, sp.close_b, -1);

  if (unreliable) return cast_spline_subdivision(sp, p_out, p, tol);

  if (!pocket && fin_count == static_cast<int>(inf_hits.size())) {
    // Finite and infinite counts match and the point is clear of every
    // span hull: the parity is already decided, no curve evaluation needed.
    res.parity = (fin_count % 2 == 1) ? RayParity::kOdd : RayParity::kEven;
    return res;
  }

  // Newton on the rotated curve: roots of y(xi) with the ray as the x-axis.
  Vec2 nrm = perp(dir);
  const double lo = c.xi_min(), hi = c.xi_max(), range = hi - lo;
  std::vector<double> roots;
  for (const PolyHit& hit : inf_hits) {
    double xi0, xi1;
    if (hit.line_index < 0) {
      xi0 = sp.cp_params.front();
      xi1 = sp.cp_params.back();
    } else {
      xi0 = sp.cp_params[hit.line_index];
      xi1 = sp.cp_params[hit.line_index + 1];
    }
    double xi = xi0 + (xi1 - xi0) * hit.s;
    bool converged = false;
    for (int it = 0; it < 40; ++it) {
      Vec2 pt, tan;
      c.derivatives(xi, 1, pt, tan);
      double y = dot(nrm, pt - p_out);
      if (std::abs(y) <= 1e-3 * tol) {
        converged = true;
        break;
      }
      double yd = dot(nrm, tan);
      if (yd == 0.0) break;
      double next = std::clamp(xi - y / yd, lo, hi);
      if (next == xi) break;
      xi = next;
    }
    if (!converged) return cast_spline_subdivision(sp, p_out, p, tol);
    bool dup = false;
    for (double r : roots)
      if (std::abs(r - xi) <= 1e-9 * (1.0 + range)) { dup = true; break; }
    if (!dup) roots.push_back(xi);
  }

  res.used_newton = true;
  int count = 0;
  int on_ray = 0;
  for (double xi : roots) {
    Vec2 pt, tan;
    c.derivatives(xi, 1, pt, tan);
    double x = dot(dir, pt - p_out);
    if (x > 0.0) ++on_ray;
    if (std::abs(x - dlen) <= tol) {
      res.point_on_curve = true;
      continue;
    }
    double speed = norm(tan);
    if (std::abs(xi - lo) * speed <= tol || std::abs(hi - xi) * speed <= tol) {
      res.degenerate = true;
      continue;
    }
    if (std::abs(dot(nrm, tan)) <= 1e-7 * speed) {
      res.degenerate = true;  // tangential crossing
      continue;
    }
    if (x > 0.0 && x < dlen) {
      ++count;
      res.intersections.push_back(pt);
    }
  }
  // Variation diminishing: the curve cannot cross the ray more often than
  // its control polygon does.
  assert(on_ray <= inf_polygon);
  // The same property ties the two ray parities together; a mismatch means
  // Newton lost a root.
  if (!res.degenerate && !res.point_on_curve && (on_ray - inf_polygon) % 2 != 0)
    return cast_spline_subdivision(sp, p_out, p, tol);

  res.parity = (count % 2 == 1) ? RayParity::kOdd : RayParity::kEven;
  return res;
}

Vec2 segment_start(const Segment& s) {
  return std::visit(
      [](const auto& v) -> Vec2 {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LineSeg>) return v.a;
        else if constexpr (std::is_same_v<T, ArcSeg>) return arc_point(v, v.start_angle);
        else return v.curve.evaluate(v.curve.xi_min());
      },
      s);
}

Vec2 segment_end(const Segment& s) {
  return std::visit(
      [](const auto& v) -> Vec2 {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LineSeg>) return v.b;
        else if constexpr (std::is_same_v<T, ArcSeg>) return arc_point(v, v.end_angle);
        else return v.curve.evaluate(v.curve.xi_max());
      },
      s);
}

std::vector<Vec2> segment_polyline(const Segment& s, int n_chords) {
  std::vector<Vec2> pts;
  pts.reserve(n_chords + 1);
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LineSeg>) {
          for (int i = 0; i <= n_chords; ++i)
            pts.push_back(v.a + (v.b - v.a) * (double(i) / n_chords));
        } else if constexpr (std::is_same_v<T, ArcSeg>) {
          double sweep = arc_sweep(v) * (v.ccw ? 1.0 : -1.0);
          for (int i = 0; i <= n_chords; ++i)
            pts.push_back(arc_point(v, v.start_angle + sweep * i / n_chords));
        } else {
          double lo = v.curve.xi_min(), hi = v.curve.xi_max();
          for (int i = 0; i <= n_chords; ++i)
            pts.push_back(v.curve.evaluate(lo + (hi - lo) * i / n_chords));
        }
      },
      s);
  return pts;
}

namespace {

// Proper crossing test between two short polyline edges.
bool edges_cross(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  double d1 = cross(b - a, c - a);
  double d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c);
  double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

}  // namespace

Sketch::Sketch(std::vector<Segment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw Error("sketch: no segments");

  box_ = Box2::empty();
  std::vector<std::vector<Vec2>> coarse;
  for (const Segment& s : segments_) {
    coarse.push_back(segment_polyline(s, 64));
    box_.expand(segment_cover_box(s));
  }
  if (box_.diagonal() <= 0.0) throw Error("sketch: degenerate contour");
  tol_ = 1e-9 * diameter();

  const size_t n = segments_.size();
  for (size_t i = 0; i < n; ++i) {
    Vec2 e = segment_end(segments_[i]);
    Vec2 s = segment_start(segments_[(i + 1) % n]);
    if (distance(e, s) > tol_)
      throw Error("sketch: contour is not watertight at segment " + std::to_string(i));
  }

  // Simple-contour validation on the coarse polylines. A segment may not
  // cross itself; neighbors may only meet near their shared endpoint.
  for (size_t i = 0; i < n; ++i) {
    const auto& poly = coarse[i];
    bool closed_seg = distance(poly.front(), poly.back()) <= tol_;
    for (size_t k = 0; k + 1 < poly.size(); ++k) {
      for (size_t l = k + 2; l + 1 < poly.size(); ++l) {
        if (closed_seg && k == 0 && l + 2 == poly.size()) continue;  // seam
        if (edges_cross(poly[k], poly[k + 1], poly[l], poly[l + 1]))
          throw Error("sketch: segment " + std::to_string(i) + " self-intersects");
      }
    }
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      bool adjacent = (j == i + 1) || (i == 0 && j == n - 1) || n == 1;
      const auto& pa = coarse[i];
      const auto& pb = coarse[j];
      // Adjacent pairs may graze near their shared junction(s); a pair of
      // two segments shares both.
      std::vector<Vec2> junctions;
      if (adjacent) {
        if (distance(segment_end(segments_[i]), segment_start(segments_[j])) <= tol_)
          junctions.push_back(segment_end(segments_[i]));
        if (distance(segment_end(segments_[j]), segment_start(segments_[i])) <= tol_)
          junctions.push_back(segment_end(segments_[j]));
      }
      for (size_t k = 0; k + 1 < pa.size(); ++k) {
        for (size_t l = 0; l + 1 < pb.size(); ++l) {
          if (!edges_cross(pa[k], pa[k + 1], pb[l], pb[l + 1])) continue;
          double reach = 4.0 * std::max(distance(pa[k], pa[k + 1]), distance(pb[l], pb[l + 1]));
          bool at_junction = false;
          for (const Vec2& junction : junctions)
            at_junction = at_junction ||
                          point_segment_distance(junction, pa[k], pa[k + 1]) <= reach;
          if (at_junction) continue;
          throw Error("sketch: contour self-intersects between segments " + std::to_string(i) +
                      " and " + std::to_string(j));
        }
      }
    }
  }

  // Reference point: on the extended closing line of the largest spline if
  // there is one, otherwise offset from the box corner. Always outside the
  // bounding box.
  const SplineSeg* best = nullptr;
  double best_area = -1.0;
  for (const Segment& s : segments_) {
    if (const auto* sp = std::get_if<SplineSeg>(&s)) {
      Box2 b = sp->curve.bounding_box();
      double area = (b.hi.x - b.lo.x) * (b.hi.y - b.lo.y);
      if (area > best_area) {
        best_area = area;
        best = sp;
      }
    }
  }
  if (best && distance(best->close_a, best->close_b) > tol_) {
    Vec2 dir = normalized(best->close_b - best->close_a);
    p_out_ = best->close_b + dir * (1.5 * diameter());
  } else {
    p_out_ = box_.lo - Vec2{0.37 * (box_.hi.x - box_.lo.x) + 0.25 * diameter(),
                            0.61 * (box_.hi.y - box_.lo.y) + 0.25 * diameter()};
  }
}

Vec2 Sketch::reference_for_attempt(Vec2 p, int attempt) const {
  if (attempt == 0) return p_out_;
  double radius = norm(p - box_.center()) + diameter() * (0.75 + 0.03 * attempt);
  double angle = 2.399963229728653 * attempt + 0.754877666246693;
  return p + Vec2{radius * std::cos(angle), radius * std::sin(angle)};
}

namespace {

struct ExactResult {
  bool odd = false;
  bool degenerate = false;
  bool boundary = false;
};

ExactResult classify_once(const std::vector<Segment>& segments, Vec2 p, Vec2 p_out, double tol) {
  ExactResult r;
  int total = 0;
  for (const Segment& s : segments) {
    CrossOut c;
    if (const auto* line = std::get_if<LineSeg>(&s)) {
      c = cross_line(p_out, p, line->a, line->b, tol);
    } else if (const auto* arc = std::get_if<ArcSeg>(&s)) {
      c = cross_arc(p_out, p, *arc, tol);
    } else {
      const auto& sp = std::get<SplineSeg>(s);
      SplineCastResult sc = ray_cast_spline(sp, p_out, p, tol);
      c.count = sc.parity == RayParity::kOdd ? 1 : 0;
      c.degenerate = sc.degenerate;
      c.boundary = sc.point_on_curve;
    }
    if (c.boundary) {
      r.boundary = true;
      return r;
    }
    if (c.degenerate) {
      r.degenerate = true;
      return r;
    }
    total += c.count;
  }
  r.odd = (total % 2) == 1;
  return r;
}

}  // namespace

Sketch::ClassifyStats Sketch::classify_retrying(Vec2 p, Vec2 first_reference) const {
  ClassifyStats stats;
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    Vec2 ref = (attempt == 0) ? first_reference : reference_for_attempt(p, attempt);
    ExactResult r = classify_once(segments_, p, ref, tol_);
    stats.retries = attempt;
    if (r.boundary) {
      stats.boundary = true;
      stats.result = Membership::kInside;
      return stats;
    }
    if (!r.degenerate) {
      stats.result = r.odd ? Membership::kInside : Membership::kOutside;
      return stats;
    }
  }
  winding_fallbacks_.fetch_add(1, std::memory_order_relaxed);
  std::cerr << "geocell: sketch ray cast exhausted retries at (" << p.x << ", " << p.y
            << "); falling back to winding test\n";
  stats.winding_fallback = true;
  stats.result = winding_membership(p);
  return stats;
}

Sketch::ClassifyStats Sketch::classify_from(Vec2 p, Vec2 p_out) const {
  return classify_retrying(p, p_out);
}

Vec2 Sketch::reposition_reference(Vec2 p) const {
  ExactResult r = classify_once(segments_, p, p_out_, tol_);
  if (!r.degenerate) return p_out_;
  return reference_for_attempt(p, 1);
}

Membership Sketch::winding_membership(Vec2 p) const {
  // Dense subdivision makes the angle sum immune to the ray degeneracies
  // that brought us here.
  double w = 0.0;
  for (const Segment& s : segments_) {
    std::vector<Vec2> poly = segment_polyline(s, 4096);
    for (size_t i = 0; i + 1 < poly.size(); ++i) {
      Vec2 a = poly[i] - p, b = poly[i + 1] - p;
      w += std::atan2(cross(a, b), dot(a, b));
    }
  }
  return std::abs(w) > kPi ? Membership::kInside : Membership::kOutside;
}

int Sketch::build_quad_rec(Box2 box, int depth, const std::vector<Box2>& covers) const {
  QuadNode node;
  node.box = box;
  bool cut = false;
  for (const Box2& c : covers) {
    if (c.intersects(box)) {
      cut = true;
      break;
    }
  }
  int index = static_cast<int>(quad_.size());
  quad_.push_back(node);
  if (!cut) {
    quad_[index].cls =
        classify_retrying(box.center(), p_out_).result == Membership::kInside ? 0 : 1;
    return index;
  }
  if (depth >= kQuadtreeDepth) {
    quad_[index].cls = 2;
    return index;
  }
  Vec2 mid = box.center();
  quad_[index].cls = 2;
  for (int q = 0; q < 4; ++q) {
    Box2 child;
    child.lo = {q & 1 ? mid.x : box.lo.x, q & 2 ? mid.y : box.lo.y};
    child.hi = {q & 1 ? box.hi.x : mid.x, q & 2 ? box.hi.y : mid.y};
    int c = build_quad_rec(child, depth + 1, covers);
    quad_[index].child[q] = c;
  }
  return index;
}

void Sketch::build_quadtree() const {
  std::vector<Box2> covers;
  for (const Segment& s : segments_) {
    if (const auto* line = std::get_if<LineSeg>(&s)) {
      Box2 b = Box2::empty();
      b.expand(line->a);
      b.expand(line->b);
      covers.push_back(b.inflated(tol_));
    } else if (const auto* arc = std::get_if<ArcSeg>(&s)) {
      covers.push_back(arc_bbox(*arc).inflated(tol_));
    } else {
      // Convex hull property: each span piece stays inside the box of its
      // supporting control points.
      for (const Box2& b : std::get<SplineSeg>(s).span_boxes) covers.push_back(b.inflated(tol_));
    }
  }
  quad_.reserve(1 << (2 * kQuadtreeDepth + 1));
  build_quad_rec(box_.inflated(tol_), 0, covers);
}

int Sketch::quadtree_class(Vec2 p) const {
  std::call_once(quad_once_, [this] { build_quadtree(); });
  if (!quad_[0].box.contains(p)) return 1;
  int idx = 0;
  while (quad_[idx].child[0] >= 0) {
    Vec2 mid = quad_[idx].box.center();
    int q = (p.x >= mid.x ? 1 : 0) | (p.y >= mid.y ? 2 : 0);
    idx = quad_[idx].child[q];
  }
  return quad_[idx].cls;
}

Membership Sketch::contains(Vec2 p) const {
  if (!box_.inflated(tol_).contains(p)) return Membership::kOutside;
  int cls = quadtree_class(p);
  if (cls == 0) return Membership::kInside;
  if (cls == 1) return Membership::kOutside;
  return classify_retrying(p, p_out_).result;
}

double Sketch::signed_distance(Vec2 p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const Segment& s : segments_) {
    if (const auto* line = std::get_if<LineSeg>(&s)) {
      d = std::min(d, point_segment_distance(p, line->a, line->b));
    } else if (const auto* arc = std::get_if<ArcSeg>(&s)) {
      double ang = std::atan2(p.y - arc->center.y, p.x - arc->center.x);
      if (arc_angle_class(*arc, ang, 0.0) == 1)
        d = std::min(d, std::abs(distance(p, arc->center) - arc->radius));
      d = std::min(d, distance(p, arc_point(*arc, arc->start_angle)));
      d = std::min(d, distance(p, arc_point(*arc, arc->end_angle)));
    } else {
      d = std::min(d, std::get<SplineSeg>(s).curve.closest_point(p).distance);
    }
  }
  return contains(p) == Membership::kInside ? d : -d;
}

}  // namespace geocell
