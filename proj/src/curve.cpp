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

#include <algorithm>
#include <cmath>

namespace geocell {

namespace {
constexpr int kPolygonSamplesPerSpan = 16;
constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonStepTol = 1e-12;  // scaled by the knot range
constexpr double kStationarityTol = 1e-10;
constexpr double kTieTol = 1e-8;
}  // namespace

template <class V>
CurveT<V>::CurveT(int degree, std::vector<double> knots, std::vector<V> control_points)
    : CurveT(degree, std::move(knots), std::move(control_points), {}) {}

template <class V>
CurveT<V>::CurveT(int degree, std::vector<double> knots, std::vector<V> control_points,
                  std::vector<double> weights)
    : degree_(degree),
      knots_(std::move(knots)),
      points_(std::move(control_points)),
      weights_(std::move(weights)) {
  if (degree_ < 0) throw Error("curve: negative degree");
  if (weights_.empty()) weights_.assign(points_.size(), 1.0);
  if (knots_.size() != points_.size() + degree_ + 1)
    throw Error("curve: knot count must equal control points + degree + 1");
  if (weights_.size() != points_.size())
    throw Error("curve: one weight per control point required");
  for (size_t i = 1; i < knots_.size(); ++i)
    if (knots_[i] < knots_[i - 1]) throw Error("curve: knots must be non-decreasing");
  for (double w : weights_)
    if (!(w > 0.0)) throw Error("curve: weights must be positive");
  // Clamped (open) convention: end knots repeated degree+1 times.
  for (int i = 0; i <= degree_; ++i) {
    if (knots_[i] != knots_.front() || knots_[knots_.size() - 1 - i] != knots_.back())
      throw Error("curve: knot vector must be clamped");
  }
  if (xi_span() <= 0.0) throw Error("curve: empty parameter range");

  poly_xi_.push_back(xi_min());
  for (size_t i = degree_; i + degree_ + 1 < knots_.size(); ++i) {
    double a = knots_[i], b = knots_[i + 1];
    if (b <= a) continue;
    for (int k = 1; k <= kPolygonSamplesPerSpan; ++k)
      poly_xi_.push_back(a + (b - a) * k / kPolygonSamplesPerSpan);
  }
  poly_pt_.reserve(poly_xi_.size());
  for (double xi : poly_xi_) poly_pt_.push_back(evaluate(xi));
  for (const V& p : poly_pt_) box_.expand(p);
  for (const V& p : points_) box_.expand(p);  // convex hull bounds the curve

  closed_ = distance(points_.front(), points_.back()) <= 1e-9 * (1.0 + box_.diagonal());
}

template <class V>
int CurveT<V>::find_span(double xi) const {
  const int n = static_cast<int>(points_.size()) - 1;
  if (xi >= knots_[n + 1]) return n;
  if (xi <= knots_[degree_]) return degree_;
  auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, xi);
  return static_cast<int>(it - knots_.begin()) - 1;
}

// Non-vanishing basis functions and derivatives at `xi` (Cox-de Boor
// recursion). `out` is laid out as (n_derivs+1) rows of (degree+1) values.
template <class V>
void CurveT<V>::basis_funs(int span, double xi, int n_derivs, double* out) const {
  const int p = degree_;
  std::vector<double> ndu((p + 1) * (p + 1)), left(p + 1), right(p + 1);
  auto NDU = [&](int i, int j) -> double& { return ndu[i * (p + 1) + j]; };
  NDU(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = xi - knots_[span + 1 - j];
    right[j] = knots_[span + j] - xi;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      NDU(j, r) = right[r + 1] + left[j - r];
      double temp = NDU(r, j - 1) / NDU(j, r);
      NDU(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    NDU(j, j) = saved;
  }
  for (int j = 0; j <= p; ++j) out[j] = NDU(j, p);
  if (n_derivs == 0) return;

  std::vector<double> a(2 * (p + 1));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a[0] = 1.0;
    for (int k = 1; k <= n_derivs; ++k) {
      double d = 0.0;
      int rk = r - k, pk = p - k;
      if (r >= k) {
        a[s2 * (p + 1)] = a[s1 * (p + 1)] / NDU(pk + 1, rk);
        d = a[s2 * (p + 1)] * NDU(rk, pk);
      }
      int j1 = (rk >= -1) ? 1 : -rk;
      int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2 * (p + 1) + j] =
            (a[s1 * (p + 1) + j] - a[s1 * (p + 1) + j - 1]) / NDU(pk + 1, rk + j);
        d += a[s2 * (p + 1) + j] * NDU(rk + j, pk);
      }
      if (r <= pk) {
        a[s2 * (p + 1) + k] = -a[s1 * (p + 1) + k - 1] / NDU(pk + 1, r);
        d += a[s2 * (p + 1) + k] * NDU(r, pk);
      }
      out[k * (p + 1) + r] = d;
      std::swap(s1, s2);
    }
  }
  double r = p;
  for (int k = 1; k <= n_derivs; ++k) {
    for (int j = 0; j <= p; ++j) out[k * (p + 1) + j] *= r;
    r *= (p - k);
  }
}

// Derivatives of the homogeneous curve (weighted points and weight).
template <class V>
void CurveT<V>::homogeneous_derivs(double xi, int order, V* a, double* w) const {
  eval_count_.fetch_add(1, std::memory_order_relaxed);
  const int p = degree_;
  const int span = find_span(xi);
  std::vector<double> basis((order + 1) * (p + 1));
  basis_funs(span, xi, order, basis.data());
  for (int k = 0; k <= order; ++k) {
    a[k] = V{};
    w[k] = 0.0;
    for (int j = 0; j <= p; ++j) {
      int idx = span - p + j;
      double b = basis[k * (p + 1) + j] * weights_[idx];
      a[k] += points_[idx] * b;
      w[k] += b;
    }
  }
}

template <class V>
V CurveT<V>::evaluate(double xi) const {
  const double eps = 1e-12 * (1.0 + std::abs(xi_span()));
  if (xi < xi_min() - eps || xi > xi_max() + eps)
    throw Error("curve: parameter outside knot range");
  xi = std::clamp(xi, xi_min(), xi_max());
  V a[1];
  double w[1];
  homogeneous_derivs(xi, 0, a, w);
  return a[0] / w[0];
}

template <class V>
bool CurveT<V>::c2_unavailable_near(double xi) const {
  // Interior knot of multiplicity >= degree within a finite-difference step.
  const double h = 2e-6 * xi_span();
  size_t i = degree_ + 1;
  while (i < knots_.size() - degree_ - 1) {
    size_t j = i;
    while (j + 1 < knots_.size() && knots_[j + 1] == knots_[i]) ++j;
    int mult = static_cast<int>(j - i + 1);
    if (mult >= degree_ && std::abs(knots_[i] - xi) <= h) return true;
    i = j + 1;
  }
  return false;
}

template <class V>
void CurveT<V>::derivatives(double xi, int order, V& point, V& d1, V* d2) const {
  if (order < 1 || order > 2) throw Error("curve: derivative order must be 1 or 2");
  const double eps = 1e-12 * (1.0 + std::abs(xi_span()));
  if (xi < xi_min() - eps || xi > xi_max() + eps)
    throw Error("curve: parameter outside knot range");
  xi = std::clamp(xi, xi_min(), xi_max());

  V a[3];
  double w[3];
  homogeneous_derivs(xi, order, a, w);
  point = a[0] / w[0];
  d1 = (a[1] - point * w[1]) / w[0];
  if (order == 2 && d2) {
    if (c2_unavailable_near(xi)) {
      // C2 does not exist at the knot itself; a centered difference of the
      // first derivative gives the usable average.
      double h = 1e-6 * xi_span();
      double lo = std::max(xi_min(), xi - h), hi = std::min(xi_max(), xi + h);
      V pl, dl, ph, dh;
      derivatives(lo, 1, pl, dl);
      derivatives(hi, 1, ph, dh);
      *d2 = (dh - dl) / (hi - lo);
    } else {
      *d2 = (a[2] - d1 * (2.0 * w[1]) - point * w[2]) / w[0];
    }
  }
}

template <class V>
ClosestPointT<V> CurveT<V>::closest_point(V p) const {
  const double range = xi_span();
  const double lo = xi_min(), hi = xi_max();

  // Newton on f(xi) = C'(xi) . (p - C(xi)) from one seed; returns the final
  // parameter or NaN when it fails to settle.
  auto refine = [&](double xi0) -> double {
    double xi = xi0;
    for (int it = 0; it < kNewtonMaxIter; ++it) {
      V c, cd, cdd;
      derivatives(xi, 2, c, cd, &cdd);
      V r = p - c;
      double f = dot(cd, r);
      double scale = norm(cd) * (1.0 + norm(r));
      if (std::abs(f) <= kStationarityTol * scale) return xi;
      double fprime = dot(cdd, r) - norm2(cd);
      if (fprime == 0.0) return std::numeric_limits<double>::quiet_NaN();
      double step = f / fprime;
      double next = std::clamp(xi - step, lo, hi);
      if (std::abs(next - xi) < kNewtonStepTol * range) {
        xi = next;
        V c2, cd2;
        derivatives(xi, 1, c2, cd2);
        double f2 = dot(cd2, p - c2);
        if (std::abs(f2) <= kStationarityTol * norm(cd2) * (1.0 + norm(p - c2))) return xi;
        // Stalled at a clamped boundary is still a legal endpoint minimum.
        if (xi == lo || xi == hi) return xi;
        return std::numeric_limits<double>::quiet_NaN();
      }
      xi = next;
    }
    return std::numeric_limits<double>::quiet_NaN();
  };

  // Seed from every local minimum of the polygon distances plus both ends.
  const size_t m = poly_xi_.size();
  std::vector<double> dist(m);
  for (size_t i = 0; i < m; ++i) dist[i] = distance(poly_pt_[i], p);
  size_t best_sample = 0;
  for (size_t i = 1; i < m; ++i)
    if (dist[i] < dist[best_sample]) best_sample = i;

  std::vector<double> candidates;  // converged parameters
  bool any_converged = false;
  for (size_t i = 0; i < m; ++i) {
    bool local_min = (i == 0 || dist[i] <= dist[i - 1]) && (i + 1 == m || dist[i] <= dist[i + 1]);
    if (!local_min) continue;
    double xi = refine(poly_xi_[i]);
    if (std::isnan(xi)) continue;
    any_converged = true;
    candidates.push_back(xi);
  }
  candidates.push_back(lo);
  candidates.push_back(hi);

  ClosestPointT<V> result;
  if (!any_converged) {
    result.status = ProjectionStatus::kReduced;
    result.xi = poly_xi_[best_sample];
    result.point = poly_pt_[best_sample];
    result.distance = dist[best_sample];
    result.ties = {result.xi};
    return result;
  }

  double d_min = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> evaluated;  // (xi, distance)
  for (double xi : candidates) {
    double d = distance(evaluate(xi), p);
    evaluated.emplace_back(xi, d);
    d_min = std::min(d_min, d);
  }
  // Never worse than the seeding grid.
  if (dist[best_sample] < d_min) {
    evaluated.emplace_back(poly_xi_[best_sample], dist[best_sample]);
    d_min = dist[best_sample];
  }

  const double tie_band = kTieTol * (1.0 + d_min);
  std::vector<double> ties;
  for (auto& [xi, d] : evaluated) {
    if (d - d_min > tie_band) continue;
    bool dup = false;
    for (double t : ties)
      if (std::abs(t - xi) <= 1e-9 * (1.0 + range)) { dup = true; break; }
    if (!dup) ties.push_back(xi);
  }
  // A closed curve meets itself at the seam; report the seam once.
  if (closed_ && ties.size() > 1) {
    bool has_lo = false, has_hi = false;
    for (double t : ties) {
      if (std::abs(t - lo) <= 1e-9 * (1.0 + range)) has_lo = true;
      if (std::abs(t - hi) <= 1e-9 * (1.0 + range)) has_hi = true;
    }
    if (has_lo && has_hi)
      ties.erase(std::remove_if(ties.begin(), ties.end(),
                                [&](double t) { return std::abs(t - hi) <= 1e-9 * (1.0 + range); }),
                 ties.end());
  }
  std::sort(ties.begin(), ties.end());

  result.xi = ties.front();
  double best_d = std::numeric_limits<double>::infinity();
  for (double t : ties) {
    double d = distance(evaluate(t), p);
    if (d < best_d) {
      best_d = d;
      result.xi = t;
    }
  }
  result.distance = best_d;
  result.point = evaluate(result.xi);
  result.ties = std::move(ties);
  return result;
}

Curve3 make_circle_path(Vec3 center, double radius, Vec3 u, Vec3 v) {
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<double> knots = {0, 0, 0, 1, 1, 2, 2, 3, 3, 4, 4, 4};
  std::vector<Vec3> pts;
  std::vector<double> w;
  const double r = radius;
  const double cu[9] = {1, 1, 0, -1, -1, -1, 0, 1, 1};
  const double cv[9] = {0, 1, 1, 1, 0, -1, -1, -1, 0};
  for (int i = 0; i < 9; ++i) {
    pts.push_back(center + u * (r * cu[i]) + v * (r * cv[i]));
    w.push_back(i % 2 == 0 ? 1.0 : s);
  }
  return Curve3(2, std::move(knots), std::move(pts), std::move(w));
}

Curve3 make_line_path(Vec3 a, Vec3 b) {
  return Curve3(1, {0, 0, 1, 1}, {a, b});
}

template class CurveT<Vec2>;
template class CurveT<Vec3>;

}  // namespace geocell
