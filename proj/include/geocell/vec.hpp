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

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace geocell {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
  double x = 0.0, y = 0.0;
  static constexpr int kDim = 2;

  constexpr Vec2() = default;
  constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

  double& operator[](int i) { return i == 0 ? x : y; }
  double operator[](int i) const { return i == 0 ? x : y; }

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator-() const { return {-x, -y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
  Vec2& operator-=(Vec2 o) { x -= o.x; y -= o.y; return *this; }
  Vec2& operator*=(double s) { x *= s; y *= s; return *this; }
};

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
  static constexpr int kDim = 3;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(Vec3 o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(Vec3 o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline Vec3 operator*(double s, Vec3 v) { return v * s; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

// z component of the 2D cross product.
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(Vec2 v) { return dot(v, v); }
inline double norm2(Vec3 v) { return dot(v, v); }
inline double norm(Vec2 v) { return std::sqrt(norm2(v)); }
inline double norm(Vec3 v) { return std::sqrt(norm2(v)); }

template <class V>
inline V normalized(V v) {
  double n = norm(v);
  if (n == 0.0) throw Error("normalized: zero vector");
  return v / n;
}

inline Vec2 perp(Vec2 v) { return {-v.y, v.x}; }

template <class V>
inline double distance(V a, V b) {
  return norm(a - b);
}

template <class V>
struct BoxT {
  V lo, hi;

  static BoxT empty() {
    BoxT b;
    for (int i = 0; i < V::kDim; ++i) {
      b.lo[i] = std::numeric_limits<double>::infinity();
      b.hi[i] = -std::numeric_limits<double>::infinity();
    }
    return b;
  }

  bool is_empty() const {
    for (int i = 0; i < V::kDim; ++i)
      if (lo[i] > hi[i]) return true;
    return false;
  }

  void expand(V p) {
    for (int i = 0; i < V::kDim; ++i) {
      lo[i] = std::min(lo[i], p[i]);
      hi[i] = std::max(hi[i], p[i]);
    }
  }

  void expand(const BoxT& o) {
    for (int i = 0; i < V::kDim; ++i) {
      lo[i] = std::min(lo[i], o.lo[i]);
      hi[i] = std::max(hi[i], o.hi[i]);
    }
  }

  BoxT inflated(double r) const {
    BoxT b = *this;
    for (int i = 0; i < V::kDim; ++i) {
      b.lo[i] -= r;
      b.hi[i] += r;
    }
    return b;
  }

  bool contains(V p) const {
    for (int i = 0; i < V::kDim; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }

  bool intersects(const BoxT& o) const {
    for (int i = 0; i < V::kDim; ++i)
      if (hi[i] < o.lo[i] || o.hi[i] < lo[i]) return false;
    return true;
  }

  V center() const { return (lo + hi) * 0.5; }
  V extent() const { return hi - lo; }

  double diagonal() const { return norm(hi - lo); }

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < V::kDim; ++i) v *= hi[i] - lo[i];
    return v;
  }

  static BoxT intersection(const BoxT& a, const BoxT& b) {
    BoxT r;
    for (int i = 0; i < V::kDim; ++i) {
      r.lo[i] = std::max(a.lo[i], b.lo[i]);
      r.hi[i] = std::min(a.hi[i], b.hi[i]);
    }
    return r;
  }
};

using Box2 = BoxT<Vec2>;
using Box3 = BoxT<Vec3>;

}  // namespace geocell
