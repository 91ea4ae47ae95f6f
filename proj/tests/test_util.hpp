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

#include <cmath>
#include <random>
#include <vector>

#include "geocell/curve.hpp"
#include "geocell/sketch.hpp"

namespace geocell::testutil {

// Helical sweep path of the coil-spring model: degree 2, double interior
// knots, alternating weights 1 and 1/sqrt(2), three turns rising to z = 24.
inline Curve3 coil_path() {
  std::vector<double> knots = {0, 0, 0};
  for (int k = 1; k <= 11; ++k) {
    knots.push_back(k);
    knots.push_back(k);
  }
  knots.push_back(12);
  knots.push_back(12);
  knots.push_back(12);

  const double xs[8] = {10, 10, 0, -10, -10, -10, 0, 10};
  const double ys[8] = {0, 10, 10, 10, 0, -10, -10, -10};
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<Vec3> pts;
  std::vector<double> w;
  for (int i = 0; i < 25; ++i) {
    pts.push_back({xs[i % 8], ys[i % 8], static_cast<double>(i)});
    w.push_back(i % 2 == 0 ? 1.0 : s);
  }
  return Curve3(2, std::move(knots), std::move(pts), std::move(w));
}

// Circle of radius 1 around the sketch origin, one full arc segment.
inline Sketch circle_sketch(double radius = 1.0) {
  return Sketch({ArcSeg{{0, 0}, radius, 0.0, 0.0, true}});
}

inline Sketch rectangle_sketch(double half_x, double half_y) {
  return Sketch({LineSeg{{-half_x, -half_y}, {half_x, -half_y}},
                 LineSeg{{half_x, -half_y}, {half_x, half_y}},
                 LineSeg{{half_x, half_y}, {-half_x, half_y}},
                 LineSeg{{-half_x, half_y}, {-half_x, -half_y}}});
}

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& gen, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(gen);
}

}  // namespace geocell::testutil
