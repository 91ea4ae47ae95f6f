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

#include <array>
#include <map>
#include <string>
#include <vector>

#include "geocell/body.hpp"
#include "geocell/vec.hpp"

namespace geocell {

struct TriangleSoup {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::map<std::string, std::vector<double>> scalar_channels;   // per vertex
  std::map<std::string, std::vector<Vec3>> vector_channels;
};

double soup_area(const TriangleSoup& soup);
/// Sum of signed tetrahedron volumes; positive for outward-oriented closed
/// surfaces.
double soup_signed_volume(const TriangleSoup& soup);
/// Optional vertex deduplication with `tol` snapping (drops channels).
TriangleSoup weld(const TriangleSoup& soup, double tol);

/// Marching cubes output plus the membership bracket of each vertex on its
/// generating grid edge, kept for bisection refinement.
struct McResult {
  TriangleSoup soup;
  std::vector<Vec3> edge_inside;   // bracket endpoint inside the body
  std::vector<Vec3> edge_outside;  // bracket endpoint outside
};

/// Standard 256-case marching cubes on the binary membership field sampled
/// at the nodes of an (nx x ny x nz)-cell grid; isolevel 0.5, vertices at
/// edge midpoints, consistent outward orientation. Degenerate triangles are
/// dropped.
McResult marching_cubes(const Body& geometry, Box3 box, int nx, int ny, int nz);

/// Moves each vertex onto the membership transition of its generating edge
/// by up to `iterations` bisections. Zero iterations is the identity.
void refine_vertices(McResult& result, const Body& geometry, int iterations);

}  // namespace geocell
