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

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "geocell/body.hpp"
#include "geocell/surface.hpp"

namespace geocell {

/// Legacy ASCII VTK unstructured grid of triangles with the soup's point
/// data channels; 17 significant digits, fixed ordering.
void write_vtk_surface(std::ostream& os, const TriangleSoup& soup,
                       const std::string& title = "geocell surface");

/// Binary little-endian STL.
void write_stl_binary(std::ostream& os, const TriangleSoup& soup);

struct OccupancyGrid {
  int nx = 0, ny = 0, nz = 0;
  Box3 box;
  std::vector<std::uint8_t> data;  // x fastest, then y, then z

  std::uint8_t at(int i, int j, int k) const {
    return data[(static_cast<size_t>(k) * ny + j) * nx + i];
  }
};

/// Membership sampled at voxel centers.
OccupancyGrid voxelize(const Body& geometry, Box3 box, int nx, int ny, int nz);

void write_occupancy(std::ostream& os, const OccupancyGrid& grid);
OccupancyGrid read_occupancy(std::istream& is);

}  // namespace geocell
