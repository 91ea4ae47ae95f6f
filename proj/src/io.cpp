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

#include "geocell/io.hpp"

#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>

namespace geocell {

namespace {

void print_reals(std::ostream& os, const double* v, int n) {
  char buf[64];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), i + 1 == n ? "%.17g\n" : "%.17g ", v[i]);
    os << buf;
  }
}

}  // namespace

void write_vtk_surface(std::ostream& os, const TriangleSoup& soup, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << soup.vertices.size() << " double\n";
  for (const Vec3& v : soup.vertices) {
    double c[3] = {v.x, v.y, v.z};
    print_reals(os, c, 3);
  }
  os << "CELLS " << soup.triangles.size() << " " << soup.triangles.size() * 4 << "\n";
  for (const auto& t : soup.triangles) os << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "CELL_TYPES " << soup.triangles.size() << "\n";
  for (size_t i = 0; i < soup.triangles.size(); ++i) os << "5\n";

  if (!soup.scalar_channels.empty() || !soup.vector_channels.empty()) {
    os << "POINT_DATA " << soup.vertices.size() << "\n";
    for (const auto& [name, values] : soup.vector_channels) {
      os << "VECTORS " << name << " double\n";
      for (const Vec3& v : values) {
        double c[3] = {v.x, v.y, v.z};
        print_reals(os, c, 3);
      }
    }
    for (const auto& [name, values] : soup.scalar_channels) {
      os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : values) print_reals(os, &v, 1);
    }
  }
}

void write_stl_binary(std::ostream& os, const TriangleSoup& soup) {
  char header[80] = {};
  std::strncpy(header, "geocell binary stl", sizeof(header) - 1);
  os.write(header, 80);
  std::uint32_t n = static_cast<std::uint32_t>(soup.triangles.size());
  os.write(reinterpret_cast<const char*>(&n), 4);
  for (const auto& t : soup.triangles) {
    Vec3 a = soup.vertices[t[0]], b = soup.vertices[t[1]], c = soup.vertices[t[2]];
    Vec3 nrm = cross(b - a, c - a);
    double len = norm(nrm);
    if (len > 0.0) nrm = nrm / len;
    float rec[12] = {static_cast<float>(nrm.x), static_cast<float>(nrm.y),
                     static_cast<float>(nrm.z), static_cast<float>(a.x),
                     static_cast<float>(a.y),   static_cast<float>(a.z),
                     static_cast<float>(b.x),   static_cast<float>(b.y),
                     static_cast<float>(b.z),   static_cast<float>(c.x),
                     static_cast<float>(c.y),   static_cast<float>(c.z)};
    os.write(reinterpret_cast<const char*>(rec), sizeof(rec));
    std::uint16_t attr = 0;
    os.write(reinterpret_cast<const char*>(&attr), 2);
  }
}

OccupancyGrid voxelize(const Body& geometry, Box3 box, int nx, int ny, int nz) {
  if (nx < 1 || ny < 1 || nz < 1) throw Error("voxelize: grid must be at least 1 per axis");
  OccupancyGrid g;
  g.nx = nx;
  g.ny = ny;
  g.nz = nz;
  g.box = box;
  g.data.resize(static_cast<size_t>(nx) * ny * nz);
  Vec3 h{(box.hi.x - box.lo.x) / nx, (box.hi.y - box.lo.y) / ny, (box.hi.z - box.lo.z) / nz};
  size_t idx = 0;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        g.data[idx++] = geometry.contains({box.lo.x + h.x * (i + 0.5), box.lo.y + h.y * (j + 0.5),
                                           box.lo.z + h.z * (k + 0.5)})
                            ? 1
                            : 0;
  return g;
}

namespace {
constexpr char kOccMagic[8] = {'G', 'C', 'O', 'C', '0', '0', '0', '1'};
}

void write_occupancy(std::ostream& os, const OccupancyGrid& grid) {
  os.write(kOccMagic, 8);
  std::int32_t dims[3] = {grid.nx, grid.ny, grid.nz};
  os.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  double box[6] = {grid.box.lo.x, grid.box.lo.y, grid.box.lo.z,
                   grid.box.hi.x, grid.box.hi.y, grid.box.hi.z};
  os.write(reinterpret_cast<const char*>(box), sizeof(box));
  os.write(reinterpret_cast<const char*>(grid.data.data()),
           static_cast<std::streamsize>(grid.data.size()));
}

OccupancyGrid read_occupancy(std::istream& is) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kOccMagic, 8) != 0) throw Error("occupancy: bad magic");
  std::int32_t dims[3];
  is.read(reinterpret_cast<char*>(dims), sizeof(dims));
  double box[6];
  is.read(reinterpret_cast<char*>(box), sizeof(box));
  OccupancyGrid g;
  g.nx = dims[0];
  g.ny = dims[1];
  g.nz = dims[2];
  g.box.lo = {box[0], box[1], box[2]};
  g.box.hi = {box[3], box[4], box[5]};
  g.data.resize(static_cast<size_t>(g.nx) * g.ny * g.nz);
  is.read(reinterpret_cast<char*>(g.data.data()), static_cast<std::streamsize>(g.data.size()));
  if (!is) throw Error("occupancy: truncated file");
  return g;
}

}  // namespace geocell
