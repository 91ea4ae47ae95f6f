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

#include "geocell/surface.hpp"

#include <cmath>
#include <unordered_map>

namespace geocell {

namespace mc_tables {
extern const int kEdgeTable[256];
extern const int kTriTable[256][16];
}  // namespace mc_tables

namespace {

// Corner offsets and edge endpoints matching the case tables.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 0, 1}, {0, 0, 1},
                               {0, 1, 0}, {1, 1, 0}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                              {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

double triangle_area(Vec3 a, Vec3 b, Vec3 c) { return 0.5 * norm(cross(b - a, c - a)); }

}  // namespace

double soup_area(const TriangleSoup& soup) {
  double area = 0.0;
  for (const auto& t : soup.triangles)
    area += triangle_area(soup.vertices[t[0]], soup.vertices[t[1]], soup.vertices[t[2]]);
  return area;
}

double soup_signed_volume(const TriangleSoup& soup) {
  double vol = 0.0;
  for (const auto& t : soup.triangles) {
    const Vec3& a = soup.vertices[t[0]];
    const Vec3& b = soup.vertices[t[1]];
    const Vec3& c = soup.vertices[t[2]];
    vol += dot(a, cross(b, c)) / 6.0;
  }
  return vol;
}

TriangleSoup weld(const TriangleSoup& soup, double tol) {
  TriangleSoup out;
  if (tol <= 0.0) tol = 1e-12;
  auto key_of = [&](Vec3 v) {
    auto q = [&](double x) { return static_cast<long long>(std::floor(x / tol + 0.5)); };
    return std::to_string(q(v.x)) + "_" + std::to_string(q(v.y)) + "_" + std::to_string(q(v.z));
  };
  std::unordered_map<std::string, int> index;
  std::vector<int> remap(soup.vertices.size());
  for (size_t i = 0; i < soup.vertices.size(); ++i) {
    std::string key = key_of(soup.vertices[i]);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, static_cast<int>(out.vertices.size())).first;
      out.vertices.push_back(soup.vertices[i]);
    }
    remap[i] = it->second;
  }
  for (const auto& t : soup.triangles) {
    std::array<int, 3> m{remap[t[0]], remap[t[1]], remap[t[2]]};
    if (m[0] == m[1] || m[1] == m[2] || m[0] == m[2]) continue;
    out.triangles.push_back(m);
  }
  return out;
}

McResult marching_cubes(const Body& geometry, Box3 box, int nx, int ny, int nz) {
  if (nx < 2 || ny < 2 || nz < 2) throw Error("marching cubes: resolution must be at least 2");
  McResult result;
  Vec3 ext = box.extent();
  Vec3 h{ext.x / nx, ext.y / ny, ext.z / nz};

  // Membership at grid nodes; slab-major order keeps the output stable.
  const int sx = nx + 1, sy = ny + 1;
  std::vector<char> field(static_cast<size_t>(sx) * sy * (nz + 1));
  auto at = [&](int i, int j, int k) -> char& {
    return field[(static_cast<size_t>(k) * sy + j) * sx + i];
  };
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        at(i, j, k) =
            geometry.contains({box.lo.x + h.x * i, box.lo.y + h.y * j, box.lo.z + h.z * k}) ? 1 : 0;

  auto node_pos = [&](int i, int j, int k) {
    return Vec3{box.lo.x + h.x * i, box.lo.y + h.y * j, box.lo.z + h.z * k};
  };

  const double min_area = 1e-14 * norm2(h);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        char corner_val[8];
        for (int c = 0; c < 8; ++c)
          corner_val[c] = at(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]);
        int cube_index = 0;
        for (int c = 0; c < 8; ++c)
          if (!corner_val[c]) cube_index |= 1 << c;  // below the 0.5 isolevel = outside
        if (mc_tables::kEdgeTable[cube_index] == 0) continue;

        Vec3 edge_vertex[12];
        Vec3 edge_in[12], edge_out[12];
        for (int e = 0; e < 12; ++e) {
          if (!(mc_tables::kEdgeTable[cube_index] & (1 << e))) continue;
          int c0 = kEdge[e][0], c1 = kEdge[e][1];
          Vec3 p0 = node_pos(i + kCorner[c0][0], j + kCorner[c0][1], k + kCorner[c0][2]);
          Vec3 p1 = node_pos(i + kCorner[c1][0], j + kCorner[c1][1], k + kCorner[c1][2]);
          edge_vertex[e] = (p0 + p1) * 0.5;  // binary field: midpoint placement
          if (corner_val[c0]) {
            edge_in[e] = p0;
            edge_out[e] = p1;
          } else {
            edge_in[e] = p1;
            edge_out[e] = p0;
          }
        }

        const int* tri = mc_tables::kTriTable[cube_index];
        for (int t = 0; tri[t] != -1; t += 3) {
          Vec3 a = edge_vertex[tri[t]], b = edge_vertex[tri[t + 1]], c = edge_vertex[tri[t + 2]];
          if (triangle_area(a, b, c) <= min_area) continue;
          int base = static_cast<int>(result.soup.vertices.size());
          for (int v = 0; v < 3; ++v) {
            int e = tri[t + v];
            result.soup.vertices.push_back(edge_vertex[e]);
            result.edge_inside.push_back(edge_in[e]);
            result.edge_outside.push_back(edge_out[e]);
          }
          result.soup.triangles.push_back({base, base + 1, base + 2});
        }
      }

  // Fix the global orientation to outward (positive enclosed volume).
  if (soup_signed_volume(result.soup) < 0.0)
    for (auto& t : result.soup.triangles) std::swap(t[1], t[2]);
  return result;
}

void refine_vertices(McResult& result, const Body& geometry, int iterations) {
  if (iterations <= 0) return;
  for (size_t v = 0; v < result.soup.vertices.size(); ++v) {
    Vec3 in = result.edge_inside[v];
    Vec3 out = result.edge_outside[v];
    for (int it = 0; it < iterations; ++it) {
      Vec3 mid = (in + out) * 0.5;
      if (geometry.contains(mid))
        in = mid;
      else
        out = mid;
    }
    result.soup.vertices[v] = (in + out) * 0.5;
  }
}

}  // namespace geocell
