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

#include "geocell/fcm.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_map>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "geocell/fcm_basis.hpp"

namespace geocell {

double SymmetricTensor::von_mises() const {
  double sxx = v[0], syy = v[1], szz = v[2], sxy = v[3], syz = v[4], szx = v[5];
  return std::sqrt(0.5 * ((sxx - syy) * (sxx - syy) + (syy - szz) * (syy - szz) +
                          (szz - sxx) * (szz - sxx)) +
                   3.0 * (sxy * sxy + syz * syz + szx * szx));
}

namespace {

struct Lame {
  double lambda, mu;
};

Lame lame_constants(const Material& m) {
  if (m.poisson_ratio <= -1.0 || m.poisson_ratio >= 0.5)
    throw Error("fcm: poisson ratio out of range");
  double e = m.youngs_modulus, nu = m.poisson_ratio;
  return {e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu)), e / (2.0 * (1.0 + nu))};
}

// Global scalar-mode identity. kind: 0 vertex, 1 edge, 2 face, 3 interior.
struct ModeKey {
  std::uint8_t kind = 0;
  std::uint8_t axis = 0;
  int pos[3] = {0, 0, 0};
  std::uint8_t order[3] = {0, 0, 0};

  std::uint64_t pack() const {
    return (std::uint64_t(kind) << 62) | (std::uint64_t(axis) << 60) |
           (std::uint64_t(pos[0] & 0xffff) << 44) | (std::uint64_t(pos[1] & 0xffff) << 28) |
           (std::uint64_t(pos[2] & 0xffff) << 12) | (std::uint64_t(order[0] & 0xf) << 8) |
           (std::uint64_t(order[1] & 0xf) << 4) | std::uint64_t(order[2] & 0xf);
  }
};

ModeKey classify_mode(int cx, int cy, int cz, int mx, int my, int mz) {
  const int c[3] = {cx, cy, cz};
  const int m[3] = {mx, my, mz};
  int bubbles = 0;
  for (int d = 0; d < 3; ++d) bubbles += m[d] >= 2 ? 1 : 0;
  ModeKey key;
  for (int d = 0; d < 3; ++d) key.pos[d] = m[d] < 2 ? c[d] + m[d] : c[d];
  switch (bubbles) {
    case 0:
      key.kind = 0;
      break;
    case 1:
      key.kind = 1;
      for (int d = 0; d < 3; ++d)
        if (m[d] >= 2) {
          key.axis = static_cast<std::uint8_t>(d);
          key.order[0] = static_cast<std::uint8_t>(m[d]);
        }
      break;
    case 2: {
      key.kind = 2;
      int o = 0;
      for (int d = 0; d < 3; ++d) {
        if (m[d] < 2)
          key.axis = static_cast<std::uint8_t>(d);  // face normal
        else
          key.order[o++] = static_cast<std::uint8_t>(m[d]);
      }
      break;
    }
    default:
      key.kind = 3;
      for (int d = 0; d < 3; ++d) key.order[d] = static_cast<std::uint8_t>(m[d]);
      break;
  }
  return key;
}

}  // namespace

FcmModel::FcmModel(FcmConfig config, std::shared_ptr<const Body> geometry)
    : config_(config), geometry_(std::move(geometry)) {
  if (config_.nx < 1 || config_.ny < 1 || config_.nz < 1) throw Error("fcm: empty grid");
  if (config_.p < 1 || config_.p > kMaxShapeDegree) throw Error("fcm: degree must be in [1, 8]");
  if (config_.gauss_order == 0) config_.gauss_order = config_.p + 1;
  if (config_.threads < 1) config_.threads = 1;
  build_cells();
  build_dof_map();
  rhs_.assign(n_dofs_, 0.0);
}

void FcmModel::build_cells() {
  const int nx = config_.nx, ny = config_.ny, nz = config_.nz;
  Vec3 h{(config_.box.hi.x - config_.box.lo.x) / nx, (config_.box.hi.y - config_.box.lo.y) / ny,
         (config_.box.hi.z - config_.box.lo.z) / nz};

  struct Raw {
    Box3 box;
    std::unique_ptr<Partition3> partition;
  };
  std::vector<Raw> raw(static_cast<size_t>(nx) * ny * nz);

  auto worker = [&](int begin, int end) {
    for (int lin = begin; lin < end; ++lin) {
      int ix = lin % nx, iy = (lin / nx) % ny, iz = lin / (nx * ny);
      Box3 cb;
      cb.lo = {config_.box.lo.x + h.x * ix, config_.box.lo.y + h.y * iy,
               config_.box.lo.z + h.z * iz};
      cb.hi = {config_.box.lo.x + h.x * (ix + 1), config_.box.lo.y + h.y * (iy + 1),
               config_.box.lo.z + h.z * (iz + 1)};
      raw[lin].box = cb;
      raw[lin].partition = std::make_unique<Partition3>(
          cb, [this](Vec3 p) { return geometry_->contains(p); }, config_.k_max);
    }
  };
  const int total = nx * ny * nz;
  if (config_.threads <= 1) {
    worker(0, total);
  } else {
    std::vector<std::thread> pool;
    int per = (total + config_.threads - 1) / config_.threads;
    for (int t = 0; t < config_.threads; ++t)
      pool.emplace_back(worker, std::min(t * per, total), std::min((t + 1) * per, total));
    for (auto& th : pool) th.join();
  }

  cell_index_.assign(total, -1);
  for (int lin = 0; lin < total; ++lin) {
    if (!raw[lin].partition->any_physical()) continue;  // deactivated, carries no dofs
    Cell cell;
    cell.ix = lin % nx;
    cell.iy = (lin / nx) % ny;
    cell.iz = lin / (nx * ny);
    cell.box = raw[lin].box;
    cell.partition = std::move(raw[lin].partition);
    cell_index_[lin] = static_cast<int>(cells_.size());
    cells_.push_back(std::move(cell));
  }
  active_count_ = static_cast<int>(cells_.size());
  if (active_count_ == 0) throw Error("fcm: no cell intersects the physical domain");
}

void FcmModel::build_dof_map() {
  const int n1 = mode_count_1d();
  std::unordered_map<std::uint64_t, int> ids;
  ids.reserve(cells_.size() * modes_per_cell());
  for (Cell& cell : cells_) {
    cell.scalar_dofs.reserve(modes_per_cell());
    for (int mz = 0; mz < n1; ++mz)
      for (int my = 0; my < n1; ++my)
        for (int mx = 0; mx < n1; ++mx) {
          std::uint64_t key = classify_mode(cell.ix, cell.iy, cell.iz, mx, my, mz).pack();
          auto [it, inserted] = ids.emplace(key, static_cast<int>(ids.size()));
          cell.scalar_dofs.push_back(it->second);
        }
  }
  n_scalar_ = ids.size();
  n_dofs_ = 3 * n_scalar_;
}

void FcmModel::add_dirichlet(const DirichletBc& bc) {
  const int n_axis[3] = {config_.nx, config_.ny, config_.nz};
  const int a = bc.face.axis;
  if (a < 0 || a > 2 || bc.face.plane < 0 || bc.face.plane > n_axis[a])
    throw Error("fcm: dirichlet face out of range");
  for (const auto& v : bc.value)
    if (v && !std::isfinite(*v)) throw Error("fcm: dirichlet value not finite");

  Vec3 h{(config_.box.hi.x - config_.box.lo.x) / config_.nx,
         (config_.box.hi.y - config_.box.lo.y) / config_.ny,
         (config_.box.hi.z - config_.box.lo.z) / config_.nz};

  const int n1 = mode_count_1d();
  for (const Cell& cell : cells_) {
    const int c[3] = {cell.ix, cell.iy, cell.iz};
    int mode = 0;
    for (int mz = 0; mz < n1; ++mz)
      for (int my = 0; my < n1; ++my)
        for (int mx = 0; mx < n1; ++mx, ++mode) {
          const int m[3] = {mx, my, mz};
          // The mode lives on the plane iff it is nodal across `a` at the
          // plane index; bubbles across `a` reach into the cell.
          if (m[a] >= 2 || c[a] + m[a] != bc.face.plane) continue;
          bool nodal = m[0] < 2 && m[1] < 2 && m[2] < 2;
          int scalar = cell.scalar_dofs[mode];
          Vec3 pos{config_.box.lo.x + h.x * (c[0] + (m[0] < 2 ? m[0] : 0)),
                   config_.box.lo.y + h.y * (c[1] + (m[1] < 2 ? m[1] : 0)),
                   config_.box.lo.z + h.z * (c[2] + (m[2] < 2 ? m[2] : 0))};
          for (int comp = 0; comp < 3; ++comp) {
            if (!bc.value[comp]) continue;
            double target =
                nodal ? *bc.value[comp] + dot(bc.gradient[comp], pos) : 0.0;
            constraints_[scalar * 3 + comp] = target;
          }
        }
  }
}

std::vector<double> FcmModel::element_stiffness(const Cell& cell) const {
  const int n1 = mode_count_1d();
  const int n_modes = modes_per_cell();
  const int m_dofs = 3 * n_modes;
  const int g = config_.gauss_order;
  const Lame lame = lame_constants(config_.material);
  const double alpha_out = std::isinf(config_.q) ? 0.0 : std::pow(10.0, -config_.q);
  const GaussRule& rule = gauss_rule(g);

  Vec3 h = cell.box.extent();
  const double scale_d[3] = {2.0 / h.x, 2.0 / h.y, 2.0 / h.z};
  const double cell_jac = h.x * h.y * h.z / 8.0;

  std::vector<double> ke(static_cast<size_t>(m_dofs) * m_dofs, 0.0);
  // Nine mode-pair Gram matrices E_ab[I][J] = integral of dN_I/da dN_J/db.
  std::vector<double> e_ab(static_cast<size_t>(9) * n_modes * n_modes, 0.0);
  auto eab = [&](int a, int b) { return e_ab.data() + (a * 3 + b) * n_modes * n_modes; };

  auto fold_into_ke = [&]() {
    for (int i = 0; i < n_modes; ++i)
      for (int j = i; j < n_modes; ++j) {
        double e[3][3], trace = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) e[a][b] = eab(a, b)[i * n_modes + j];
        trace = e[0][0] + e[1][1] + e[2][2];
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            double v = lame.lambda * e[a][b] + lame.mu * e[b][a];
            if (a == b) v += lame.mu * trace;
            ke[(3 * i + a) * static_cast<size_t>(m_dofs) + 3 * j + b] += v;
            if (i != j) ke[(3 * j + b) * static_cast<size_t>(m_dofs) + 3 * i + a] += v;
          }
      }
    std::fill(e_ab.begin(), e_ab.end(), 0.0);
  };

  // 1D shape tables on a leaf interval [a, b] (cell-local coordinates).
  std::vector<double> vals(static_cast<size_t>(3) * g * n1), ders(static_cast<size_t>(3) * g * n1);
  auto val_at = [&](int d, int k, int i) { return vals[(d * g + k) * n1 + i]; };
  auto der_at = [&](int d, int k, int i) { return ders[(d * g + k) * n1 + i]; };

  std::vector<double> grads(static_cast<size_t>(3) * n_modes);
  std::vector<double> s0(static_cast<size_t>(3) * n1 * n1), s1(static_cast<size_t>(3) * n1 * n1),
      sd(static_cast<size_t>(3) * n1 * n1);

  cell.partition->for_each_leaf([&](const PartitionNodeT<Vec3>& leaf) {
    double alpha_leaf = 1.0;
    if (leaf.cls == CellClass::kOutside) {
      if (alpha_out == 0.0) return;
      alpha_leaf = alpha_out;
    }

    // Leaf interval in cell-local coordinates per axis.
    double lo_xi[3], hi_xi[3];
    for (int d = 0; d < 3; ++d) {
      lo_xi[d] = 2.0 * (leaf.box.lo[d] - cell.box.lo[d]) / h[d] - 1.0;
      hi_xi[d] = 2.0 * (leaf.box.hi[d] - cell.box.lo[d]) / h[d] - 1.0;
    }

    for (int d = 0; d < 3; ++d) {
      double mid = 0.5 * (lo_xi[d] + hi_xi[d]), half = 0.5 * (hi_xi[d] - lo_xi[d]);
      for (int k = 0; k < g; ++k) {
        double xi = mid + half * rule.x[k];
        shape_functions_1d(config_.p, xi, &vals[(d * g + k) * n1], &ders[(d * g + k) * n1]);
      }
    }

    if (leaf.cls != CellClass::kCut) {
      // Factorized path: 1D Gram matrices on the interval, then products.
      std::fill(s0.begin(), s0.end(), 0.0);
      std::fill(s1.begin(), s1.end(), 0.0);
      std::fill(sd.begin(), sd.end(), 0.0);
      for (int d = 0; d < 3; ++d) {
        double half = 0.5 * (hi_xi[d] - lo_xi[d]);
        for (int k = 0; k < g; ++k) {
          double w = rule.w[k] * half;
          for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n1; ++j) {
              s0[(d * n1 + i) * n1 + j] += w * val_at(d, k, i) * val_at(d, k, j);
              s1[(d * n1 + i) * n1 + j] += w * der_at(d, k, i) * der_at(d, k, j);
              sd[(d * n1 + i) * n1 + j] += w * der_at(d, k, i) * val_at(d, k, j);
            }
        }
      }
      // Physical scaling: one h/2 per axis from the volume element and 2/h
      // per derivative.
      auto m0 = [&](int d, int i, int j) { return 0.5 * h[d] * s0[(d * n1 + i) * n1 + j]; };
      auto m1 = [&](int d, int i, int j) { return scale_d[d] * s1[(d * n1 + i) * n1 + j]; };
      auto md = [&](int d, int i, int j) { return sd[(d * n1 + i) * n1 + j]; };

      // Only the upper mode triangle feeds the fold.
      for (int i = 0; i < n_modes; ++i) {
        int i1 = i % n1, i2 = (i / n1) % n1, i3 = i / (n1 * n1);
        for (int j = i; j < n_modes; ++j) {
          int j1 = j % n1, j2 = (j / n1) % n1, j3 = j / (n1 * n1);
          double x0 = m0(0, i1, j1), y0 = m0(1, i2, j2), z0 = m0(2, i3, j3);
          eab(0, 0)[i * n_modes + j] = alpha_leaf * m1(0, i1, j1) * y0 * z0;
          eab(1, 1)[i * n_modes + j] = alpha_leaf * x0 * m1(1, i2, j2) * z0;
          eab(2, 2)[i * n_modes + j] = alpha_leaf * x0 * y0 * m1(2, i3, j3);
          // Mixed terms carry one derivative per side; the 2/h derivative
          // scale cancels the h/2 volume factor on those axes.
          eab(0, 1)[i * n_modes + j] = alpha_leaf * md(0, i1, j1) * md(1, j2, i2) * z0;
          eab(1, 0)[i * n_modes + j] = alpha_leaf * md(0, j1, i1) * md(1, i2, j2) * z0;
          eab(1, 2)[i * n_modes + j] = alpha_leaf * x0 * md(1, i2, j2) * md(2, j3, i3);
          eab(2, 1)[i * n_modes + j] = alpha_leaf * x0 * md(1, j2, i2) * md(2, i3, j3);
          eab(0, 2)[i * n_modes + j] = alpha_leaf * md(0, i1, j1) * y0 * md(2, j3, i3);
          eab(2, 0)[i * n_modes + j] = alpha_leaf * md(0, j1, i1) * y0 * md(2, i3, j3);
        }
      }
      fold_into_ke();
      return;
    }

    // Cut leaf: per-point membership, rank-1 updates of the E matrices.
    double leaf_jac = cell_jac;
    for (int d = 0; d < 3; ++d) leaf_jac *= 0.5 * (hi_xi[d] - lo_xi[d]);
    Vec3 mid = leaf.box.center(), halfp = leaf.box.extent() * 0.5;

    for (int kz = 0; kz < g; ++kz)
      for (int ky = 0; ky < g; ++ky)
        for (int kx = 0; kx < g; ++kx) {
          Vec3 phys{mid.x + halfp.x * rule.x[kx], mid.y + halfp.y * rule.x[ky],
                    mid.z + halfp.z * rule.x[kz]};
          double alpha = geometry_->contains(phys) ? 1.0 : alpha_out;
          if (alpha == 0.0) continue;
          double w = alpha * leaf_jac * rule.w[kx] * rule.w[ky] * rule.w[kz];

          for (int m = 0; m < n_modes; ++m) {
            int m1 = m % n1, m2 = (m / n1) % n1, m3 = m / (n1 * n1);
            double vx = val_at(0, kx, m1), vy = val_at(1, ky, m2), vz = val_at(2, kz, m3);
            grads[3 * m + 0] = der_at(0, kx, m1) * vy * vz * scale_d[0];
            grads[3 * m + 1] = vx * der_at(1, ky, m2) * vz * scale_d[1];
            grads[3 * m + 2] = vx * vy * der_at(2, kz, m3) * scale_d[2];
          }
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              double* e = eab(a, b);
              for (int i = 0; i < n_modes; ++i) {
                double gi = w * grads[3 * i + a];
                if (gi == 0.0) continue;
                const double* gj = grads.data() + b;
                double* row = e + i * n_modes;
                for (int j = i; j < n_modes; ++j) row[j] += gi * gj[3 * j];
              }
            }
        }
    fold_into_ke();
  });

  return ke;
}

void FcmModel::assemble() {
  // Scalar adjacency, then the 3x3 block expansion into an upper CSR.
  std::vector<std::vector<int>> adj(n_scalar_);
  for (const Cell& cell : cells_) {
    for (int s : cell.scalar_dofs) {
      auto& row = adj[s];
      row.insert(row.end(), cell.scalar_dofs.begin(), cell.scalar_dofs.end());
    }
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  row_ptr_.assign(n_dofs_ + 1, 0);
  for (std::size_t s = 0; s < n_scalar_; ++s) {
    for (int comp = 0; comp < 3; ++comp) {
      std::size_t r = 3 * s + comp;
      std::size_t count = 0;
      for (int t : adj[s]) {
        for (int d = 0; d < 3; ++d) {
          std::size_t c = 3 * static_cast<std::size_t>(t) + d;
          if (c >= r) ++count;
        }
      }
      row_ptr_[r + 1] = count;
    }
  }
  for (std::size_t r = 0; r < n_dofs_; ++r) row_ptr_[r + 1] += row_ptr_[r];
  col_idx_.resize(row_ptr_.back());
  values_.assign(row_ptr_.back(), 0.0);
  {
    std::vector<std::size_t> cursor(n_dofs_, 0);
    for (std::size_t s = 0; s < n_scalar_; ++s)
      for (int comp = 0; comp < 3; ++comp) {
        std::size_t r = 3 * s + comp;
        std::size_t at = row_ptr_[r];
        for (int t : adj[s])
          for (int d = 0; d < 3; ++d) {
            std::size_t c = 3 * static_cast<std::size_t>(t) + d;
            if (c >= r) col_idx_[at++] = static_cast<int>(c);
          }
      }
  }
  adj.clear();
  adj.shrink_to_fit();

  auto add_entry = [&](std::size_t r, std::size_t c, double v) {
    const int* begin = col_idx_.data() + row_ptr_[r];
    const int* end = col_idx_.data() + row_ptr_[r + 1];
    const int* it = std::lower_bound(begin, end, static_cast<int>(c));
    values_[row_ptr_[r] + (it - begin)] += v;
  };

  // Element matrices in parallel batches, scatter in deterministic order.
  const int n_cells = static_cast<int>(cells_.size());
  const int batch = std::max(1, 4 * config_.threads);
  std::vector<std::vector<double>> kes(batch);
  for (int base = 0; base < n_cells; base += batch) {
    int count = std::min(batch, n_cells - base);
    auto compute = [&](int from, int to) {
      for (int i = from; i < to; ++i) kes[i] = element_stiffness(cells_[base + i]);
    };
    if (config_.threads <= 1 || count == 1) {
      compute(0, count);
    } else {
      std::vector<std::thread> pool;
      int per = (count + config_.threads - 1) / config_.threads;
      for (int t = 0; t < config_.threads; ++t)
        pool.emplace_back(compute, std::min(t * per, count), std::min((t + 1) * per, count));
      for (auto& th : pool) th.join();
    }
    for (int i = 0; i < count; ++i) {
      const Cell& cell = cells_[base + i];
      const std::vector<double>& ke = kes[i];
      const int n_modes = modes_per_cell();
      const int m_dofs = 3 * n_modes;
      for (int li = 0; li < m_dofs; ++li) {
        std::size_t gi = 3 * static_cast<std::size_t>(cell.scalar_dofs[li / 3]) + li % 3;
        for (int lj = 0; lj < m_dofs; ++lj) {
          std::size_t gj = 3 * static_cast<std::size_t>(cell.scalar_dofs[lj / 3]) + lj % 3;
          if (gj < gi) continue;
          if (gj == gi && lj < li) continue;  // diagonal once
          add_entry(gi, gj, ke[li * static_cast<size_t>(m_dofs) + lj]);
        }
      }
      kes[i].clear();
      kes[i].shrink_to_fit();
    }
  }
  assembled_ = true;
}

void FcmModel::add_traction(const TractionBc& bc, const TriangleSoup& surface) {
  struct Tri {
    Vec3 a, b, c;
  };
  std::vector<Tri> tris;
  for (const auto& t : surface.triangles) {
    Vec3 a = surface.vertices[t[0]], b = surface.vertices[t[1]], c = surface.vertices[t[2]];
    Vec3 centroid = (a + b + c) / 3.0;
    if (bc.region(centroid)) tris.push_back({a, b, c});
  }
  if (tris.empty()) throw Error("fcm: traction region selects no surface triangles");

  auto resultant = [&](const std::vector<Tri>& set) {
    Vec3 r{};
    for (const Tri& t : set) {
      Vec3 n = cross(t.b - t.a, t.c - t.a);
      double area2 = norm(n);
      if (area2 == 0.0) continue;
      r += bc.traction((t.a + t.b + t.c) / 3.0, n / area2) * (0.5 * area2);
    }
    return r;
  };

  // One-point quadrature per triangle, refined until the resultant settles.
  Vec3 prev = resultant(tris);
  for (int pass = 0; pass < 8; ++pass) {
    std::vector<Tri> finer;
    finer.reserve(tris.size() * 4);
    for (const Tri& t : tris) {
      Vec3 ab = (t.a + t.b) * 0.5, bc2 = (t.b + t.c) * 0.5, ca = (t.c + t.a) * 0.5;
      finer.push_back({t.a, ab, ca});
      finer.push_back({ab, t.b, bc2});
      finer.push_back({ca, bc2, t.c});
      finer.push_back({ab, bc2, ca});
    }
    Vec3 cur = resultant(finer);
    tris = std::move(finer);
    if (norm(cur - prev) <= 1e-6 * (1.0 + norm(cur))) {
      prev = cur;
      break;
    }
    prev = cur;
  }

  const int n1 = mode_count_1d();
  std::vector<double> nx(n1), ny(n1), nz(n1);
  for (const Tri& t : tris) {
    Vec3 n = cross(t.b - t.a, t.c - t.a);
    double area2 = norm(n);
    if (area2 == 0.0) continue;
    Vec3 centroid = (t.a + t.b + t.c) / 3.0;
    Vec3 load = bc.traction(centroid, n / area2) * (0.5 * area2);
    int ci;
    Vec3 xi;
    cell_local(centroid, ci, xi);
    if (ci < 0) continue;  // off-grid surface piece carries no dofs
    const Cell& cell = cells_[ci];
    shape_functions_1d(config_.p, xi.x, nx.data(), nullptr);
    shape_functions_1d(config_.p, xi.y, ny.data(), nullptr);
    shape_functions_1d(config_.p, xi.z, nz.data(), nullptr);
    int mode = 0;
    for (int mz = 0; mz < n1; ++mz)
      for (int my = 0; my < n1; ++my)
        for (int mx = 0; mx < n1; ++mx, ++mode) {
          double shape = nx[mx] * ny[my] * nz[mz];
          std::size_t s = cell.scalar_dofs[mode];
          rhs_[3 * s + 0] += shape * load.x;
          rhs_[3 * s + 1] += shape * load.y;
          rhs_[3 * s + 2] += shape * load.z;
        }
  }
}

void FcmModel::solve() {
  if (!assembled_) assemble();
  if (constraints_.empty())
    throw Error("fcm: singular system, 6 unconstrained rigid-body modes");

  std::vector<int> free_index(n_dofs_, -1);
  std::size_t n_free = 0;
  for (std::size_t r = 0; r < n_dofs_; ++r)
    if (!constraints_.count(static_cast<int>(r))) free_index[r] = static_cast<int>(n_free++);

  u_.assign(n_dofs_, 0.0);
  for (const auto& [dof, value] : constraints_) u_[dof] = value;

  Eigen::VectorXd rhs(n_free);
  for (std::size_t r = 0; r < n_dofs_; ++r)
    if (free_index[r] >= 0) rhs[free_index[r]] = rhs_[r];

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(values_.size());
  for (std::size_t r = 0; r < n_dofs_; ++r) {
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::size_t c = col_idx_[k];
      double v = values_[k];
      bool rf = free_index[r] >= 0, cf = free_index[c] >= 0;
      if (rf && cf) {
        trip.emplace_back(free_index[r], free_index[c], v);
      } else if (rf && !cf) {
        rhs[free_index[r]] -= v * u_[c];
      } else if (!rf && cf && r != c) {
        rhs[free_index[c]] -= v * u_[r];
      }
    }
  }
  Eigen::SparseMatrix<double> kff(n_free, n_free);
  kff.setFromTriplets(trip.begin(), trip.end());
  trip.clear();
  trip.shrink_to_fit();

  Eigen::VectorXd x;
  if (n_free <= static_cast<std::size_t>(config_.iterative_threshold)) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Upper> ldlt;
    ldlt.compute(kff);
    if (ldlt.info() != Eigen::Success)
      throw Error("fcm: factorization failed, constrained system is singular");
    x = ldlt.solve(rhs);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Upper> cg;
    cg.setTolerance(1e-12);
    cg.setMaxIterations(20000);
    cg.compute(kff);
    x = cg.solve(rhs);
    if (cg.info() != Eigen::Success)
      throw Error("fcm: iterative solve did not converge, residual " +
                  std::to_string(cg.error()));
  }
  for (std::size_t r = 0; r < n_dofs_; ++r)
    if (free_index[r] >= 0) u_[r] = x[free_index[r]];
  solved_ = true;
}

void FcmModel::cell_local(Vec3 x, int& cell, Vec3& xi) const {
  const int n[3] = {config_.nx, config_.ny, config_.nz};
  int idx[3];
  for (int d = 0; d < 3; ++d) {
    double h = (config_.box.hi[d] - config_.box.lo[d]) / n[d];
    idx[d] = std::clamp(static_cast<int>(std::floor((x[d] - config_.box.lo[d]) / h)), 0, n[d] - 1);
  }
  int lin = (idx[2] * config_.ny + idx[1]) * config_.nx + idx[0];
  cell = cell_index_[lin];
  if (cell < 0) return;
  const Box3& b = cells_[cell].box;
  xi = {2.0 * (x.x - b.lo.x) / (b.hi.x - b.lo.x) - 1.0,
        2.0 * (x.y - b.lo.y) / (b.hi.y - b.lo.y) - 1.0,
        2.0 * (x.z - b.lo.z) / (b.hi.z - b.lo.z) - 1.0};
}

Vec3 FcmModel::displacement(Vec3 x) const {
  if (!solved_) throw Error("fcm: model not solved");
  int ci;
  Vec3 xi;
  cell_local(x, ci, xi);
  if (ci < 0) return {};  // fictitious-only region
  const Cell& cell = cells_[ci];
  const int n1 = mode_count_1d();
  std::vector<double> nx(n1), ny(n1), nz(n1);
  shape_functions_1d(config_.p, xi.x, nx.data(), nullptr);
  shape_functions_1d(config_.p, xi.y, ny.data(), nullptr);
  shape_functions_1d(config_.p, xi.z, nz.data(), nullptr);
  Vec3 u{};
  int mode = 0;
  for (int mz = 0; mz < n1; ++mz)
    for (int my = 0; my < n1; ++my)
      for (int mx = 0; mx < n1; ++mx, ++mode) {
        double shape = nx[mx] * ny[my] * nz[mz];
        std::size_t s = cell.scalar_dofs[mode];
        u += Vec3{u_[3 * s], u_[3 * s + 1], u_[3 * s + 2]} * shape;
      }
  return u;
}

void FcmModel::displacement_gradient(Vec3 x, double grad[3][3]) const {
  int ci;
  Vec3 xi;
  cell_local(x, ci, xi);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) grad[a][b] = 0.0;
  if (ci < 0) return;
  const Cell& cell = cells_[ci];
  Vec3 h = cell.box.extent();
  const int n1 = mode_count_1d();
  std::vector<double> nx(n1), ny(n1), nz(n1), dx(n1), dy(n1), dz(n1);
  shape_functions_1d(config_.p, xi.x, nx.data(), dx.data());
  shape_functions_1d(config_.p, xi.y, ny.data(), dy.data());
  shape_functions_1d(config_.p, xi.z, nz.data(), dz.data());
  int mode = 0;
  for (int mz = 0; mz < n1; ++mz)
    for (int my = 0; my < n1; ++my)
      for (int mx = 0; mx < n1; ++mx, ++mode) {
        double gd[3] = {dx[mx] * ny[my] * nz[mz] * 2.0 / h.x,
                        nx[mx] * dy[my] * nz[mz] * 2.0 / h.y,
                        nx[mx] * ny[my] * dz[mz] * 2.0 / h.z};
        std::size_t s = cell.scalar_dofs[mode];
        for (int comp = 0; comp < 3; ++comp)
          for (int d = 0; d < 3; ++d) grad[comp][d] += u_[3 * s + comp] * gd[d];
      }
}

SymmetricTensor FcmModel::stress(Vec3 x) const {
  if (!solved_) throw Error("fcm: model not solved");
  double g[3][3];
  displacement_gradient(x, g);
  const Lame lame = lame_constants(config_.material);
  double tr = g[0][0] + g[1][1] + g[2][2];
  SymmetricTensor s;
  s.v[0] = lame.lambda * tr + 2.0 * lame.mu * g[0][0];
  s.v[1] = lame.lambda * tr + 2.0 * lame.mu * g[1][1];
  s.v[2] = lame.lambda * tr + 2.0 * lame.mu * g[2][2];
  s.v[3] = lame.mu * (g[0][1] + g[1][0]);
  s.v[4] = lame.mu * (g[1][2] + g[2][1]);
  s.v[5] = lame.mu * (g[2][0] + g[0][2]);
  return s;
}

double FcmModel::von_mises(Vec3 x) const { return stress(x).von_mises(); }

double FcmModel::stiffness_entry(std::size_t r, std::size_t c) const {
  if (!assembled_) throw Error("fcm: not assembled");
  if (r > c) std::swap(r, c);
  const int* begin = col_idx_.data() + row_ptr_[r];
  const int* end = col_idx_.data() + row_ptr_[r + 1];
  const int* it = std::lower_bound(begin, end, static_cast<int>(c));
  if (it == end || static_cast<std::size_t>(*it) != c) return 0.0;
  return values_[row_ptr_[r] + (it - begin)];
}

double FcmModel::strain_energy() const {
  if (!solved_) throw Error("fcm: model not solved");
  double e = 0.0;
  for (std::size_t r = 0; r < n_dofs_; ++r)
    for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
      std::size_t c = col_idx_[k];
      e += (c == r ? 0.5 : 1.0) * u_[r] * values_[k] * u_[c];
    }
  return e;
}

double FcmModel::symmetry_error() const {
  // The upper-triangle storage is symmetric by construction; report the
  // accumulation asymmetry of a representative element matrix instead.
  if (cells_.empty()) return 0.0;
  std::vector<double> ke = element_stiffness(cells_.front());
  const int m = 3 * modes_per_cell();
  double max_abs = 0.0, max_diff = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      max_abs = std::max(max_abs, std::abs(ke[i * static_cast<size_t>(m) + j]));
      max_diff = std::max(max_diff, std::abs(ke[i * static_cast<size_t>(m) + j] -
                                             ke[j * static_cast<size_t>(m) + i]));
    }
  return max_abs > 0.0 ? max_diff / max_abs : 0.0;
}

double FcmModel::displacement_l2_difference(const FcmModel& a, const FcmModel& b,
                                            int samples_per_axis) {
  double num = 0.0, den = 0.0;
  const int n = samples_per_axis;
  for (const Cell& cell : a.cells_) {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
          Vec3 p{cell.box.lo.x + (cell.box.hi.x - cell.box.lo.x) * (i + 0.5) / n,
                 cell.box.lo.y + (cell.box.hi.y - cell.box.lo.y) * (j + 0.5) / n,
                 cell.box.lo.z + (cell.box.hi.z - cell.box.lo.z) * (k + 0.5) / n};
          Vec3 ua = a.displacement(p), ub = b.displacement(p);
          num += norm2(ua - ub);
          den += norm2(ua);
        }
  }
  if (den == 0.0) return 0.0;
  return std::sqrt(num / den);
}

void FcmModel::attach_fields(TriangleSoup& soup) const {
  std::vector<Vec3> u;
  std::vector<double> vm;
  u.reserve(soup.vertices.size());
  vm.reserve(soup.vertices.size());
  for (const Vec3& v : soup.vertices) {
    u.push_back(displacement(v));
    vm.push_back(von_mises(v));
  }
  soup.vector_channels["u"] = std::move(u);
  soup.scalar_channels["von_mises"] = std::move(vm);
}

}  // namespace geocell
