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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "geocell/body.hpp"
#include "geocell/integrate.hpp"
#include "geocell/surface.hpp"
#include "geocell/vec.hpp"

namespace geocell {

struct Material {
  double youngs_modulus = 1.0;
  double poisson_ratio = 0.0;
};

struct FcmConfig {
  Box3 box;
  int nx = 1, ny = 1, nz = 1;
  int p = 1;          // polynomial degree, 1..8
  int k_max = 4;      // octree depth for composed integration and cut detection
  double q = 8.0;     // fictitious stiffness exponent; infinity for hard zero
  Material material;
  int threads = 1;    // assembly workers; results are thread-count independent
  int gauss_order = 0;          // 0 means p + 1
  int iterative_threshold = 2'000'000;  // dofs above which CG replaces the factorization
};

/// Cell-face plane of the Cartesian grid: plane index 0..n(axis).
struct FaceSelector {
  int axis = 2;
  int plane = 0;
};

/// Strong Dirichlet data on a cell-face plane. Prescribed components are
/// affine, u_c(x) = value[c] + dot(gradient[c], x); nodal modes interpolate
/// it exactly and face bubbles are zeroed, which is exact for affine data.
/// Non-affine data is unsupported.
struct DirichletBc {
  FaceSelector face;
  std::array<std::optional<double>, 3> value;
  std::array<Vec3, 3> gradient{Vec3{}, Vec3{}, Vec3{}};
};

/// Traction on the recovered boundary: applied to surface triangles whose
/// centroid satisfies `region`, refined by subdivision until the load
/// resultant is stable.
struct TractionBc {
  std::function<bool(Vec3)> region;
  std::function<Vec3(Vec3 position, Vec3 unit_normal)> traction;
};

struct SymmetricTensor {
  // xx, yy, zz, xy, yz, zx
  double v[6] = {0, 0, 0, 0, 0, 0};
  double von_mises() const;
};

/// High-order fictitious-domain elasticity on a Cartesian cell grid. Cells
/// without physical intersection are deactivated and carry no dofs.
class FcmModel {
 public:
  FcmModel(FcmConfig config, std::shared_ptr<const Body> geometry);

  const FcmConfig& config() const { return config_; }
  int total_cells() const { return config_.nx * config_.ny * config_.nz; }
  int active_cells() const { return active_count_; }
  std::size_t dof_count() const { return n_dofs_; }

  void add_dirichlet(const DirichletBc& bc);
  void add_traction(const TractionBc& bc, const TriangleSoup& surface);

  void assemble();
  void solve();

  bool solved() const { return solved_; }
  const std::vector<double>& solution() const { return u_; }

  Vec3 displacement(Vec3 x) const;
  SymmetricTensor stress(Vec3 x) const;
  double von_mises(Vec3 x) const;
  double strain_energy() const;  // 0.5 u^T K u over the assembled system

  /// Max |K - K^T| / max |K|; zero by construction up to round-off.
  double symmetry_error() const;

  /// Relative L2 distance of the displacement fields of two models sampled
  /// on an (n x n x n) grid per cell of `a`.
  static double displacement_l2_difference(const FcmModel& a, const FcmModel& b,
                                           int samples_per_axis = 3);

  /// Attaches u and von Mises channels to a recovered surface.
  void attach_fields(TriangleSoup& soup) const;

  /// Assembled stiffness entry (zero when outside the sparsity pattern).
  double stiffness_entry(std::size_t r, std::size_t c) const;
  /// Global scalar mode ids of an active cell in tensor order (x fastest).
  const std::vector<int>& cell_scalar_dofs(int active_cell) const {
    return cells_[active_cell].scalar_dofs;
  }

 private:
  struct Cell {
    int ix, iy, iz;
    Box3 box;
    std::vector<int> scalar_dofs;  // tensor-mode order
    std::unique_ptr<Partition3> partition;
  };

  void build_cells();
  void build_dof_map();
  std::vector<double> element_stiffness(const Cell& cell) const;
  void cell_local(Vec3 x, int& cell_index, Vec3& xi) const;
  void displacement_gradient(Vec3 x, double grad[3][3]) const;
  int mode_count_1d() const { return config_.p + 1; }
  int modes_per_cell() const { return mode_count_1d() * mode_count_1d() * mode_count_1d(); }

  FcmConfig config_;
  std::shared_ptr<const Body> geometry_;
  std::vector<Cell> cells_;      // active cells only
  std::vector<int> cell_index_;  // dense grid -> active cell index or -1
  int active_count_ = 0;

  std::size_t n_scalar_ = 0;
  std::size_t n_dofs_ = 0;

  // Assembled system in compressed sparse rows over the upper triangle.
  std::vector<std::size_t> row_ptr_;
  std::vector<int> col_idx_;
  std::vector<double> values_;
  std::vector<double> rhs_;
  std::map<int, double> constraints_;  // dof -> prescribed value
  std::vector<double> u_;
  bool assembled_ = false;
  bool solved_ = false;
};

}  // namespace geocell
