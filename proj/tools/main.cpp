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

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "geocell/integrate.hpp"
#include "geocell/io.hpp"
#include "geocell/scene.hpp"
#include "geocell/surface.hpp"

namespace {

using namespace geocell;

int thread_count(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("GEOCELL_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 1;
}

std::vector<Vec3> read_points(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open points file '" + path + "'");
  std::vector<Vec3> pts;
  double x, y, z;
  while (in >> x >> y >> z) pts.push_back({x, y, z});
  return pts;
}

void print_value(const char* label, double v) {
  std::printf("%s %.17g\n", label, v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"geocell: point membership, composed integration and embedded-domain "
               "elasticity on procedural models"};
  app.require_subcommand(1);

  std::string scene_path;
  int threads_flag = 0;
  app.add_option("-s,--scene", scene_path, "scene file (json)")->required();
  app.add_option("--threads", threads_flag, "worker threads (default: GEOCELL_THREADS or 1)");

  // pmc
  auto* pmc = app.add_subcommand("pmc", "classify points against the model");
  std::vector<std::vector<double>> pmc_points;
  std::string pmc_file;
  pmc->add_option("--point", pmc_points, "query point x y z")->expected(3);
  pmc->add_option("--points", pmc_file, "file with one 'x y z' per line");

  // volume / moments
  auto* volume = app.add_subcommand("volume", "composed octree volume");
  auto* moments = app.add_subcommand("moments", "volume, centroid and second moments");
  int k_depth = 5, gauss = 2;
  for (auto* cmd : {volume, moments}) {
    cmd->add_option("-k,--depth", k_depth, "octree depth (default 5)");
    cmd->add_option("-g,--gauss", gauss, "gauss order per axis (default 2)");
  }
  std::string leaf_dump;
  volume->add_option("--leaf-dump", leaf_dump, "write one record per octree leaf");

  // voxelize
  auto* voxelize_cmd = app.add_subcommand("voxelize", "dense occupancy grid");
  std::vector<int> vox_res{32, 32, 32};
  std::string vox_out;
  voxelize_cmd->add_option("--res", vox_res, "grid resolution nx ny nz")->expected(3);
  voxelize_cmd->add_option("-o,--out", vox_out, "output file")->required();

  // mesh
  auto* mesh = app.add_subcommand("mesh", "recover the boundary by marching cubes");
  int mesh_res = 64, mesh_refine = 20;
  bool mesh_weld = false;
  std::string mesh_out;
  mesh->add_option("--resolution", mesh_res, "cells per axis (default 64)");
  mesh->add_option("--refine", mesh_refine, "bisection iterations per vertex (default 20)");
  mesh->add_flag("--weld", mesh_weld, "weld vertices before export");
  mesh->add_option("-o,--out", mesh_out, "output .stl or .vtk")->required();

  // solve
  auto* solve = app.add_subcommand("solve", "assemble and solve the analysis block");
  std::string solve_out;
  int flag_p = 0, flag_kmax = -1;
  double flag_q = -1.0;
  solve->add_option("-o,--out", solve_out, "result surface (.vtk) path");
  solve->add_option("--p", flag_p, "override polynomial degree");
  solve->add_option("--k-max", flag_kmax, "override integration depth");
  solve->add_option("--q", flag_q, "override fictitious exponent");
  std::vector<int> flag_grid;
  solve->add_option("--grid", flag_grid, "override cell grid nx ny nz")->expected(3);

  // tree-stats
  auto* stats = app.add_subcommand("tree-stats", "construction tree shape, before and after "
                                                 "rebalancing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Scene scene;
  try {
    scene = Scene::load(scene_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*pmc) {
      std::vector<Vec3> points;
      for (const auto& p : pmc_points) points.push_back({p[0], p[1], p[2]});
      if (!pmc_file.empty())
        for (Vec3 p : read_points(pmc_file)) points.push_back(p);
      if (points.empty()) {
        std::cerr << "error: no query points\n";
        return 1;
      }
      for (Vec3 p : points) {
        std::printf("%.17g %.17g %.17g %s\n", p.x, p.y, p.z,
                    scene.root()->contains(p) ? "inside" : "outside");
      }
    } else if (*volume) {
      if (!leaf_dump.empty()) {
        Partition3 partition(scene.domain(),
                             [&](Vec3 p) { return scene.root()->contains(p); }, k_depth,
                             std::min(3, k_depth));
        std::ofstream out(leaf_dump);
        dump_leaves(partition, out);
        print_value("volume",
                    integrate_alpha(partition, [](Vec3) { return 1.0; },
                                    std::numeric_limits<double>::infinity(), gauss));
      } else {
        print_value("volume", compute_volume(*scene.root(), scene.domain(), k_depth, gauss));
      }
    } else if (*moments) {
      Moments m = compute_moments(*scene.root(), scene.domain(), k_depth, gauss);
      print_value("volume", m.volume);
      Vec3 c = m.centroid();
      std::printf("centroid %.17g %.17g %.17g\n", c.x, c.y, c.z);
      std::printf("second_moments %.17g %.17g %.17g %.17g %.17g %.17g\n", m.second[0], m.second[1],
                  m.second[2], m.second[3], m.second[4], m.second[5]);
    } else if (*voxelize_cmd) {
      OccupancyGrid grid =
          geocell::voxelize(*scene.root(), scene.domain(), vox_res[0], vox_res[1], vox_res[2]);
      std::ofstream out(vox_out, std::ios::binary);
      if (!out) throw Error("cannot open '" + vox_out + "'");
      write_occupancy(out, grid);
      std::printf("voxelize %dx%dx%d -> %s\n", grid.nx, grid.ny, grid.nz, vox_out.c_str());
    } else if (*mesh) {
      // A hair of inflation keeps grid nodes off a flush model boundary.
      Box3 mesh_box = scene.domain().inflated(1e-6 * (1.0 + scene.domain().diagonal()));
      McResult mc = marching_cubes(*scene.root(), mesh_box, mesh_res, mesh_res, mesh_res);
      refine_vertices(mc, *scene.root(), mesh_refine);
      TriangleSoup soup = mesh_weld ? weld(mc.soup, 1e-9 * scene.domain().diagonal()) : mc.soup;
      std::ofstream out(mesh_out, std::ios::binary);
      if (!out) throw Error("cannot open '" + mesh_out + "'");
      if (mesh_out.size() >= 4 && mesh_out.substr(mesh_out.size() - 4) == ".stl")
        write_stl_binary(out, soup);
      else
        write_vtk_surface(out, soup, scene.name().empty() ? "geocell surface" : scene.name());
      std::printf("mesh %zu vertices %zu triangles area %.17g\n", soup.vertices.size(),
                  soup.triangles.size(), soup_area(soup));
    } else if (*solve) {
      auto model = scene.build_model(thread_count(threads_flag));
      // Flag overrides replace the scene's analysis values.
      if (flag_p > 0 || flag_kmax >= 0 || flag_q >= 0.0 || !flag_grid.empty()) {
        AnalysisSpec spec = scene.analysis();
        FcmConfig cfg;
        cfg.box = scene.domain();
        cfg.nx = flag_grid.empty() ? spec.grid[0] : flag_grid[0];
        cfg.ny = flag_grid.empty() ? spec.grid[1] : flag_grid[1];
        cfg.nz = flag_grid.empty() ? spec.grid[2] : flag_grid[2];
        cfg.p = flag_p > 0 ? flag_p : spec.p;
        cfg.k_max = flag_kmax >= 0 ? flag_kmax : spec.k_max;
        cfg.q = flag_q >= 0.0 ? flag_q : spec.q;
        cfg.material = spec.material;
        cfg.threads = thread_count(threads_flag);
        model = std::make_unique<FcmModel>(cfg, scene.root());
        std::array<int, 3> grid{cfg.nx, cfg.ny, cfg.nz};
        for (const FaceBcSpec& bc : spec.dirichlet) model->add_dirichlet(bc.resolve(grid));
      }
      std::printf("cells %d active of %d\n", model->active_cells(), model->total_cells());
      model->assemble();
      std::printf("dofs %zu\n", model->dof_count());
      model->solve();
      print_value("strain_energy", model->strain_energy());
      if (!solve_out.empty()) {
        int res = scene.analysis().surface_resolution;
        Box3 mesh_box = scene.domain().inflated(1e-6 * (1.0 + scene.domain().diagonal()));
        McResult mc = marching_cubes(*scene.root(), mesh_box, res, res, res);
        refine_vertices(mc, *scene.root(), 20);
        model->attach_fields(mc.soup);
        std::ofstream out(solve_out);
        if (!out) throw Error("cannot open '" + solve_out + "'");
        write_vtk_surface(out, mc.soup, scene.name().empty() ? "geocell results" : scene.name());
        std::printf("results -> %s\n", solve_out.c_str());
      }
    } else if (*stats) {
      auto print_stats = [](const char* tag, const CsgNode::Stats& s) {
        std::printf("%s depth %d nodes %d leaves %d booleans %d transforms %d\n", tag, s.depth,
                    s.nodes, s.leaves, s.booleans, s.transforms);
      };
      print_stats("tree", scene.root()->stats());
      print_stats("rebalanced", rebalance(scene.root())->stats());
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
