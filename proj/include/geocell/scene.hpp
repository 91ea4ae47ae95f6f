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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "geocell/csg.hpp"
#include "geocell/fcm.hpp"

namespace geocell {

struct TractionSpec {
  nlohmann::json region;            // box or cylinder selector
  std::optional<double> pressure;   // t = -p n
  std::optional<Vec3> vector;       // constant traction
};

/// Dirichlet face kept symbolic so it can resolve against any grid.
struct FaceBcSpec {
  int axis = 2;
  int plane = 0;        // literal plane index
  bool at_max_face = false;  // xmax/ymax/zmax: plane = n(axis)
  std::array<std::optional<double>, 3> value;

  DirichletBc resolve(const std::array<int, 3>& grid) const {
    DirichletBc bc;
    bc.face = {axis, at_max_face ? grid[axis] : plane};
    bc.value = value;
    return bc;
  }
};

struct AnalysisSpec {
  std::array<int, 3> grid{1, 1, 1};
  int p = 1;
  int k_max = 4;
  double q = 8.0;
  Material material;
  std::vector<FaceBcSpec> dirichlet;
  std::vector<TractionSpec> tractions;
  int surface_resolution = 48;
};

/// A parsed scene document: named curves, sketches and bodies, one root
/// construction tree (give as a nested tree or as an ordered history), the
/// embedding domain, and an optional analysis block. All lengths share one
/// model unit.
class Scene {
 public:
  static Scene load(const std::string& path);
  static Scene from_json(const nlohmann::json& doc);

  /// Canonical form (sorted keys, exact numbers); parsing the output yields
  /// an identical scene.
  nlohmann::json to_json() const { return doc_; }

  const std::string& name() const { return name_; }
  const CsgNode::Ptr& root() const { return root_; }
  Box3 domain() const { return domain_; }
  bool has_analysis() const { return analysis_.has_value(); }
  const AnalysisSpec& analysis() const;

  const std::map<std::string, std::shared_ptr<const Curve3>>& curves() const { return curves_; }
  const std::map<std::string, std::shared_ptr<const Sketch>>& sketches() const {
    return sketches_;
  }
  const std::map<std::string, CsgNode::Ptr>& bodies() const { return bodies_; }

  /// FCM model for the analysis block with boundary conditions applied;
  /// tractions are integrated over a recovered surface.
  std::unique_ptr<FcmModel> build_model(int threads = 1) const;

 private:
  nlohmann::json doc_;
  std::string name_;
  std::map<std::string, std::shared_ptr<const Curve3>> curves_;
  std::map<std::string, std::shared_ptr<const Sketch>> sketches_;
  std::map<std::string, CsgNode::Ptr> bodies_;
  CsgNode::Ptr root_;
  Box3 domain_;
  std::optional<AnalysisSpec> analysis_;
};

/// The two storage forms of the construction are interconvertible: a nested
/// tree json becomes an ordered step list and back.
nlohmann::json tree_to_history(const nlohmann::json& tree);
nlohmann::json history_to_tree(const nlohmann::json& history);

}  // namespace geocell
