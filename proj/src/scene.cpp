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

#include "geocell/scene.hpp"

#include <cmath>
#include <fstream>

#include "geocell/surface.hpp"

namespace geocell {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(where + ": " + what);
}

double num(const json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) fail(where, "expected [x, y, z]");
  return {num(j[0], where), num(j[1], where), num(j[2], where)};
}

Vec2 vec2(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) fail(where, "expected [x, y]");
  return {num(j[0], where), num(j[1], where)};
}

Frame parse_frame(const json& j, const std::string& where) {
  Vec3 origin = j.contains("origin") ? vec3(j.at("origin"), where + ".origin") : Vec3{};
  Vec3 a1 = j.contains("axis1") ? vec3(j.at("axis1"), where + ".axis1") : Vec3{1, 0, 0};
  Vec3 a2 = j.contains("axis2") ? vec3(j.at("axis2"), where + ".axis2") : Vec3{0, 1, 0};
  return Frame::from_two_axes(origin, a1, a2);
}

template <class V>
CurveT<V> parse_curve(const json& j, const std::string& where) {
  if (!j.contains("degree") || !j.contains("knots") || !j.contains("points"))
    fail(where, "curve needs degree, knots, points");
  int degree = j.at("degree").get<int>();
  std::vector<double> knots = j.at("knots").get<std::vector<double>>();
  std::vector<V> points;
  for (const auto& p : j.at("points")) {
    if constexpr (std::is_same_v<V, Vec2>)
      points.push_back(vec2(p, where + ".points"));
    else
      points.push_back(vec3(p, where + ".points"));
  }
  std::vector<double> weights;
  if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
  try {
    return CurveT<V>(degree, std::move(knots), std::move(points), std::move(weights));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

Sketch parse_sketch(const json& j, const std::string& where) {
  if (!j.contains("segments")) fail(where, "sketch needs segments");
  std::vector<Segment> segments;
  int index = 0;
  for (const auto& s : j.at("segments")) {
    std::string at = where + ".segments[" + std::to_string(index++) + "]";
    std::string type = s.value("type", "");
    if (type == "line") {
      segments.push_back(LineSeg{vec2(s.at("from"), at), vec2(s.at("to"), at)});
    } else if (type == "arc") {
      ArcSeg arc;
      arc.center = vec2(s.at("center"), at);
      arc.radius = num(s.at("radius"), at);
      arc.start_angle = num(s.at("start_angle_deg"), at) * kPi / 180.0;
      arc.end_angle = num(s.at("end_angle_deg"), at) * kPi / 180.0;
      arc.ccw = s.value("ccw", true);
      segments.push_back(arc);
    } else if (type == "spline") {
      segments.push_back(SplineSeg(parse_curve<Vec2>(s.at("curve"), at + ".curve")));
    } else {
      fail(at, "unknown segment type '" + type + "'");
    }
  }
  try {
    return Sketch(std::move(segments));
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

FrameSpec parse_frame_mode(const json& j, const std::string& where) {
  FrameSpec spec;
  std::string mode = j.value("frame_mode", "frenet");
  auto axes_of = [&](const json& a, const std::string& at) {
    Mat3 m;
    m.col[0] = vec3(a.at("x"), at);
    m.col[1] = vec3(a.at("y"), at);
    m.col[2] = vec3(a.at("z"), at);
    return m;
  };
  if (mode == "frenet") {
    spec.mode = FrameMode::kFrenet;
  } else if (mode == "parallel" || mode == "constant_dihedral" || mode == "interpolated") {
    spec.mode = mode == "parallel" ? FrameMode::kParallel
                : mode == "constant_dihedral" ? FrameMode::kConstantDihedral
                                              : FrameMode::kInterpolated;
    if (!j.contains("sketch_axes")) fail(where, "mode '" + mode + "' needs sketch_axes");
    spec.sketch_axes_start = axes_of(j.at("sketch_axes"), where + ".sketch_axes");
    if (spec.mode == FrameMode::kInterpolated) {
      if (!j.contains("sketch_axes_end")) fail(where, "interpolated mode needs sketch_axes_end");
      spec.sketch_axes_end = axes_of(j.at("sketch_axes_end"), where + ".sketch_axes_end");
    }
  } else {
    fail(where, "unknown frame_mode '" + mode + "'");
  }
  return spec;
}

}  // namespace

Scene Scene::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("scene: cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error("scene: invalid json in '" + path + "': " + e.what());
  }
  return from_json(doc);
}

Scene Scene::from_json(const json& doc) {
  Scene scene;
  scene.doc_ = doc;
  scene.name_ = doc.value("name", "");

  if (doc.contains("curves"))
    for (const auto& [name, j] : doc.at("curves").items())
      scene.curves_[name] =
          std::make_shared<Curve3>(parse_curve<Vec3>(j, "curves." + name));

  if (doc.contains("sketches"))
    for (const auto& [name, j] : doc.at("sketches").items())
      scene.sketches_[name] = std::make_shared<Sketch>(parse_sketch(j, "sketches." + name));

  auto sketch_ref = [&](const json& j, const std::string& where) {
    std::string name = j.get<std::string>();
    auto it = scene.sketches_.find(name);
    if (it == scene.sketches_.end()) fail(where, "unknown sketch '" + name + "'");
    return it->second;
  };
  auto curve_ref = [&](const json& j, const std::string& where) {
    std::string name = j.get<std::string>();
    auto it = scene.curves_.find(name);
    if (it == scene.curves_.end()) fail(where, "unknown curve '" + name + "'");
    return it->second;
  };

  if (doc.contains("bodies")) {
    for (const auto& [name, j] : doc.at("bodies").items()) {
      const std::string where = "bodies." + name;
      std::string type = j.value("type", "");
      std::shared_ptr<const Body> body;
      Frame frame = j.contains("frame") ? parse_frame(j.at("frame"), where + ".frame") : Frame();
      if (type == "sphere") {
        body = std::make_shared<SimplePrimitive>(
            Sphere{j.contains("center") ? vec3(j.at("center"), where) : Vec3{},
                   num(j.at("radius"), where)},
            frame);
      } else if (type == "box") {
        body = std::make_shared<SimplePrimitive>(
            Cuboid{vec3(j.at("start"), where), vec3(j.at("end"), where)}, frame);
      } else if (type == "cylinder") {
        body = std::make_shared<SimplePrimitive>(
            Cylinder{j.contains("center") ? vec3(j.at("center"), where) : Vec3{},
                     num(j.at("radius"), where), num(j.at("height"), where)},
            frame);
      } else if (type == "cone") {
        body = std::make_shared<SimplePrimitive>(
            ConeFrustum{j.contains("center") ? vec3(j.at("center"), where) : Vec3{},
                        num(j.at("r0"), where), num(j.at("r1"), where),
                        num(j.at("height"), where)},
            frame);
      } else if (type == "pyramid") {
        const auto& b = j.at("bottom");
        const auto& t = j.at("top");
        if (!b.is_array() || b.size() != 4 || !t.is_array() || t.size() != 4)
          fail(where, "pyramid bottom/top must be [xs, xe, ys, ye]");
        body = std::make_shared<SimplePrimitive>(
            PyramidFrustum{num(b[0], where), num(b[1], where), num(b[2], where), num(b[3], where),
                           num(t[0], where), num(t[1], where), num(t[2], where), num(t[3], where),
                           j.value("z", 0.0), num(j.at("height"), where)},
            frame);
      } else if (type == "torus") {
        body = std::make_shared<SimplePrimitive>(
            Torus{j.contains("center") ? vec3(j.at("center"), where) : Vec3{},
                  num(j.at("major_radius"), where), num(j.at("minor_radius"), where)},
            frame);
      } else if (type == "wedge") {
        body = std::make_shared<SimplePrimitive>(
            Wedge{vec3(j.at("start"), where), vec3(j.at("end"), where)}, frame);
      } else if (type == "extrude") {
        body = make_extrusion(sketch_ref(j.at("sketch"), where),
                              parse_frame(j, where), num(j.at("length"), where));
      } else if (type == "revolve") {
        double angle = j.value("angle_deg", 360.0) * kPi / 180.0;
        body = make_revolution(sketch_ref(j.at("sketch"), where),
                               vec3(j.at("axis_origin"), where), vec3(j.at("axis_dir"), where),
                               vec3(j.at("anchor"), where), angle);
      } else if (type == "sweep") {
        body = std::make_shared<SweepSolid>(curve_ref(j.at("path"), where),
                                            sketch_ref(j.at("sketch"), where),
                                            parse_frame_mode(j, where));
      } else if (type == "loft") {
        body = std::make_shared<LoftSolid>(
            curve_ref(j.at("path"), where), sketch_ref(j.at("sketch_start"), where),
            sketch_ref(j.at("sketch_end"), where), parse_frame_mode(j, where));
      } else {
        fail(where, "unknown body type '" + type + "'");
      }
      scene.bodies_[name] = CsgNode::leaf(std::move(body));
    }
  }

  // Construction: nested tree or ordered history; exactly one root. Node
  // references resolve against the named bodies plus any names the history
  // has defined so far.
  std::map<std::string, CsgNode::Ptr> defined;
  std::function<CsgNode::Ptr(const json&, const std::string&)> parse_node =
      [&](const json& j, const std::string& where) -> CsgNode::Ptr {
    if (j.contains("body")) {
      std::string name = j.at("body").get<std::string>();
      auto it = scene.bodies_.find(name);
      if (it != scene.bodies_.end()) return it->second;
      auto def = defined.find(name);
      if (def == defined.end()) fail(where, "unknown body '" + name + "'");
      return def->second;
    }
    if (j.contains("transform")) {
      const json& t = j.at("transform");
      CsgNode::Ptr child = parse_node(j.at("child"), where + ".child");
      if (t.contains("mirror_point"))
        return CsgNode::mirrored(vec3(t.at("mirror_point"), where),
                                 vec3(t.at("mirror_normal"), where), child);
      return CsgNode::rigid(parse_frame(t, where + ".transform"), child);
    }
    std::string op = j.value("op", "");
    if (op == "union" || op == "intersection" || op == "difference") {
      const auto& ch = j.at("children");
      if (!ch.is_array() || ch.size() != 2) fail(where, "op '" + op + "' needs two children");
      BoolOp b = op == "union" ? BoolOp::kUnion
                 : op == "intersection" ? BoolOp::kIntersection
                                        : BoolOp::kDifference;
      return CsgNode::boolean(b, parse_node(ch[0], where + ".children[0]"),
                              parse_node(ch[1], where + ".children[1]"));
    }
    if (op == "chamfer" || op == "fillet") {
      CsgNode::Ptr target = parse_node(j.at("target"), where + ".target");
      const json& e = j.at("edge");
      EdgeSpec edge;
      edge.a = vec3(e.at("a"), where);
      edge.b = vec3(e.at("b"), where);
      edge.n1 = vec3(e.at("n1"), where);
      edge.n2 = vec3(e.at("n2"), where);
      if (e.contains("clearance")) edge.clearance = num(e.at("clearance"), where);
      return op == "chamfer" ? make_chamfer(target, edge, num(j.at("inset"), where))
                             : make_fillet(target, edge, num(j.at("radius"), where));
    }
    if (op == "hole") {
      CsgNode::Ptr target = parse_node(j.at("target"), where + ".target");
      return make_hole(target, vec3(j.at("axis_point"), where), vec3(j.at("axis_dir"), where),
                       num(j.at("radius"), where), num(j.at("depth"), where));
    }
    fail(where, "unrecognized node");
  };

  if (doc.contains("root") && doc.contains("history"))
    throw Error("scene: give either root or history, not both");
  if (doc.contains("root")) {
    scene.root_ = parse_node(doc.at("root"), "root");
  } else if (doc.contains("history")) {
    // Steps are parsed in order; node forms may reference names defined by
    // earlier steps. The fold itself goes through build_from_history.
    std::vector<HistoryStep> steps;
    for (const auto& [name, node] : scene.bodies_) {
      HistoryStep s;
      s.result = name;
      s.node = node;
      steps.push_back(std::move(s));
    }
    size_t preamble = steps.size();
    int index = 0;
    for (const auto& j : doc.at("history")) {
      std::string where = "history[" + std::to_string(index++) + "]";
      HistoryStep step;
      step.result = j.value("define", "");
      if (j.contains("node")) {
        step.node = parse_node(j.at("node"), where + ".node");
      } else if (j.contains("op")) {
        HistoryStep::BoolRef ref;
        std::string op = j.at("op").get<std::string>();
        if (op == "union")
          ref.op = BoolOp::kUnion;
        else if (op == "intersection")
          ref.op = BoolOp::kIntersection;
        else if (op == "difference")
          ref.op = BoolOp::kDifference;
        else
          fail(where, "unknown op '" + op + "'");
        ref.a = j.at("a").get<std::string>();
        ref.b = j.at("b").get<std::string>();
        auto resolve = [&](const std::string& name) -> CsgNode::Ptr {
          auto it = scene.bodies_.find(name);
          if (it != scene.bodies_.end()) return it->second;
          auto def = defined.find(name);
          return def != defined.end() ? def->second : nullptr;
        };
        CsgNode::Ptr a = resolve(ref.a), b = resolve(ref.b);
        if (!a) fail(where, "references undefined body '" + ref.a + "'");
        if (!b) fail(where, "references undefined body '" + ref.b + "'");
        step.node = CsgNode::boolean(ref.op, a, b);
      } else if (j.contains("body")) {
        step.node = parse_node(j, where);
      } else {
        fail(where, "step needs body, node, or op");
      }
      if (!step.result.empty()) defined[step.result] = step.node;
      steps.push_back(std::move(step));
    }
    if (steps.size() == preamble) throw Error("scene: history has no steps");
    try {
      scene.root_ = build_from_history(steps);
    } catch (const Error& e) {
      throw Error(std::string("scene: ") + e.what());
    }
  } else {
    throw Error("scene: no root");
  }

  if (doc.contains("domain")) {
    const json& d = doc.at("domain");
    scene.domain_.lo = vec3(d.at("box")[0], "domain.box");
    scene.domain_.hi = vec3(d.at("box")[1], "domain.box");
  } else {
    scene.domain_ = scene.root_->bounding_box();
  }

  if (doc.contains("analysis")) {
    const json& a = doc.at("analysis");
    AnalysisSpec spec;
    if (a.contains("grid")) {
      const auto& g = a.at("grid");
      spec.grid = {g[0].get<int>(), g[1].get<int>(), g[2].get<int>()};
    }
    spec.p = a.value("p", 1);
    spec.k_max = a.value("k_max", 4);
    spec.q = a.value("q", 8.0);
    if (a.contains("material")) {
      spec.material.youngs_modulus = a.at("material").value("E", 1.0);
      spec.material.poisson_ratio = a.at("material").value("nu", 0.0);
    }
    spec.surface_resolution = a.value("surface_resolution", 48);
    if (a.contains("dirichlet")) {
      for (const auto& b : a.at("dirichlet")) {
        FaceBcSpec bc;
        std::string face = b.value("face", "");
        if (face == "xmin") bc = {0, 0, false, {}};
        else if (face == "xmax") bc = {0, 0, true, {}};
        else if (face == "ymin") bc = {1, 0, false, {}};
        else if (face == "ymax") bc = {1, 0, true, {}};
        else if (face == "zmin") bc = {2, 0, false, {}};
        else if (face == "zmax") bc = {2, 0, true, {}};
        else if (b.contains("axis")) bc = {b.at("axis").get<int>(), b.at("plane").get<int>(), false, {}};
        else fail("analysis.dirichlet", "unknown face '" + face + "'");
        if (b.contains("ux")) bc.value[0] = num(b.at("ux"), "analysis.dirichlet.ux");
        if (b.contains("uy")) bc.value[1] = num(b.at("uy"), "analysis.dirichlet.uy");
        if (b.contains("uz")) bc.value[2] = num(b.at("uz"), "analysis.dirichlet.uz");
        spec.dirichlet.push_back(bc);
      }
    }
    if (a.contains("tractions")) {
      for (const auto& t : a.at("tractions")) {
        TractionSpec ts;
        ts.region = t.at("region");
        if (t.contains("pressure")) ts.pressure = num(t.at("pressure"), "analysis.tractions");
        if (t.contains("vector")) ts.vector = vec3(t.at("vector"), "analysis.tractions");
        if (!ts.pressure && !ts.vector)
          fail("analysis.tractions", "traction needs pressure or vector");
        spec.tractions.push_back(std::move(ts));
      }
    }
    scene.analysis_ = std::move(spec);
  }

  return scene;
}

const AnalysisSpec& Scene::analysis() const {
  if (!analysis_) throw Error("scene: no analysis block");
  return *analysis_;
}

std::unique_ptr<FcmModel> Scene::build_model(int threads) const {
  const AnalysisSpec& spec = analysis();
  FcmConfig cfg;
  cfg.box = domain_;
  cfg.nx = spec.grid[0];
  cfg.ny = spec.grid[1];
  cfg.nz = spec.grid[2];
  cfg.p = spec.p;
  cfg.k_max = spec.k_max;
  cfg.q = spec.q;
  cfg.material = spec.material;
  cfg.threads = threads;
  auto model = std::make_unique<FcmModel>(cfg, root_);
  for (const FaceBcSpec& bc : spec.dirichlet) model->add_dirichlet(bc.resolve(spec.grid));

  if (!spec.tractions.empty()) {
    int res = spec.surface_resolution;
    McResult mc = marching_cubes(
        *root_, domain_.inflated(1e-6 * (1.0 + domain_.diagonal())), res, res, res);
    refine_vertices(mc, *root_, 20);
    for (const TractionSpec& ts : spec.tractions) {
      TractionBc bc;
      const json region = ts.region;
      if (region.value("type", "") == "cylinder") {
        Vec3 origin = vec3(region.at("axis_origin"), "traction.region");
        Vec3 axis = normalized(vec3(region.at("axis_dir"), "traction.region"));
        double radius = num(region.at("radius"), "traction.region");
        double half_height = num(region.at("half_height"), "traction.region");
        bc.region = [origin, axis, radius, half_height](Vec3 p) {
          Vec3 d = p - origin;
          double along = dot(d, axis);
          if (std::abs(along) > half_height) return false;
          return norm(d - axis * along) <= radius;
        };
      } else if (region.value("type", "") == "box") {
        Box3 box;
        box.lo = vec3(region.at("box")[0], "traction.region");
        box.hi = vec3(region.at("box")[1], "traction.region");
        bc.region = [box](Vec3 p) { return box.contains(p); };
      } else {
        throw Error("scene: traction region must be cylinder or box");
      }
      if (ts.pressure) {
        double p = *ts.pressure;
        bc.traction = [p](Vec3, Vec3 n) { return n * -p; };
      } else {
        Vec3 t = *ts.vector;
        bc.traction = [t](Vec3, Vec3) { return t; };
      }
      model->add_traction(bc, mc.soup);
    }
  }
  return model;
}

json tree_to_history(const json& tree) {
  json steps = json::array();
  int counter = 0;
  std::function<std::string(const json&)> emit = [&](const json& node) -> std::string {
    if (node.contains("body")) {
      // Leaves are referenced directly by body name.
      return node.at("body").get<std::string>();
    }
    std::string op = node.value("op", "");
    if (op == "union" || op == "intersection" || op == "difference") {
      std::string a = emit(node.at("children")[0]);
      std::string b = emit(node.at("children")[1]);
      std::string name = "_t" + std::to_string(counter++);
      steps.push_back(json{{"define", name}, {"op", op}, {"a", a}, {"b", b}});
      return name;
    }
    // Transforms and extended operations stay as opaque nodes.
    std::string name = "_t" + std::to_string(counter++);
    steps.push_back(json{{"define", name}, {"node", node}});
    return name;
  };
  std::string root = emit(tree);
  if (steps.empty() || steps.back().value("define", "") != root)
    steps.push_back(json{{"define", "_root"}, {"node", json{{"body", root}}}});
  return steps;
}

json history_to_tree(const json& history) {
  std::map<std::string, json> defined;
  json last;
  for (const auto& step : history) {
    json node;
    if (step.contains("node")) {
      node = step.at("node");
    } else if (step.contains("body")) {
      node = json{{"body", step.at("body")}};
    } else {
      auto resolve = [&](const std::string& name) -> json {
        auto it = defined.find(name);
        return it != defined.end() ? it->second : json{{"body", name}};
      };
      node = json{{"op", step.at("op")},
                  {"children", json::array({resolve(step.at("a").get<std::string>()),
                                            resolve(step.at("b").get<std::string>())})}};
    }
    if (step.contains("define")) defined[step.at("define").get<std::string>()] = node;
    last = node;
  }
  return last;
}

}  // namespace geocell
