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

#include "geocell/csg.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace geocell {

namespace {

Box3 transformed_box(const Box3& b, const Mat3& rot, Vec3 trans) {
  Box3 out = Box3::empty();
  for (int i = 0; i < 8; ++i) {
    Vec3 c{i & 1 ? b.hi.x : b.lo.x, i & 2 ? b.hi.y : b.lo.y, i & 4 ? b.hi.z : b.lo.z};
    out.expand(rot * c + trans);
  }
  return out;
}

}  // namespace

CsgNode::Ptr CsgNode::leaf(std::shared_ptr<const Body> body) {
  if (!body) throw Error("csg: null body");
  auto n = std::shared_ptr<CsgNode>(new CsgNode());
  n->kind_ = Kind::kLeaf;
  n->box_ = body->bounding_box();
  n->body_ = std::move(body);
  return n;
}

CsgNode::Ptr CsgNode::boolean(BoolOp op, Ptr left, Ptr right) {
  if (!left || !right) throw Error("csg: boolean node needs two children");
  auto n = std::shared_ptr<CsgNode>(new CsgNode());
  n->kind_ = Kind::kBoolean;
  n->op_ = op;
  switch (op) {
    case BoolOp::kUnion: {
      Box3 b = left->box_;
      b.expand(right->box_);
      n->box_ = b;
      break;
    }
    case BoolOp::kIntersection:
      n->box_ = Box3::intersection(left->box_, right->box_);
      break;
    case BoolOp::kDifference:
      n->box_ = left->box_;
      break;
  }
  n->left_ = std::move(left);
  n->right_ = std::move(right);
  return n;
}

CsgNode::Ptr CsgNode::transformed(Mat3 rotation, Vec3 translation, Ptr child) {
  if (!child) throw Error("csg: transform node needs a child");
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double want = i == j ? 1.0 : 0.0;
      if (std::abs(dot(rotation.col[i], rotation.col[j]) - want) > 1e-9)
        throw Error("csg: transform must be orthogonal");
    }
  auto n = std::shared_ptr<CsgNode>(new CsgNode());
  n->kind_ = Kind::kTransform;
  n->rot_ = rotation;
  n->trans_ = translation;
  n->box_ = transformed_box(child->box_, rotation, translation);
  n->left_ = std::move(child);
  return n;
}

CsgNode::Ptr CsgNode::rigid(const Frame& placement, Ptr child) {
  // Child -> world: the columns are the world images of the local axes.
  Mat3 rot;
  rot.col[0] = placement.axis(0);
  rot.col[1] = placement.axis(1);
  rot.col[2] = placement.axis(2);
  return transformed(rot, placement.origin(), std::move(child));
}

CsgNode::Ptr CsgNode::mirrored(Vec3 plane_point, Vec3 plane_normal, Ptr child) {
  Vec3 n = normalized(plane_normal);
  Mat3 rot;
  for (int j = 0; j < 3; ++j) {
    Vec3 e{j == 0 ? 1.0 : 0.0, j == 1 ? 1.0 : 0.0, j == 2 ? 1.0 : 0.0};
    rot.col[j] = e - n * (2.0 * n[j]);
  }
  Vec3 trans = n * (2.0 * dot(plane_point, n));
  return transformed(rot, trans, std::move(child));
}

bool CsgNode::eval(Vec3 p, bool prune) const {
  evals_.fetch_add(1, std::memory_order_relaxed);
  if (prune && !box_.contains(p)) return false;
  switch (kind_) {
    case Kind::kLeaf:
      return body_->contains(p);
    case Kind::kTransform: {
      // Orthogonal inverse: transpose.
      Vec3 d = p - trans_;
      Vec3 local{dot(rot_.col[0], d), dot(rot_.col[1], d), dot(rot_.col[2], d)};
      return left_->eval(local, prune);
    }
    case Kind::kBoolean: {
      bool l = left_->eval(p, prune);
      switch (op_) {
        case BoolOp::kUnion:
          return l ? true : right_->eval(p, prune);
        case BoolOp::kIntersection:
          return l ? right_->eval(p, prune) : false;
        case BoolOp::kDifference:
          return l ? !right_->eval(p, prune) : false;
      }
    }
  }
  return false;
}

void CsgNode::reset_eval_counts() const {
  evals_.store(0, std::memory_order_relaxed);
  if (left_) left_->reset_eval_counts();
  if (right_) right_->reset_eval_counts();
}

CsgNode::Stats CsgNode::stats() const {
  Stats s;
  s.nodes = 1;
  switch (kind_) {
    case Kind::kLeaf:
      s.depth = 1;
      s.leaves = 1;
      return s;
    case Kind::kTransform: {
      Stats c = left_->stats();
      s.depth = c.depth + 1;
      s.nodes += c.nodes;
      s.leaves = c.leaves;
      s.booleans = c.booleans;
      s.transforms = c.transforms + 1;
      return s;
    }
    case Kind::kBoolean: {
      Stats a = left_->stats();
      Stats b = right_->stats();
      s.depth = std::max(a.depth, b.depth) + 1;
      s.nodes += a.nodes + b.nodes;
      s.leaves = a.leaves + b.leaves;
      s.booleans = a.booleans + b.booleans + 1;
      s.transforms = a.transforms + b.transforms;
      return s;
    }
  }
  return s;
}

CsgNode::Ptr build_from_history(const std::vector<HistoryStep>& steps) {
  if (steps.empty()) throw Error("history: no steps");
  std::map<std::string, CsgNode::Ptr> defined;
  CsgNode::Ptr last;
  for (size_t i = 0; i < steps.size(); ++i) {
    const HistoryStep& s = steps[i];
    CsgNode::Ptr node;
    if (s.body) {
      node = CsgNode::leaf(s.body);
    } else if (s.node) {
      node = s.node;
    } else if (s.boolean) {
      auto a = defined.find(s.boolean->a);
      auto b = defined.find(s.boolean->b);
      if (a == defined.end())
        throw Error("history: step " + std::to_string(i) + " references undefined body '" +
                    s.boolean->a + "'");
      if (b == defined.end())
        throw Error("history: step " + std::to_string(i) + " references undefined body '" +
                    s.boolean->b + "'");
      node = CsgNode::boolean(s.boolean->op, a->second, b->second);
    } else {
      throw Error("history: step " + std::to_string(i) + " is empty");
    }
    if (!s.result.empty()) defined[s.result] = node;
    last = node;
  }
  return last;
}

namespace {

// Gathers the maximal run of one commutative operation.
void gather_run(const CsgNode::Ptr& node, BoolOp op, std::vector<CsgNode::Ptr>& terms) {
  if (node->is_boolean() && node->op() == op &&
      (op == BoolOp::kUnion || op == BoolOp::kIntersection)) {
    gather_run(node->left(), op, terms);
    gather_run(node->right(), op, terms);
  } else {
    terms.push_back(node);
  }
}

CsgNode::Ptr balanced(BoolOp op, const std::vector<CsgNode::Ptr>& terms, size_t lo, size_t hi) {
  if (hi - lo == 1) return terms[lo];
  size_t mid = lo + (hi - lo) / 2;
  return CsgNode::boolean(op, balanced(op, terms, lo, mid), balanced(op, terms, mid, hi));
}

}  // namespace

CsgNode::Ptr rebalance(const CsgNode::Ptr& root) {
  if (!root->is_boolean()) return root;
  BoolOp op = root->op();
  if (op == BoolOp::kDifference) {
    // ((A \ B) \ C) == A \ (B u C): collect the subtracted chain.
    std::vector<CsgNode::Ptr> subtracted;
    CsgNode::Ptr base = root;
    while (base->is_boolean() && base->op() == BoolOp::kDifference) {
      subtracted.push_back(rebalance(base->right()));
      base = base->left();
    }
    std::reverse(subtracted.begin(), subtracted.end());
    CsgNode::Ptr tool = balanced(BoolOp::kUnion, subtracted, 0, subtracted.size());
    return CsgNode::boolean(BoolOp::kDifference, rebalance(base), tool);
  }
  std::vector<CsgNode::Ptr> terms;
  gather_run(root, op, terms);
  for (auto& t : terms) t = rebalance(t);
  return balanced(op, terms, 0, terms.size());
}

namespace {

// Local frame with the edge along z and the axes pointing into the material
// (opposite the outward face normals); the edge sits at the local origin.
Frame edge_frame(const EdgeSpec& edge) {
  Vec3 ez = normalized(edge.b - edge.a);
  Vec3 n1 = normalized(edge.n1);
  Vec3 n2 = normalized(edge.n2);
  if (std::abs(dot(n1, ez)) > 1e-9 || std::abs(dot(n2, ez)) > 1e-9)
    throw Error("edge: face normals must be perpendicular to the edge");
  if (std::abs(dot(n1, n2)) > 1e-9)
    throw Error("edge: adjacent faces must be perpendicular");
  if (dot(cross(n1, n2), ez) < 0.0) std::swap(n1, n2);
  return Frame(edge.a, -n1, -n2, ez);
}

}  // namespace

CsgNode::Ptr make_chamfer(CsgNode::Ptr target, const EdgeSpec& edge, double inset) {
  if (inset == 0.0) return target;
  if (inset < 0.0) throw Error("chamfer: negative inset");
  if (inset > edge.clearance) throw Error("chamfer: inset exceeds the edge clearance");
  Frame f = edge_frame(edge);
  double len = distance(edge.a, edge.b);
  double eps = 1e-9 * len;
  // Triangular prism between the faces and the 45 degree cut plane.
  Wedge wedge{{0.0, 0.0, -eps}, {inset, inset, len + eps}};
  auto tool = CsgNode::leaf(std::make_shared<SimplePrimitive>(wedge, f));
  return CsgNode::boolean(BoolOp::kDifference, std::move(target), tool);
}

CsgNode::Ptr make_fillet(CsgNode::Ptr target, const EdgeSpec& edge, double radius) {
  if (radius == 0.0) return target;
  if (radius < 0.0) throw Error("fillet: negative radius");
  if (radius > edge.clearance) throw Error("fillet: radius exceeds the edge clearance");
  Frame f = edge_frame(edge);
  double len = distance(edge.a, edge.b);
  double eps = 1e-9 * len;
  // Corner prism minus the rounding cylinder at the inner corner.
  auto corner = CsgNode::leaf(std::make_shared<SimplePrimitive>(
      Cuboid{{0.0, 0.0, -eps}, {radius, radius, len + eps}}, f));
  auto round = CsgNode::leaf(std::make_shared<SimplePrimitive>(
      Cylinder{{radius, radius, -2.0 * eps}, radius, len + 4.0 * eps}, f));
  auto tool = CsgNode::boolean(BoolOp::kDifference, corner, round);
  return CsgNode::boolean(BoolOp::kDifference, std::move(target), tool);
}

CsgNode::Ptr make_hole(CsgNode::Ptr target, Vec3 axis_point, Vec3 axis_dir, double radius,
                       double depth) {
  if (!(radius > 0.0)) throw Error("hole: radius must be positive");
  if (!(depth > 0.0)) throw Error("hole: depth must be positive");
  Vec3 ez = normalized(axis_dir);
  Vec3 e1 = ez.x * ez.x <= 0.5 ? Vec3{1, 0, 0} : Vec3{0, 0, 1};
  e1 = normalized(e1 - ez * dot(e1, ez));
  Frame f(axis_point, e1, cross(ez, e1), ez);
  auto tool =
      CsgNode::leaf(std::make_shared<SimplePrimitive>(Cylinder{{0, 0, 0}, radius, depth}, f));
  return CsgNode::boolean(BoolOp::kDifference, std::move(target), tool);
}

}  // namespace geocell
