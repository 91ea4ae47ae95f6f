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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "geocell/body.hpp"
#include "geocell/extended.hpp"
#include "geocell/primitives.hpp"

namespace geocell {

enum class BoolOp { kUnion, kIntersection, kDifference };

/// Node of the construction tree: a body leaf, a boolean bifurcation, or a
/// rigid/mirror placement of a single child. Immutable after build; the
/// evaluation counters are relaxed atomics for the pruning tests.
class CsgNode : public Body {
 public:
  using Ptr = std::shared_ptr<const CsgNode>;

  static Ptr leaf(std::shared_ptr<const Body> body);
  static Ptr boolean(BoolOp op, Ptr left, Ptr right);
  /// Child geometry placed by x_world = R x_child + t; R orthogonal with
  /// det +1 (rigid) or -1 (mirror).
  static Ptr transformed(Mat3 rotation, Vec3 translation, Ptr child);
  static Ptr rigid(const Frame& placement, Ptr child);
  static Ptr mirrored(Vec3 plane_point, Vec3 plane_normal, Ptr child);

  bool contains(Vec3 p) const override { return eval(p, true); }
  /// Evaluation without the bounding-box early-out (equivalence tests).
  bool contains_unpruned(Vec3 p) const { return eval(p, false); }
  Box3 bounding_box() const override { return box_; }

  bool is_leaf() const { return kind_ == Kind::kLeaf; }
  bool is_boolean() const { return kind_ == Kind::kBoolean; }
  BoolOp op() const { return op_; }
  const Ptr& left() const { return left_; }
  const Ptr& right() const { return right_; }
  const Ptr& child() const { return left_; }
  const std::shared_ptr<const Body>& body() const { return body_; }

  std::uint64_t eval_count() const { return evals_.load(std::memory_order_relaxed); }
  void reset_eval_counts() const;

  struct Stats {
    int depth = 0;
    int nodes = 0;
    int leaves = 0;
    int booleans = 0;
    int transforms = 0;
  };
  Stats stats() const;

 private:
  enum class Kind { kLeaf, kBoolean, kTransform };
  CsgNode() = default;

  bool eval(Vec3 p, bool prune) const;

  Kind kind_ = Kind::kLeaf;
  BoolOp op_ = BoolOp::kUnion;
  std::shared_ptr<const Body> body_;
  Ptr left_, right_;
  Mat3 rot_;        // child -> world
  Vec3 trans_{};
  Box3 box_;
  mutable std::atomic<std::uint64_t> evals_{0};
};

/// One record of a construction history. Exactly one of `body`, `node`, or
/// `boolean` is set; `result` names the step for later references.
struct HistoryStep {
  std::string result;
  std::shared_ptr<const Body> body;
  CsgNode::Ptr node;
  struct BoolRef {
    BoolOp op;
    std::string a, b;
  };
  std::optional<BoolRef> boolean;
};

/// Folds the steps in order into a left-deep tree; the last step is the
/// root. Dangling references raise an error naming the step index.
CsgNode::Ptr build_from_history(const std::vector<HistoryStep>& steps);

/// Rebalances runs of the same commutative operation into flat binary
/// subtrees; difference chains become one difference against a balanced
/// union. Membership is preserved exactly.
CsgNode::Ptr rebalance(const CsgNode::Ptr& root);

/// Edge of a body with perpendicular adjacent faces, described by its end
/// points and the outward face normals. `clearance` is the available width
/// along the faces for chamfer/fillet validation.
struct EdgeSpec {
  Vec3 a, b;
  Vec3 n1, n2;
  double clearance = std::numeric_limits<double>::infinity();
};

/// Extended operations emitted as pure boolean subtrees over simple
/// primitives.
CsgNode::Ptr make_chamfer(CsgNode::Ptr target, const EdgeSpec& edge, double inset);
CsgNode::Ptr make_fillet(CsgNode::Ptr target, const EdgeSpec& edge, double radius);
CsgNode::Ptr make_hole(CsgNode::Ptr target, Vec3 axis_point, Vec3 axis_dir, double radius,
                       double depth);

}  // namespace geocell
