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
#include <functional>
#include <iosfwd>
#include <vector>

#include "geocell/body.hpp"
#include "geocell/vec.hpp"

namespace geocell {

/// Gauss-Legendre rule with n points on [-1, 1].
struct GaussRule {
  std::vector<double> x, w;
};
const GaussRule& gauss_rule(int n);

/// Numerically reproducible reduction: parallel and serial evaluations sum
/// the same tree.
double pairwise_sum(const std::vector<double>& values);

enum class CellClass : std::uint8_t { kInside = 0, kOutside = 1, kCut = 2 };

template <class V>
struct PartitionNodeT {
  BoxT<V> box;
  int level = 0;
  CellClass cls = CellClass::kCut;
  int child0 = -1;  // 2^dim children, contiguous, when >= 0
};

/// Adaptive 2^dim-tree over a box: cells whose 3^dim membership samples
/// disagree are subdivided until `k_max`. Uniform cells stop early.
/// `k_min` forces subdivision before any classification, which keeps thin
/// features from slipping between the samples of a large box.
template <class V>
class PartitionT {
 public:
  using Predicate = std::function<bool(V)>;

  PartitionT(BoxT<V> box, Predicate membership, int k_max, int k_min = 0);

  const std::vector<PartitionNodeT<V>>& nodes() const { return nodes_; }
  const Predicate& membership() const { return membership_; }
  BoxT<V> box() const { return nodes_.front().box; }
  int k_max() const { return k_max_; }

  template <class F>
  void for_each_leaf(F&& f) const {
    for (const auto& n : nodes_)
      if (n.child0 < 0) f(n);
  }

  int leaf_count(CellClass cls) const {
    int c = 0;
    for_each_leaf([&](const PartitionNodeT<V>& n) { c += n.cls == cls ? 1 : 0; });
    return c;
  }

  bool any_physical() const {
    for (const auto& n : nodes_)
      if (n.child0 < 0 && n.cls != CellClass::kOutside) return true;
    return false;
  }

 private:
  int build(int index);
  CellClass classify(const BoxT<V>& box) const;

  Predicate membership_;
  int k_max_;
  int k_min_;
  std::vector<PartitionNodeT<V>> nodes_;
};

using Partition2 = PartitionT<Vec2>;
using Partition3 = PartitionT<Vec3>;

extern template class PartitionT<Vec2>;
extern template class PartitionT<Vec3>;

/// Composed quadrature of alpha(x) * f(x) over the partition. Inside leaves
/// use alpha = 1, outside leaves 10^-q (exactly zero for infinite q), cut
/// leaves evaluate the membership per Gauss point.
double integrate_alpha(const Partition3& partition, const std::function<double(Vec3)>& f, double q,
                       int gauss_order);
double integrate_alpha(const Partition2& partition, const std::function<double(Vec2)>& f, double q,
                       int gauss_order);

struct Moments {
  double volume = 0.0;
  Vec3 first{};        // integrals of x, y, z
  double second[6] = {0, 0, 0, 0, 0, 0};  // xx, yy, zz, xy, yz, zx about the origin

  Vec3 centroid() const { return first / volume; }
};

/// Volume, first and second moments of the geometry clipped to `box`,
/// integrated with a hard zero in the fictitious domain.
Moments compute_moments(const Body& geometry, Box3 box, int k_max, int gauss_order);
double compute_volume(const Body& geometry, Box3 box, int k_max, int gauss_order);

/// One line per leaf: level, box bounds, class. Stable order for diffing.
void dump_leaves(const Partition3& partition, std::ostream& os);

}  // namespace geocell
