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

#include "geocell/integrate.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>

namespace geocell {

const GaussRule& gauss_rule(int n) {
  if (n < 1 || n > 64) throw Error("gauss: order out of range");
  static std::map<int, GaussRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GaussRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int k = 0; k < (n + 1) / 2; ++k) {
    double x = std::cos(kPi * (k + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.x[k] = -x;
    rule.w[k] = w;
    rule.x[n - 1 - k] = x;
    rule.w[n - 1 - k] = w;
  }
  if (n % 2 == 1) {
    rule.x[n / 2] = 0.0;
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

double pairwise_sum(const std::vector<double>& values) {
  std::function<double(size_t, size_t)> rec = [&](size_t lo, size_t hi) -> double {
    if (hi == lo) return 0.0;
    if (hi - lo == 1) return values[lo];
    size_t mid = lo + (hi - lo) / 2;
    return rec(lo, mid) + rec(mid, hi);
  };
  return rec(0, values.size());
}

template <class V>
PartitionT<V>::PartitionT(BoxT<V> box, Predicate membership, int k_max, int k_min)
    : membership_(std::move(membership)), k_max_(k_max), k_min_(std::min(k_min, k_max)) {
  if (k_max_ < 0) throw Error("partition: negative depth");
  nodes_.push_back({box, 0, CellClass::kCut, -1});
  build(0);
}

template <class V>
CellClass PartitionT<V>::classify(const BoxT<V>& box) const {
  // 3^dim sample grid: corners, center, and face/edge midpoints. Corner-only
  // detection misses thin features one level before refinement catches them.
  constexpr int dim = V::kDim;
  int total = 1;
  for (int d = 0; d < dim; ++d) total *= 3;
  bool first = membership_(box.lo);
  for (int s = 1; s < total; ++s) {
    V p;
    int rem = s;
    for (int d = 0; d < dim; ++d) {
      p[d] = box.lo[d] + (box.hi[d] - box.lo[d]) * (rem % 3) * 0.5;
      rem /= 3;
    }
    if (membership_(p) != first) return CellClass::kCut;
  }
  return first ? CellClass::kInside : CellClass::kOutside;
}

template <class V>
int PartitionT<V>::build(int index) {
  if (nodes_[index].level >= k_min_) {
    nodes_[index].cls = classify(nodes_[index].box);
    if (nodes_[index].cls != CellClass::kCut || nodes_[index].level >= k_max_) return index;
  }

  constexpr int dim = V::kDim;
  const int n_children = 1 << dim;
  const BoxT<V> box = nodes_[index].box;
  const int level = nodes_[index].level;
  const V mid = box.center();

  int child0 = static_cast<int>(nodes_.size());
  nodes_[index].child0 = child0;
  for (int c = 0; c < n_children; ++c) {
    BoxT<V> cb;
    for (int d = 0; d < dim; ++d) {
      cb.lo[d] = (c >> d) & 1 ? mid[d] : box.lo[d];
      cb.hi[d] = (c >> d) & 1 ? box.hi[d] : mid[d];
    }
    nodes_.push_back({cb, level + 1, CellClass::kCut, -1});
  }
  for (int c = 0; c < n_children; ++c) build(child0 + c);
  return index;
}

template class PartitionT<Vec2>;
template class PartitionT<Vec3>;

namespace {

template <class V, class F>
double integrate_alpha_impl(const PartitionT<V>& partition, const F& f, double q,
                            int gauss_order) {
  const GaussRule& rule = gauss_rule(gauss_order);
  const double alpha_out = std::isinf(q) ? 0.0 : std::pow(10.0, -q);
  constexpr int dim = V::kDim;

  std::vector<double> leaf_sums;
  partition.for_each_leaf([&](const PartitionNodeT<V>& leaf) {
    if (leaf.cls == CellClass::kOutside && alpha_out == 0.0) return;
    V half, mid;
    double jac = 1.0;
    for (int d = 0; d < dim; ++d) {
      half[d] = 0.5 * (leaf.box.hi[d] - leaf.box.lo[d]);
      mid[d] = 0.5 * (leaf.box.hi[d] + leaf.box.lo[d]);
      jac *= half[d];
    }
    double sum = 0.0;
    int total = 1;
    for (int d = 0; d < dim; ++d) total *= gauss_order;
    for (int g = 0; g < total; ++g) {
      V p;
      double w = 1.0;
      int rem = g;
      for (int d = 0; d < dim; ++d) {
        int k = rem % gauss_order;
        rem /= gauss_order;
        p[d] = mid[d] + half[d] * rule.x[k];
        w *= rule.w[k];
      }
      double alpha;
      switch (leaf.cls) {
        case CellClass::kInside:
          alpha = 1.0;
          break;
        case CellClass::kOutside:
          alpha = alpha_out;
          break;
        default:
          alpha = partition.membership()(p) ? 1.0 : alpha_out;
      }
      if (alpha != 0.0) sum += w * alpha * f(p);
    }
    leaf_sums.push_back(sum * jac);
  });
  return pairwise_sum(leaf_sums);
}

}  // namespace

double integrate_alpha(const Partition3& partition, const std::function<double(Vec3)>& f, double q,
                       int gauss_order) {
  return integrate_alpha_impl(partition, f, q, gauss_order);
}

double integrate_alpha(const Partition2& partition, const std::function<double(Vec2)>& f, double q,
                       int gauss_order) {
  return integrate_alpha_impl(partition, f, q, gauss_order);
}

Moments compute_moments(const Body& geometry, Box3 box, int k_max, int gauss_order) {
  Partition3 partition(box, [&](Vec3 p) { return geometry.contains(p); }, k_max,
                       std::min(3, k_max));
  const GaussRule& rule = gauss_rule(gauss_order);

  // One pass for all ten integrands, leaf sums reduced pairwise.
  constexpr int kFields = 10;
  std::vector<double> sums[kFields];
  partition.for_each_leaf([&](const PartitionNodeT<Vec3>& leaf) {
    if (leaf.cls == CellClass::kOutside) return;
    Vec3 half = (leaf.box.hi - leaf.box.lo) * 0.5;
    Vec3 mid = leaf.box.center();
    double jac = half.x * half.y * half.z;
    double acc[kFields] = {};
    for (int i = 0; i < gauss_order; ++i)
      for (int j = 0; j < gauss_order; ++j)
        for (int k = 0; k < gauss_order; ++k) {
          Vec3 p{mid.x + half.x * rule.x[i], mid.y + half.y * rule.x[j],
                 mid.z + half.z * rule.x[k]};
          if (leaf.cls == CellClass::kCut && !partition.membership()(p)) continue;
          double w = rule.w[i] * rule.w[j] * rule.w[k];
          acc[0] += w;
          acc[1] += w * p.x;
          acc[2] += w * p.y;
          acc[3] += w * p.z;
          acc[4] += w * p.x * p.x;
          acc[5] += w * p.y * p.y;
          acc[6] += w * p.z * p.z;
          acc[7] += w * p.x * p.y;
          acc[8] += w * p.y * p.z;
          acc[9] += w * p.z * p.x;
        }
    for (int f = 0; f < kFields; ++f) sums[f].push_back(acc[f] * jac);
  });

  Moments m;
  m.volume = pairwise_sum(sums[0]);
  m.first = {pairwise_sum(sums[1]), pairwise_sum(sums[2]), pairwise_sum(sums[3])};
  for (int f = 0; f < 6; ++f) m.second[f] = pairwise_sum(sums[4 + f]);
  return m;
}

double compute_volume(const Body& geometry, Box3 box, int k_max, int gauss_order) {
  Partition3 partition(box, [&](Vec3 p) { return geometry.contains(p); }, k_max,
                       std::min(3, k_max));
  return integrate_alpha(partition, [](Vec3) { return 1.0; },
                         std::numeric_limits<double>::infinity(), gauss_order);
}

void dump_leaves(const Partition3& partition, std::ostream& os) {
  static const char* kNames[3] = {"inside", "outside", "cut"};
  partition.for_each_leaf([&](const PartitionNodeT<Vec3>& leaf) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%d %.17g %.17g %.17g %.17g %.17g %.17g %s\n", leaf.level,
                  leaf.box.lo.x, leaf.box.lo.y, leaf.box.lo.z, leaf.box.hi.x, leaf.box.hi.y,
                  leaf.box.hi.z, kNames[static_cast<int>(leaf.cls)]);
    os << buf;
  });
}

}  // namespace geocell
