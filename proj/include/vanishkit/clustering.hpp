/*
 * Copyright (c) 2026, The VanishKit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <vanishkit/features.hpp>
#include <vanishkit/stats.hpp>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace vanishkit {

/// Symmetric pairwise distance matrix in condensed upper-triangle storage.
struct DistanceMatrix
{
  int n = 0;
  std::vector<double> condensed;  ///< row-major upper triangle, i < j

  double at(int i, int j) const
  {
    if (i == j)
      return 0.0;
    if (i > j)
      std::swap(i, j);
    const std::size_t idx = static_cast<std::size_t>(i) * (2 * n - i - 1) / 2 +
                            static_cast<std::size_t>(j - i - 1);
    return condensed[idx];
  }
};

/// Pairwise descriptor distances between features. Requires at least two
/// features.
inline DistanceMatrix build_distance_matrix(const std::vector<Feature>& feats)
{
  const int n = static_cast<int>(feats.size());
  if (n < 2)
    throw std::invalid_argument("build_distance_matrix: need at least 2 features");
  DistanceMatrix dm;
  dm.n = n;
  dm.condensed.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      dm.condensed.push_back(descriptor_distance(feats[static_cast<std::size_t>(i)],
                                                 feats[static_cast<std::size_t>(j)]));
  return dm;
}

/// One agglomeration step. Node ids follow the usual dendrogram scheme:
/// leaves are 0..n-1 and the k-th merge (0-based) creates node n+k. `a` is
/// the cluster containing the smaller lowest leaf id.
struct DendrogramMerge
{
  int a = 0;
  int b = 0;
  double distance = 0.0;
};

struct Dendrogram
{
  int leaf_count = 0;
  std::vector<DendrogramMerge> merges;  ///< exactly leaf_count - 1 entries
};

/// Single-linkage agglomerative clustering.
///
/// The cluster-pair distance is the minimum inter-point distance. Ties are
/// broken deterministically by comparing (distance, smaller lowest-leaf-id,
/// larger lowest-leaf-id), which totally orders candidate pairs, so the
/// output is independent of iteration quirks. Runs in O(n^2) via
/// nearest-neighbor bookkeeping. Merge distances are nondecreasing.
inline Dendrogram single_linkage(const DistanceMatrix& dm)
{
  const int n = dm.n;
  if (n < 2)
    throw std::invalid_argument("single_linkage: need at least 2 items");

  // Working state per slot. Slot i starts as leaf i; merging keeps the slot
  // whose cluster contains the smaller lowest leaf id.
  std::vector<double> dist(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      dist[static_cast<std::size_t>(i) * n + j] = dm.at(i, j);
  std::vector<bool> active(static_cast<std::size_t>(n), true);
  std::vector<int> min_leaf(static_cast<std::size_t>(n));
  std::vector<int> node_id(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    min_leaf[static_cast<std::size_t>(i)] = i;
    node_id[static_cast<std::size_t>(i)] = i;
  }

  using Key = std::tuple<double, int, int>;  // (distance, min leaf, max leaf)
  auto pair_key = [&](int i, int j) -> Key {
    const int li = min_leaf[static_cast<std::size_t>(i)];
    const int lj = min_leaf[static_cast<std::size_t>(j)];
    return {dist[static_cast<std::size_t>(i) * n + j], std::min(li, lj), std::max(li, lj)};
  };

  // nn[i] = best merge partner for slot i under the tie-break ordering.
  std::vector<int> nn(static_cast<std::size_t>(n), -1);
  auto rescan_nn = [&](int i) {
    int best = -1;
    Key best_key{std::numeric_limits<double>::infinity(), 0, 0};
    for (int j = 0; j < n; ++j) {
      if (j == i || !active[static_cast<std::size_t>(j)])
        continue;
      const Key k = pair_key(i, j);
      if (best < 0 || k < best_key) {
        best = j;
        best_key = k;
      }
    }
    nn[static_cast<std::size_t>(i)] = best;
  };
  for (int i = 0; i < n; ++i)
    rescan_nn(i);

  Dendrogram out;
  out.leaf_count = n;
  out.merges.reserve(static_cast<std::size_t>(n - 1));

  for (int step = 0; step < n - 1; ++step) {
    int ai = -1;
    Key best_key{std::numeric_limits<double>::infinity(), 0, 0};
    for (int i = 0; i < n; ++i) {
      if (!active[static_cast<std::size_t>(i)] || nn[static_cast<std::size_t>(i)] < 0)
        continue;
      const Key k = pair_key(i, nn[static_cast<std::size_t>(i)]);
      if (ai < 0 || k < best_key) {
        ai = i;
        best_key = k;
      }
    }
    int bi = nn[static_cast<std::size_t>(ai)];
    // Keep the slot owning the smaller lowest leaf id as the survivor.
    if (min_leaf[static_cast<std::size_t>(bi)] < min_leaf[static_cast<std::size_t>(ai)])
      std::swap(ai, bi);

    out.merges.push_back({node_id[static_cast<std::size_t>(ai)],
                          node_id[static_cast<std::size_t>(bi)],
                          dist[static_cast<std::size_t>(ai) * n + bi]});
    node_id[static_cast<std::size_t>(ai)] = n + step;
    active[static_cast<std::size_t>(bi)] = false;

    // Single-linkage row update: distances to the merged cluster are the
    // minimum over the two constituents.
    for (int j = 0; j < n; ++j) {
      if (!active[static_cast<std::size_t>(j)] || j == ai)
        continue;
      const double dj = std::min(dist[static_cast<std::size_t>(ai) * n + j],
                                 dist[static_cast<std::size_t>(bi) * n + j]);
      dist[static_cast<std::size_t>(ai) * n + j] = dj;
      dist[static_cast<std::size_t>(j) * n + ai] = dj;
    }

    // Repair nearest-neighbor pointers. Distances to the survivor only
    // shrank, so pointers at A/B redirect to A; others re-check against A.
    rescan_nn(ai);
    for (int j = 0; j < n; ++j) {
      if (!active[static_cast<std::size_t>(j)] || j == ai)
        continue;
      const int cur = nn[static_cast<std::size_t>(j)];
      if (cur == ai || cur == bi) {
        nn[static_cast<std::size_t>(j)] = ai;
      } else if (cur >= 0) {
        if (pair_key(j, ai) < pair_key(j, cur))
          nn[static_cast<std::size_t>(j)] = ai;
      } else {
        nn[static_cast<std::size_t>(j)] = ai;
      }
    }
  }
  return out;
}

/// Controls how the dendrogram is cut into feature groups ("visual words").
struct CutPolicy
{
  /// Absolute merge-distance threshold; unset selects the percentile rule.
  std::optional<double> threshold;
  /// Percentile of all merge distances used when `threshold` is unset.
  double percentile = 50.0;
  int min_size = 3;   ///< groups smaller than this are discarded
  int max_size = 40;  ///< larger groups are split along the dendrogram
};

/// A group of mutually similar features (indices into the clustered list).
struct FeatureGroup
{
  std::vector<int> member_ids;  ///< ascending
  double cohesion = 0.0;        ///< merge distance at which the group formed
};

namespace detail {

/// Recursively splits dendrogram node `node` until every emitted part has
/// at most max_size leaves.
inline void split_oversize(const Dendrogram& dd,
                           int node,
                           int max_size,
                           const std::vector<std::vector<int>>& leaves_of,
                           std::vector<std::pair<int, double>>& parts)
{
  const int n = dd.leaf_count;
  const auto& leaves = leaves_of[static_cast<std::size_t>(node)];
  if (static_cast<int>(leaves.size()) <= max_size) {
    const double cohesion = node >= n ? dd.merges[static_cast<std::size_t>(node - n)].distance : 0.0;
    parts.emplace_back(node, cohesion);
    return;
  }
  const DendrogramMerge& m = dd.merges[static_cast<std::size_t>(node - n)];
  split_oversize(dd, m.a, max_size, leaves_of, parts);
  split_oversize(dd, m.b, max_size, leaves_of, parts);
}

}  // namespace detail

/// Cuts a dendrogram into feature groups.
///
/// All merges with distance <= threshold are applied (threshold from the
/// policy, or the configured percentile of merge distances when unset).
/// Components larger than max_size are split back along the dendrogram
/// until every part fits; components (or parts) smaller than min_size are
/// discarded. The groups therefore partition a subset of the leaves.
/// Groups are ordered by their smallest member id.
inline std::vector<FeatureGroup> cut_dendrogram(const Dendrogram& dd, const CutPolicy& policy)
{
  const int n = dd.leaf_count;
  if (n <= 0)
    return {};
  if (policy.min_size < 1 || policy.max_size < policy.min_size)
    throw std::invalid_argument("cut_dendrogram: invalid size bounds");

  double tau = 0.0;
  if (policy.threshold) {
    tau = *policy.threshold;
  } else if (!dd.merges.empty()) {
    std::vector<double> dists;
    dists.reserve(dd.merges.size());
    for (const auto& m : dd.merges)
      dists.push_back(m.distance);
    tau = percentile(dists, policy.percentile);
  }

  // Leaf sets per dendrogram node (only needed up to the applied prefix,
  // but building all of them keeps the code simple at O(n^2) worst case).
  const int total_nodes = n + static_cast<int>(dd.merges.size());
  std::vector<std::vector<int>> leaves_of(static_cast<std::size_t>(total_nodes));
  for (int i = 0; i < n; ++i)
    leaves_of[static_cast<std::size_t>(i)] = {i};
  for (std::size_t k = 0; k < dd.merges.size(); ++k) {
    const auto& m = dd.merges[k];
    auto& dst = leaves_of[static_cast<std::size_t>(n) + k];
    const auto& la = leaves_of[static_cast<std::size_t>(m.a)];
    const auto& lb = leaves_of[static_cast<std::size_t>(m.b)];
    dst.resize(la.size() + lb.size());
    std::merge(la.begin(), la.end(), lb.begin(), lb.end(), dst.begin());
  }

  // Apply the merge prefix with distance <= tau (distances are
  // nondecreasing, so the applied set is a prefix). A node is a component
  // root if it exists after the prefix and has not been merged into a
  // larger node.
  std::vector<bool> is_root(static_cast<std::size_t>(total_nodes), false);
  for (int i = 0; i < n; ++i)
    is_root[static_cast<std::size_t>(i)] = true;
  for (std::size_t k = 0; k < dd.merges.size(); ++k) {
    const auto& m = dd.merges[k];
    if (m.distance > tau)
      break;
    is_root[static_cast<std::size_t>(m.a)] = false;
    is_root[static_cast<std::size_t>(m.b)] = false;
    is_root[static_cast<std::size_t>(n) + k] = true;
  }

  std::vector<std::pair<int, double>> parts;  // (node, cohesion)
  for (int node = 0; node < total_nodes; ++node) {
    if (!is_root[static_cast<std::size_t>(node)])
      continue;
    detail::split_oversize(dd, node, policy.max_size, leaves_of, parts);
  }

  std::vector<FeatureGroup> groups;
  for (const auto& [node, cohesion] : parts) {
    const auto& leaves = leaves_of[static_cast<std::size_t>(node)];
    if (static_cast<int>(leaves.size()) < policy.min_size)
      continue;
    FeatureGroup g;
    g.member_ids = leaves;
    g.cohesion = cohesion;
    groups.push_back(std::move(g));
  }
  std::sort(groups.begin(), groups.end(), [](const FeatureGroup& a, const FeatureGroup& b) {
    return a.member_ids.front() < b.member_ids.front();
  });
  return groups;
}

}  // namespace vanishkit
