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
#include <vanishkit/geometry.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace vanishkit {

struct SelectionConfig
{
  double accept_threshold = 0.5;  ///< max composite score of a kept subset
  double growth_factor = 1.5;     ///< max allowed score growth per addition
  int max_exhaustive = 12;        ///< group size bound for exhaustive seeding
};

/// A recurring-feature subset ordered along its fitted line.
struct OrderedSubset
{
  std::vector<int> feature_ids;  ///< indices into the feature list, in line order
};

/// The component scores of a candidate subset. Lower is better throughout;
/// a perfectly collinear, evenly rotating, geometrically scaled subset
/// scores (0+, 0, 0).
struct ScoreBundle
{
  double linearity = 0.0;
  double angle = 0.0;
  double scale = 0.0;
  double composite = 0.0;
};

/// Mean perpendicular distance (in pixels) of the positions to their
/// total-least-squares line. Throws for fewer than 3 points or a degenerate
/// (all-identical) point set.
inline double linearity_score(std::span<const Point2> positions)
{
  if (positions.size() < 3)
    throw std::invalid_argument("linearity_score: need at least 3 points");
  HomLine line;
  try {
    line = fit_line_lsq(positions);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("linearity_score: degenerate subset");
  }
  double acc = 0.0;
  for (const Point2& p : positions)
    acc += std::abs(line.eval(p));
  return acc / static_cast<double>(positions.size());
}

namespace detail {

/// Absolute circular difference of two angles, in [0, pi].
inline double circular_diff(double a, double b)
{
  double d = std::fmod(std::abs(a - b), 2.0 * kPi);
  if (d > kPi)
    d = 2.0 * kPi - d;
  return d;
}

}  // namespace detail

/// Second-difference score of feature orientations along the subset order:
/// the mean over consecutive triples (A, B, C) of
/// | |angle(A)-angle(B)| - |angle(B)-angle(C)| |, with circular differences.
/// Zero means the orientation rotates by a constant step.
inline double angle_score(std::span<const double> angles)
{
  if (angles.size() < 3)
    throw std::invalid_argument("angle_score: need at least 3 angles");
  double acc = 0.0;
  for (std::size_t i = 0; i + 2 < angles.size(); ++i) {
    const double d1 = detail::circular_diff(angles[i], angles[i + 1]);
    const double d2 = detail::circular_diff(angles[i + 1], angles[i + 2]);
    acc += std::abs(d1 - d2);
  }
  return acc / static_cast<double>(angles.size() - 2);
}

/// Ratio-consistency score of feature sizes along the subset order: the
/// mean over consecutive triples (A, B, C) of
/// | size(A)/size(B) - size(B)/size(C) |. Zero means sizes follow a
/// geometric progression, as perspective projection of a repeating pattern
/// produces. Sizes must be positive.
inline double scale_score(std::span<const double> sizes)
{
  if (sizes.size() < 3)
    throw std::invalid_argument("scale_score: need at least 3 sizes");
  for (double s : sizes)
    if (!(s > 0.0))
      throw std::invalid_argument("scale_score: sizes must be positive");
  double acc = 0.0;
  for (std::size_t i = 0; i + 2 < sizes.size(); ++i)
    acc += std::abs(sizes[i] / sizes[i + 1] - sizes[i + 1] / sizes[i + 2]);
  return acc / static_cast<double>(sizes.size() - 2);
}

/// Composite subset score S = S_linearity * exp(S_angle + S_scale) / N^2.
/// The exponential keeps the angle/scale terms multiplicative without a
/// zero annihilating the product; the 1/N^2 factor rewards longer runs.
inline double composite_score(double linearity, double angle, double scale, int n)
{
  if (n < 3)
    throw std::invalid_argument("composite_score: need at least 3 members");
  return linearity * std::exp(angle + scale) / (static_cast<double>(n) * n);
}

/// Orders a candidate subset along its fitted line: members are sorted by
/// signed projection onto the line tangent (ties by feature id). Throws if
/// the member positions are degenerate.
inline std::vector<int> order_along_line(std::span<const Feature> feats,
                                         std::span<const int> member_ids)
{
  if (member_ids.size() < 2)
    throw std::invalid_argument("order_along_line: need at least 2 members");
  std::vector<Point2> pts;
  pts.reserve(member_ids.size());
  for (int id : member_ids)
    pts.push_back(feats[static_cast<std::size_t>(id)].position());
  const HomLine line = fit_line_lsq(pts);
  const Vec2 t = line.tangent();

  std::vector<int> ordered(member_ids.begin(), member_ids.end());
  std::sort(ordered.begin(), ordered.end(), [&](int ia, int ib) {
    const Feature& fa = feats[static_cast<std::size_t>(ia)];
    const Feature& fb = feats[static_cast<std::size_t>(ib)];
    const double ta = fa.x * t.x + fa.y * t.y;
    const double tb = fb.x * t.x + fb.y * t.y;
    if (ta != tb)
      return ta < tb;
    return ia < ib;
  });
  return ordered;
}

/// Scores an already-ordered subset. Throws on degenerate geometry (e.g.
/// all positions identical) like the component scores do.
inline ScoreBundle score_subset(std::span<const Feature> feats, std::span<const int> ordered_ids)
{
  std::vector<Point2> pts;
  std::vector<double> angles, sizes;
  pts.reserve(ordered_ids.size());
  angles.reserve(ordered_ids.size());
  sizes.reserve(ordered_ids.size());
  for (int id : ordered_ids) {
    const Feature& f = feats[static_cast<std::size_t>(id)];
    pts.push_back(f.position());
    angles.push_back(f.angle);
    sizes.push_back(f.size);
  }
  ScoreBundle s;
  s.linearity = linearity_score(pts);
  s.angle = angle_score(angles);
  s.scale = scale_score(sizes);
  s.composite = composite_score(s.linearity, s.angle, s.scale,
                                static_cast<int>(ordered_ids.size()));
  return s;
}

namespace detail {

/// Composite score of a candidate member set after ordering, or +inf when
/// the geometry is degenerate (such candidates are simply never selected).
/// Degenerate includes fewer than three pairwise-distinct positions: a
/// keypoint re-detected under several orientations yields coincident
/// members, and two spots scored as a many-member "line" would be exactly
/// collinear without witnessing any recurrence trail.
inline double safe_ordered_score(std::span<const Feature> feats,
                                 const std::vector<int>& members,
                                 std::vector<int>& ordered_out)
{
  std::vector<Point2> distinct;
  for (int id : members) {
    const Point2 p = feats[static_cast<std::size_t>(id)].position();
    bool seen = false;
    for (const Point2& q : distinct)
      if (q.x == p.x && q.y == p.y) {
        seen = true;
        break;
      }
    if (!seen) {
      distinct.push_back(p);
      if (distinct.size() >= 3)
        break;
    }
  }
  if (distinct.size() < 3) {
    ordered_out.clear();
    return std::numeric_limits<double>::infinity();
  }
  try {
    ordered_out = order_along_line(feats, members);
    return score_subset(feats, ordered_out).composite;
  } catch (const std::invalid_argument&) {
    ordered_out.clear();
    return std::numeric_limits<double>::infinity();
  }
}

/// Seed triples to try: every 3-combination for small pools; for large
/// pools, the 2N spatially closest pairs each extended by every remaining
/// member. The returned triples are in a deterministic order.
inline std::vector<std::array<int, 3>> seed_triples(std::span<const Feature> feats,
                                                    const std::vector<int>& pool,
                                                    int max_exhaustive)
{
  std::vector<std::array<int, 3>> seeds;
  const int m = static_cast<int>(pool.size());
  if (m <= max_exhaustive) {
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        for (int k = j + 1; k < m; ++k)
          seeds.push_back({pool[static_cast<std::size_t>(i)],
                           pool[static_cast<std::size_t>(j)],
                           pool[static_cast<std::size_t>(k)]});
    return seeds;
  }

  struct PairD
  {
    double d;
    int i, j;  // pool positions, i < j
  };
  std::vector<PairD> pairs;
  pairs.reserve(static_cast<std::size_t>(m) * (m - 1) / 2);
  for (int i = 0; i < m; ++i) {
    const Feature& fi = feats[static_cast<std::size_t>(pool[static_cast<std::size_t>(i)])];
    for (int j = i + 1; j < m; ++j) {
      const Feature& fj = feats[static_cast<std::size_t>(pool[static_cast<std::size_t>(j)])];
      pairs.push_back({std::hypot(fi.x - fj.x, fi.y - fj.y), i, j});
    }
  }
  const int keep = std::min<int>(static_cast<int>(pairs.size()), 2 * m);
  std::sort(pairs.begin(), pairs.end(), [](const PairD& a, const PairD& b) {
    if (a.d != b.d)
      return a.d < b.d;
    if (a.i != b.i)
      return a.i < b.i;
    return a.j < b.j;
  });
  pairs.resize(static_cast<std::size_t>(keep));
  for (const PairD& p : pairs)
    for (int k = 0; k < m; ++k) {
      if (k == p.i || k == p.j)
        continue;
      seeds.push_back({pool[static_cast<std::size_t>(p.i)],
                       pool[static_cast<std::size_t>(p.j)],
                       pool[static_cast<std::size_t>(k)]});
    }
  return seeds;
}

}  // namespace detail

/// Greedy forward selection of recurring-feature runs inside one group.
///
/// Starting from the best-scoring seed triple, members are added one at a
/// time, each time picking the addition with the lowest re-ordered
/// composite score; growth stops when the best addition would exceed
/// `growth_factor` times the current score (plus a tiny absolute slack for
/// exact-zero scores) or the accept threshold. A finished subset is kept
/// when its score is at or below `accept_threshold`; its members are then
/// removed from the pool and selection repeats while at least 3 members
/// remain. Groups with all-identical positions yield no subsets.
inline std::vector<OrderedSubset> forward_select(std::span<const Feature> feats,
                                                 const std::vector<int>& member_ids,
                                                 const SelectionConfig& config = {})
{
  if (config.accept_threshold <= 0.0 || config.growth_factor < 1.0)
    throw std::invalid_argument("forward_select: invalid configuration");
  constexpr double kScoreSlack = 1e-9;  // absolute slack on the growth gate

  std::vector<int> pool(member_ids);
  std::sort(pool.begin(), pool.end());
  std::vector<OrderedSubset> result;

  while (static_cast<int>(pool.size()) >= 3) {
    // Seed: best-scoring triple.
    const auto seeds = detail::seed_triples(feats, pool, config.max_exhaustive);
    double best_score = std::numeric_limits<double>::infinity();
    std::vector<int> best_ordered;
    for (const auto& s : seeds) {
      std::vector<int> members{s[0], s[1], s[2]};
      std::vector<int> ordered;
      const double sc = detail::safe_ordered_score(feats, members, ordered);
      if (sc < best_score) {
        best_score = sc;
        best_ordered = std::move(ordered);
      }
    }
    if (best_ordered.empty() || best_score > config.accept_threshold)
      break;  // no acceptable run starts in what remains

    // Grow greedily.
    std::vector<int> members = best_ordered;
    double cur_score = best_score;
    while (true) {
      double add_best = std::numeric_limits<double>::infinity();
      std::vector<int> add_ordered;
      int add_id = -1;
      for (int cand : pool) {
        if (std::find(members.begin(), members.end(), cand) != members.end())
          continue;
        std::vector<int> trial = members;
        trial.push_back(cand);
        std::vector<int> ordered;
        const double sc = detail::safe_ordered_score(feats, trial, ordered);
        if (sc < add_best) {
          add_best = sc;
          add_ordered = std::move(ordered);
          add_id = cand;
        }
      }
      if (add_id < 0)
        break;
      if (add_best > config.growth_factor * cur_score + kScoreSlack ||
          add_best > config.accept_threshold)
        break;
      members = std::move(add_ordered);
      cur_score = add_best;
    }

    OrderedSubset subset;
    subset.feature_ids = members;
    result.push_back(std::move(subset));
    for (int id : members)
      pool.erase(std::remove(pool.begin(), pool.end(), id), pool.end());
  }
  return result;
}

}  // namespace vanishkit
