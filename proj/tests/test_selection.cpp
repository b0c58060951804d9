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

#include <vanishkit/selection.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

using namespace vanishkit;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

Feature make_feature(int id, double x, double y, double size = 2.0, double angle = 0.0)
{
  Feature f;
  f.id = id;
  f.x = x;
  f.y = y;
  f.size = size;
  f.angle = angle;
  return f;
}

bool monotone_along(const std::vector<Feature>& feats,
                    const std::vector<int>& ids,
                    double tx,
                    double ty)
{
  std::vector<double> proj;
  for (int id : ids)
    proj.push_back(feats[static_cast<std::size_t>(id)].x * tx +
                   feats[static_cast<std::size_t>(id)].y * ty);
  return std::is_sorted(proj.begin(), proj.end()) ||
         std::is_sorted(proj.rbegin(), proj.rend());
}

}  // namespace

TEST_CASE("linearity_score hand-checked symmetric triple", "[selection]")
{
  // (0,0), (1,h), (2,0): the scatter matrix is diagonal, so for small h the
  // best line is horizontal through the centroid (1, h/3), giving mean
  // perpendicular distance (h/3 + 2h/3 + h/3)/3 = 4h/9 exactly.
  for (double h : {0.3, 0.9, 1.2}) {
    const std::vector<Point2> pts = {{0.0, 0.0}, {1.0, h}, {2.0, 0.0}};
    CHECK(linearity_score(pts) == Approx(4.0 * h / 9.0).epsilon(1e-12));
  }

  // The score is measured in pixels: doubling the offset doubles it.
  const std::vector<Point2> a = {{0.0, 0.0}, {1.0, 0.4}, {2.0, 0.0}};
  const std::vector<Point2> b = {{0.0, 0.0}, {1.0, 0.8}, {2.0, 0.0}};
  CHECK(linearity_score(b) == Approx(2.0 * linearity_score(a)).epsilon(1e-12));
}

TEST_CASE("linearity_score is rigid-motion invariant", "[selection]")
{
  const std::vector<Point2> base = {{0.0, 0.0}, {1.0, 0.9}, {2.0, 0.0}, {3.5, -0.2}};
  const double ref = linearity_score(base);
  const double ct = std::cos(0.7), st = std::sin(0.7);
  std::vector<Point2> moved;
  for (const Point2& p : base)
    moved.push_back({ct * p.x - st * p.y + 40.0, st * p.x + ct * p.y - 13.0});
  CHECK(linearity_score(moved) == Approx(ref).margin(1e-9));
}

TEST_CASE("linearity_score edge cases", "[selection]")
{
  const std::vector<Point2> collinear = {{0.0, 1.0}, {2.0, 2.0}, {4.0, 3.0}, {6.0, 4.0}};
  CHECK(linearity_score(collinear) < 1e-12);

  const std::vector<Point2> two = {{0.0, 0.0}, {1.0, 1.0}};
  CHECK_THROWS_WITH(linearity_score(two), ContainsSubstring("need at least 3 points"));

  const std::vector<Point2> same = {{5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}};
  CHECK_THROWS_WITH(linearity_score(same), ContainsSubstring("degenerate subset"));
}

TEST_CASE("angle_score", "[selection]")
{
  const std::vector<double> spot = {0.0, 0.1, 0.3};
  CHECK(angle_score(spot) == Approx(0.1).epsilon(1e-12));

  // Constant rotation step scores exactly zero.
  const std::vector<double> constant_step = {0.0, 0.5, 1.0, 1.5, 2.0};
  CHECK(angle_score(constant_step) == 0.0);

  // Differences wrap around the circle: |0.1 - (2pi-0.1)| is 0.2, not ~6.1.
  const std::vector<double> wrapped = {0.1, 2.0 * kPi - 0.1, 0.3};
  CHECK(angle_score(wrapped) == Approx(0.2).margin(1e-12));

  // A constant step across the wrap point also scores zero.
  const std::vector<double> wrap_step = {2.0 * kPi - 0.2, 0.1, 0.4};
  CHECK(angle_score(wrap_step) == Approx(0.0).margin(1e-12));

  const std::vector<double> two = {0.0, 0.1};
  CHECK_THROWS_WITH(angle_score(two), ContainsSubstring("need at least 3 angles"));
}

TEST_CASE("scale_score", "[selection]")
{
  const std::vector<double> spot = {4.0, 2.0, 2.0};
  CHECK(scale_score(spot) == Approx(1.0).epsilon(1e-12));

  // Geometric progressions score exactly zero in either direction.
  const std::vector<double> geo = {8.0, 4.0, 2.0, 1.0};
  CHECK(scale_score(geo) == 0.0);
  const std::vector<double> geo_up = {1.0, 3.0, 9.0, 27.0};
  CHECK(scale_score(geo_up) == 0.0);

  const std::vector<double> with_zero = {1.0, 0.0, 2.0};
  CHECK_THROWS_WITH(scale_score(with_zero), ContainsSubstring("sizes must be positive"));
  const std::vector<double> negative = {1.0, -1.0, 2.0};
  CHECK_THROWS_AS(scale_score(negative), std::invalid_argument);
  const std::vector<double> two = {1.0, 2.0};
  CHECK_THROWS_WITH(scale_score(two), ContainsSubstring("need at least 3 sizes"));
}

TEST_CASE("composite_score", "[selection]")
{
  CHECK(composite_score(1.0, 0.0, 0.0, 3) == Approx(1.0 / 9.0).epsilon(1e-15));
  CHECK(composite_score(0.5, 0.2, 0.3, 4) ==
        Approx(0.5 * std::exp(0.5) / 16.0).epsilon(1e-12));
  // Larger subsets are rewarded by the 1/N^2 factor.
  CHECK(composite_score(1.0, 0.1, 0.1, 10) < composite_score(1.0, 0.1, 0.1, 5));
  CHECK_THROWS_WITH(composite_score(1.0, 0.0, 0.0, 2),
                    ContainsSubstring("need at least 3 members"));
}

TEST_CASE("order_along_line sorts by projection with id ties", "[selection]")
{
  std::vector<Feature> feats;
  for (int i = 0; i < 4; ++i)
    feats.push_back(make_feature(i, i, i));  // along the diagonal
  const std::vector<int> scrambled = {2, 0, 3, 1};
  const std::vector<int> ordered = order_along_line(feats, scrambled);
  CHECK(ordered == std::vector<int>{0, 1, 2, 3});

  // Coincident positions fall back to ascending id.
  std::vector<Feature> dup;
  dup.push_back(make_feature(0, 1.0, 1.0));
  dup.push_back(make_feature(1, 0.0, 0.0));
  dup.push_back(make_feature(2, 1.0, 1.0));
  const std::vector<int> with_ties = order_along_line(dup, std::vector<int>{2, 1, 0});
  // Whatever the tangent sign, ids 0 and 2 (same position) stay adjacent
  // and in ascending id order.
  const auto pos0 = std::find(with_ties.begin(), with_ties.end(), 0);
  const auto pos2 = std::find(with_ties.begin(), with_ties.end(), 2);
  CHECK(pos2 - pos0 == 1);

  const std::vector<int> one = {0};
  CHECK_THROWS_AS(order_along_line(feats, one), std::invalid_argument);
}

TEST_CASE("score_subset of a perfect recurrence is near zero", "[selection]")
{
  // Collinear positions, constant angle step, geometric sizes.
  std::vector<Feature> feats;
  for (int i = 0; i < 6; ++i)
    feats.push_back(make_feature(i, 10.0 * i, 5.0 * i, 4.0 * std::pow(0.8, i), 0.15 * i));
  std::vector<int> ids = {0, 1, 2, 3, 4, 5};
  const ScoreBundle s = score_subset(feats, ids);
  CHECK(s.linearity < 1e-9);
  CHECK(s.angle == Approx(0.0).margin(1e-12));
  CHECK(s.scale == Approx(0.0).margin(1e-12));
  CHECK(s.composite < 1e-9);
}

TEST_CASE("forward_select recovers a planted perfect run", "[selection]")
{
  std::vector<Feature> feats;
  for (int i = 0; i < 6; ++i)
    feats.push_back(make_feature(i, 12.0 * i, 0.0, 5.0 * std::pow(0.85, i), 0.1 * i));
  const std::vector<int> pool = {0, 1, 2, 3, 4, 5};
  const std::vector<OrderedSubset> subsets = forward_select(feats, pool);
  REQUIRE(subsets.size() == 1);
  const std::set<int> members(subsets[0].feature_ids.begin(), subsets[0].feature_ids.end());
  CHECK(members == std::set<int>{0, 1, 2, 3, 4, 5});
  CHECK(monotone_along(feats, subsets[0].feature_ids, 1.0, 0.0));
}

TEST_CASE("forward_select separates two planted runs and drops outliers",
          "[selection]")
{
  std::vector<Feature> feats;
  // Run A: along y = 0.
  for (int i = 0; i < 5; ++i)
    feats.push_back(make_feature(i, 10.0 * i, 0.0, 4.0 * std::pow(0.8, i), 0.1 * i));
  // Run B: along y = x + 50.
  for (int i = 0; i < 5; ++i)
    feats.push_back(make_feature(5 + i, 10.0 * i, 10.0 * i + 50.0,
                                 3.0 * std::pow(0.9, i), 0.2 * i));
  // Two isolated outliers.
  feats.push_back(make_feature(10, 7.0, 23.0, 2.2, 1.7));
  feats.push_back(make_feature(11, 33.0, 12.0, 5.0, 0.3));

  std::vector<int> pool(12);
  for (int i = 0; i < 12; ++i)
    pool[static_cast<std::size_t>(i)] = i;

  const std::vector<OrderedSubset> subsets = forward_select(feats, pool);
  REQUIRE(subsets.size() == 2);
  std::vector<std::set<int>> got;
  for (const auto& s : subsets)
    got.emplace_back(s.feature_ids.begin(), s.feature_ids.end());
  const std::set<int> run_a = {0, 1, 2, 3, 4};
  const std::set<int> run_b = {5, 6, 7, 8, 9};
  CHECK(((got[0] == run_a && got[1] == run_b) || (got[0] == run_b && got[1] == run_a)));
  for (const auto& s : subsets) {
    CHECK(std::find(s.feature_ids.begin(), s.feature_ids.end(), 10) == s.feature_ids.end());
    CHECK(std::find(s.feature_ids.begin(), s.feature_ids.end(), 11) == s.feature_ids.end());
  }
}

TEST_CASE("forward_select rejects groups with no acceptable run", "[selection]")
{
  // A wide triangle: every triple has mean line distance far above the
  // acceptance threshold once divided by 9.
  std::vector<Feature> feats;
  feats.push_back(make_feature(0, 0.0, 0.0));
  feats.push_back(make_feature(1, 100.0, 0.0));
  feats.push_back(make_feature(2, 50.0, 90.0));
  CHECK(forward_select(feats, {0, 1, 2}).empty());
}

TEST_CASE("forward_select degenerate and invalid inputs", "[selection]")
{
  std::vector<Feature> feats;
  for (int i = 0; i < 4; ++i)
    feats.push_back(make_feature(i, 5.0, 5.0));
  CHECK(forward_select(feats, {0, 1, 2, 3}).empty());
  CHECK(forward_select(feats, {0, 1}).empty());  // fewer than 3 members

  SelectionConfig bad;
  bad.accept_threshold = 0.0;
  CHECK_THROWS_AS(forward_select(feats, {0, 1, 2, 3}, bad), std::invalid_argument);
  bad = SelectionConfig{};
  bad.growth_factor = 0.9;
  CHECK_THROWS_AS(forward_select(feats, {0, 1, 2, 3}, bad), std::invalid_argument);
}

TEST_CASE("forward_select uses pair seeding above the exhaustive bound",
          "[selection]")
{
  // 14 members (> max_exhaustive = 12): a perfect 8-run plus 6 scatter
  // points. The closest-pair seeding must still find the run. The scatter
  // points sit on a hexagon, so every scatter triple is a fat triangle whose
  // composite score stays above the acceptance threshold.
  std::vector<Feature> feats;
  for (int i = 0; i < 8; ++i)
    feats.push_back(make_feature(i, 8.0 * i, 0.0, 6.0 * std::pow(0.82, i), 0.12 * i));
  for (int i = 0; i < 6; ++i) {
    const double a = deg2rad(15.0 + 60.0 * i);
    feats.push_back(make_feature(8 + i, 33.0 + 27.0 * std::cos(a), 45.0 + 27.0 * std::sin(a),
                                 2.0 + 0.3 * i, 0.9 + 0.4 * i));
  }

  std::vector<int> pool(14);
  for (int i = 0; i < 14; ++i)
    pool[static_cast<std::size_t>(i)] = i;
  const std::vector<OrderedSubset> subsets = forward_select(feats, pool);
  REQUIRE_FALSE(subsets.empty());
  const std::set<int> members(subsets[0].feature_ids.begin(), subsets[0].feature_ids.end());
  CHECK(members == std::set<int>{0, 1, 2, 3, 4, 5, 6, 7});
}
