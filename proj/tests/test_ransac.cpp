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

#include <vanishkit/ransac.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <vector>

using namespace vanishkit;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

/// Undirected line through `p` whose tangent makes angle `theta` with +x.
OrientedLine line_at(const Point2& p, double theta)
{
  const Vec2 normal{-std::sin(theta), std::cos(theta)};
  OrientedLine ol;
  ol.line = make_line(normal.x, normal.y, -(normal.x * p.x + normal.y * p.y));
  ol.anchor = p;
  ol.source = LineSource::Explicit;
  return ol;
}

/// Directed line anchored at `anchor` whose direction makes angle `theta`.
OrientedLine directed_line_at(const Point2& anchor, double theta)
{
  OrientedLine ol = line_at(anchor, theta);
  ol.direction = Vec2{std::cos(theta), std::sin(theta)};
  ol.source = LineSource::Implicit;
  return ol;
}

LinePool pool_of(std::vector<OrientedLine> lines)
{
  LinePool pool;
  pool.implicit_count = static_cast<int>(lines.size());
  pool.lines = std::move(lines);
  return pool;
}

/// Independent acute angle between two lines from their unit normals.
double oracle_acute_angle(const HomLine& a, const HomLine& b)
{
  const double cross = a.a * b.b - a.b * b.a;
  const double dot = a.a * b.a + a.b * b.b;
  return std::atan2(std::abs(cross), std::abs(dot));
}

/// Smallest eigenpair of a symmetric 3x3 matrix via the closed-form
/// trigonometric solution of the characteristic cubic — an independent
/// oracle that shares no code with the linear-algebra library.
double smallest_eig_trig(const double M[3][3], double v[3])
{
  const double p1 = M[0][1] * M[0][1] + M[0][2] * M[0][2] + M[1][2] * M[1][2];
  double lambda;
  if (p1 == 0.0) {
    // Diagonal matrix: pick the smallest diagonal entry.
    int k = 0;
    if (M[1][1] < M[k][k])
      k = 1;
    if (M[2][2] < M[k][k])
      k = 2;
    lambda = M[k][k];
    v[0] = v[1] = v[2] = 0.0;
    v[k] = 1.0;
    return lambda;
  }
  const double q = (M[0][0] + M[1][1] + M[2][2]) / 3.0;
  const double p2 = (M[0][0] - q) * (M[0][0] - q) + (M[1][1] - q) * (M[1][1] - q) +
                    (M[2][2] - q) * (M[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  double B[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      B[i][j] = (M[i][j] - (i == j ? q : 0.0)) / p;
  const double detB = B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                      B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                      B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0]);
  const double r = std::clamp(detB / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  // Smallest root of the characteristic cubic.
  lambda = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);

  // Eigenvector: the largest cross product of rows of (M - lambda I).
  const auto vector_for = [&](double lam) {
    double A[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        A[i][j] = M[i][j] - (i == j ? lam : 0.0);
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i) {
      const int j = (i + 1) % 3;
      const double cx = A[i][1] * A[j][2] - A[i][2] * A[j][1];
      const double cy = A[i][2] * A[j][0] - A[i][0] * A[j][2];
      const double cz = A[i][0] * A[j][1] - A[i][1] * A[j][0];
      const double norm = std::sqrt(cx * cx + cy * cy + cz * cz);
      if (norm > best_norm) {
        best_norm = norm;
        v[0] = cx / norm;
        v[1] = cy / norm;
        v[2] = cz / norm;
      }
    }
  };
  const auto rayleigh = [&]() {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        acc += v[i] * M[i][j] * v[j];
    return acc;
  };
  // The acos-based root loses about half the digits when the two larger
  // eigenvalues cluster. The Rayleigh quotient is second-order accurate in
  // the eigenvector error, so two polish passes restore full precision.
  vector_for(lambda);
  lambda = rayleigh();
  vector_for(lambda);
  lambda = rayleigh();
  return lambda;
}

}  // namespace

TEST_CASE("init_weights perpendicular pair", "[ransac]")
{
  const LinePool pool = pool_of({line_at({0.0, 0.0}, 0.0), line_at({0.0, 0.0}, kPi / 2.0)});
  const std::vector<double> w = ransac::init_weights(pool);
  REQUIRE(w.size() == 2);
  CHECK(w[0] == Approx(std::exp(-kPi / 2.0)).epsilon(1e-14));
  CHECK(w[1] == Approx(std::exp(-kPi / 2.0)).epsilon(1e-14));

  LinePool one;
  one.lines.push_back(line_at({0.0, 0.0}, 0.3));
  CHECK_THROWS_WITH(ransac::init_weights(one),
                    ContainsSubstring("insufficient lines for VP"));
}

TEST_CASE("init_weights matches the brute-force definition", "[ransac][oracle]")
{
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    std::vector<OrientedLine> lines;
    const int n = 3 + static_cast<int>(rng.uniform_int(10));
    for (int i = 0; i < n; ++i)
      lines.push_back(line_at({rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)},
                              rng.uniform(0.0, kPi)));
    const LinePool pool = pool_of(std::move(lines));
    const std::vector<double> w = ransac::init_weights(pool);

    for (int i = 0; i < n; ++i) {
      double expect = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i)
          continue;
        expect += std::exp(-oracle_acute_angle(pool.lines[static_cast<std::size_t>(i)].line,
                                               pool.lines[static_cast<std::size_t>(j)].line));
      }
      INFO("seed " << seed << " line " << i);
      CHECK(w[static_cast<std::size_t>(i)] == Approx(expect).margin(1e-12));
    }
  }
}

TEST_CASE("update_weights multiplicative ratio over ten rounds", "[ransac]")
{
  std::vector<double> w = {1.0, 1.0};
  const double alpha = 1.2, beta = 0.8;
  for (int i = 0; i < 10; ++i) {
    ransac::update_weights(w, {0}, alpha, beta);
    // Renormalized to sum to the pool size after every update.
    CHECK(w[0] + w[1] == Approx(2.0).epsilon(1e-12));
  }
  CHECK(w[1] / w[0] == Approx(std::pow(beta / alpha, 10)).epsilon(1e-12));
}

TEST_CASE("update_weights validation and collapse", "[ransac]")
{
  std::vector<double> w = {1.0, 1.0};
  CHECK_THROWS_AS(ransac::update_weights(w, {0}, 0.0, 0.8), std::invalid_argument);
  CHECK_THROWS_AS(ransac::update_weights(w, {0}, 1.2, -1.0), std::invalid_argument);

  std::vector<double> zero = {0.0, 0.0};
  CHECK_THROWS_WITH(ransac::update_weights(zero, {}, 1.2, 0.8),
                    ContainsSubstring("weight collapse"));
}

TEST_CASE("sample_pair avoids near-parallel pairs when alternatives exist",
          "[ransac]")
{
  // Two lines 0.1 degrees apart plus one perpendicular line.
  const LinePool pool = pool_of({line_at({0.0, 0.0}, 0.0),
                                 line_at({0.0, 10.0}, deg2rad(0.1)),
                                 line_at({5.0, 0.0}, kPi / 2.0)});
  std::vector<double> w = {1.0, 1.0, 1.0};
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const auto [a, b] = ransac::sample_pair(pool, w, rng);
    CHECK(a != b);
    const double ang = oracle_acute_angle(pool.lines[static_cast<std::size_t>(a)].line,
                                          pool.lines[static_cast<std::size_t>(b)].line);
    CHECK(ang >= deg2rad(0.5) - 1e-12);
  }
}

TEST_CASE("sample_pair degenerate pools still make progress", "[ransac]")
{
  // Only two distinct lines, 0.1 degrees apart: the separation rule cannot
  // be met, so the most-separated distinct pair is returned.
  const LinePool pool = pool_of({line_at({0.0, 0.0}, 0.0), line_at({0.0, 10.0}, deg2rad(0.1))});
  std::vector<double> w = {1.0, 1.0};
  Rng rng(3);
  const auto [a, b] = ransac::sample_pair(pool, w, rng);
  CHECK(std::min(a, b) == 0);
  CHECK(std::max(a, b) == 1);

  std::vector<double> collapsed = {1.0, 0.0};
  CHECK_THROWS_WITH(ransac::sample_pair(pool, collapsed, rng),
                    ContainsSubstring("weight collapse"));
}

TEST_CASE("adaptive_threshold clamps and scales", "[ransac]")
{
  RansacConfig config;
  config.image_diagonal = 800.0;  // upper clamp at 16 px

  // All lines through the hypothesis: zero spread clamps to the 1 px floor.
  const VPEstimate vp = make_vp(0.0, 0.0, 1.0);
  std::vector<OrientedLine> through;
  for (int i = 0; i < 5; ++i)
    through.push_back(line_at({0.0, 0.0}, 0.3 * (i + 1)));
  CHECK(ransac::adaptive_threshold(pool_of(through), vp, config) == 1.0);

  // Horizontal lines at heights 0..4: distances to the origin are 0..4,
  // median 2, MAD 1, so the threshold is exactly 2.5.
  std::vector<OrientedLine> spread;
  for (int d = 0; d < 5; ++d)
    spread.push_back(line_at({0.0, static_cast<double>(d)}, 0.0));
  CHECK(ransac::adaptive_threshold(pool_of(spread), vp, config) ==
        Approx(2.5).epsilon(1e-12));

  // Distances 0,100,...,400: MAD 100 exceeds the 2% diagonal cap.
  std::vector<OrientedLine> wide;
  for (int d = 0; d < 5; ++d)
    wide.push_back(line_at({0.0, 100.0 * d}, 0.0));
  CHECK(ransac::adaptive_threshold(pool_of(wide), vp, config) ==
        Approx(16.0).epsilon(1e-12));
}

TEST_CASE("adaptive_threshold for ideal hypotheses uses angular residuals",
          "[ransac]")
{
  RansacConfig config;
  config.image_diagonal = 800.0;
  config.nominal_focal = 280.0;
  const VPEstimate ideal = make_vp(1.0, 0.0, 0.0);
  // Tangent angles 0..4 degrees against the horizontal direction: the MAD of
  // the angular residuals is 1 degree, scaled by the focal length.
  std::vector<OrientedLine> lines;
  for (int d = 0; d < 5; ++d)
    lines.push_back(line_at({0.0, 10.0 * d}, deg2rad(static_cast<double>(d))));
  const double expect = std::clamp(2.5 * deg2rad(1.0) * 280.0, 1.0, 16.0);
  CHECK(ransac::adaptive_threshold(pool_of(lines), ideal, config) ==
        Approx(expect).epsilon(1e-12));
}

TEST_CASE("score_hypothesis distance inliers and votes", "[ransac]")
{
  // Three lines through the origin, two far away.
  std::vector<OrientedLine> lines = {
      line_at({0.0, 0.0}, 0.2),  line_at({0.0, 0.0}, 1.1),  line_at({0.0, 0.0}, 2.0),
      line_at({0.0, 50.0}, 0.0), line_at({40.0, 0.0}, kPi / 2.0),
  };
  const LinePool pool = pool_of(std::move(lines));
  const std::vector<double> w = {0.5, 1.5, 2.0, 3.0, 4.0};
  RansacConfig config;
  config.use_direction_filter = false;

  const VPEstimate vp = make_vp(0.0, 0.0, 1.0);
  const HypothesisScore hs = ransac::score_hypothesis(vp, pool, w, 1.0, config);
  CHECK(hs.inlier_ids == std::vector<int>{0, 1, 2});
  CHECK(hs.votes == Approx(0.5 + 1.5 + 2.0).epsilon(1e-14));

  std::vector<double> bad(4, 1.0);
  CHECK_THROWS_AS(ransac::score_hypothesis(vp, pool, bad, 1.0, config),
                  std::invalid_argument);
}

TEST_CASE("score_hypothesis direction filter", "[ransac]")
{
  // Three directed lines through the origin: two point toward it, one away.
  std::vector<OrientedLine> lines;
  {
    OrientedLine l = directed_line_at({-10.0, 0.0}, 0.0);  // east, toward origin
    lines.push_back(l);
    OrientedLine m = directed_line_at({0.0, -10.0}, kPi / 2.0);  // north, toward origin
    lines.push_back(m);
    OrientedLine n = directed_line_at({-5.0, -5.0}, kPi / 4.0);  // toward origin
    n.direction = Vec2{-n.direction->x, -n.direction->y};        // flipped away
    lines.push_back(n);
  }
  const LinePool pool = pool_of(std::move(lines));
  const std::vector<double> w = {1.0, 1.0, 1.0};
  const VPEstimate vp = make_vp(0.0, 0.0, 1.0);

  // Consistency 2/3 < 0.7: the hypothesis is rejected outright.
  RansacConfig strict;
  strict.direction_consistency = 0.7;
  const HypothesisScore rejected = ransac::score_hypothesis(vp, pool, w, 1.0, strict);
  CHECK(rejected.inlier_ids.empty());
  CHECK(rejected.votes == 0.0);

  // With a lower requirement the hypothesis survives, but the contradicting
  // line is dropped from the inlier set.
  RansacConfig lenient;
  lenient.direction_consistency = 0.5;
  const HypothesisScore kept = ransac::score_hypothesis(vp, pool, w, 1.0, lenient);
  CHECK(kept.inlier_ids == std::vector<int>{0, 1});
  CHECK(kept.votes == Approx(2.0).epsilon(1e-14));

  // Disabling the filter keeps all three.
  RansacConfig off;
  off.use_direction_filter = false;
  CHECK(ransac::score_hypothesis(vp, pool, w, 1.0, off).inlier_ids ==
        std::vector<int>{0, 1, 2});
}

TEST_CASE("score_hypothesis for ideal hypotheses", "[ransac]")
{
  std::vector<OrientedLine> lines = {
      line_at({0.0, 0.0}, 0.0),              // horizontal
      line_at({0.0, 10.0}, deg2rad(0.1)),    // nearly horizontal
      line_at({0.0, 20.0}, kPi / 2.0),       // vertical
  };
  const LinePool pool = pool_of(std::move(lines));
  const std::vector<double> w = {1.0, 1.0, 1.0};
  RansacConfig config;
  config.nominal_focal = 280.0;
  config.use_direction_filter = false;

  const VPEstimate ideal = make_vp(1.0, 0.0, 0.0);  // horizontal direction
  // Threshold 1 px at f=280 tolerates about 0.2 degrees of tangent error.
  const HypothesisScore hs = ransac::score_hypothesis(ideal, pool, w, 1.0, config);
  CHECK(hs.inlier_ids == std::vector<int>{0, 1});
}

TEST_CASE("refine_vp_eigen matches the closed-form trigonometric oracle",
          "[ransac][oracle]")
{
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed + 40);
    const Point2 gt{rng.uniform(-200.0, 800.0), rng.uniform(-200.0, 600.0)};
    std::vector<OrientedLine> lines;
    const int n = 6 + static_cast<int>(rng.uniform_int(6));
    for (int i = 0; i < n; ++i) {
      const Point2 anchor{rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0)};
      const double theta =
          std::atan2(gt.y - anchor.y, gt.x - anchor.x) + rng.normal(0.0, deg2rad(1.0));
      lines.push_back(line_at(anchor, theta));
    }
    const LinePool pool = pool_of(std::move(lines));
    std::vector<double> w;
    std::vector<int> ids;
    for (int i = 0; i < n; ++i) {
      w.push_back(rng.uniform(0.5, 3.0));
      ids.push_back(i);
    }

    const auto [vp, residual] = ransac::refine_vp_eigen(pool, ids, w);

    // Oracle: assemble the weighted scatter and solve it in closed form.
    double M[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
    for (int i = 0; i < n; ++i) {
      const HomLine& l = pool.lines[static_cast<std::size_t>(i)].line;
      const double v[3] = {l.a, l.b, l.c};
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
          M[r][c] += w[static_cast<std::size_t>(i)] * v[r] * v[c];
    }
    double ov[3];
    const double olambda = smallest_eig_trig(M, ov);

    // Compare as projective points: the homogeneous representatives must be
    // parallel to within 1e-6 radians.
    const double lv[3] = {vp.x, vp.y, vp.w};
    const double dot = lv[0] * ov[0] + lv[1] * ov[1] + lv[2] * ov[2];
    const double nl = std::sqrt(lv[0] * lv[0] + lv[1] * lv[1] + lv[2] * lv[2]);
    const double cosang = std::min(1.0, std::abs(dot) / nl);
    INFO("seed " << seed);
    CHECK(std::acos(cosang) < 1e-6);
    CHECK(residual == Approx(olambda).margin(1e-9));

    // Minimizer property, probed independently: no random unit vector beats
    // the returned residual.
    auto quad = [&](const double p[3]) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        const HomLine& l = pool.lines[static_cast<std::size_t>(i)].line;
        const double r = l.a * p[0] + l.b * p[1] + l.c * p[2];
        acc += w[static_cast<std::size_t>(i)] * r * r;
      }
      return acc;
    };
    for (int probe = 0; probe < 100; ++probe) {
      double p[3] = {rng.normal(), rng.normal(), rng.normal()};
      const double norm = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      for (double& c : p)
        c /= norm;
      CHECK(quad(p) >= residual - 1e-12);
    }
  }
}

TEST_CASE("refine_vp_eigen error cases", "[ransac]")
{
  const LinePool pool = pool_of({line_at({0.0, 0.0}, 0.0), line_at({0.0, 0.0}, 0.0)});
  const std::vector<double> w = {1.0, 1.0};
  CHECK_THROWS_AS(ransac::refine_vp_eigen(pool, {0}, w), std::invalid_argument);
  // Two coincident lines do not determine a point.
  CHECK_THROWS_WITH(ransac::refine_vp_eigen(pool, {0, 1}, w),
                    ContainsSubstring("degenerate refinement"));
  const std::vector<double> bad = {1.0};
  CHECK_THROWS_AS(ransac::refine_vp_eigen(pool, {0, 1}, bad), std::invalid_argument);
}

namespace {

/// Builds the canonical planted-inlier pool: `n_in` directed lines passing
/// exactly through `vp_gt` whose directions carry Gaussian angular noise
/// (each line is rotated about the VP, so membership in the pencil is
/// exact while the directions spread), plus `n_out` uniformly random
/// outlier lines.
LinePool planted_pool(const Point2& vp_gt, int n_in, int n_out, double noise_deg, Rng& rng)
{
  std::vector<OrientedLine> lines;
  for (int i = 0; i < n_in; ++i) {
    const Point2 anchor{rng.uniform(40.0, 600.0), rng.uniform(40.0, 440.0)};
    const double theta = std::atan2(vp_gt.y - anchor.y, vp_gt.x - anchor.x) +
                         rng.normal(0.0, deg2rad(noise_deg));
    const double len = std::hypot(vp_gt.x - anchor.x, vp_gt.y - anchor.y);
    const Point2 rotated{vp_gt.x - len * std::cos(theta), vp_gt.y - len * std::sin(theta)};
    lines.push_back(directed_line_at(rotated, theta));
  }
  for (int i = 0; i < n_out; ++i) {
    const Point2 anchor{rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0)};
    lines.push_back(line_at(anchor, rng.uniform(0.0, kPi)));
  }
  return pool_of(std::move(lines));
}

}  // namespace

TEST_CASE("run recovers a planted vanishing point among outliers", "[ransac]")
{
  const Point2 vp_gt{200.0, -50.0};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng gen = Rng::derived(seed, 77);
    const LinePool pool = planted_pool(vp_gt, 12, 12, 1.0, gen);
    RansacConfig config;
    config.rng_seed = seed;
    config.image_diagonal = 800.0;
    config.nominal_focal = 280.0;

    const VPResult res = ransac::run(pool, config);
    REQUIRE_FALSE(res.vp.is_ideal());
    const double err = angular_error(res.vp, make_vp(vp_gt.x, vp_gt.y, 1.0), 640, 480);
    INFO("seed " << seed << " error " << err << " deg");
    CHECK(err <= 1.0);

    // Most planted inliers are recovered.
    int planted = 0;
    for (int id : res.inlier_ids)
      if (id < 12)
        ++planted;
    CHECK(planted >= 9);
    CHECK(std::is_sorted(res.inlier_ids.begin(), res.inlier_ids.end()));
    CHECK(res.score > 0.0);
    CHECK(res.run_index >= 0);
    CHECK(res.run_index < config.restarts);
    CHECK(res.diagnostics.size() == static_cast<std::size_t>(config.restarts));
  }
}

TEST_CASE("run is deterministic for a fixed configuration", "[ransac]")
{
  Rng gen(99);
  const LinePool pool = planted_pool({500.0, 300.0}, 10, 8, 1.5, gen);
  RansacConfig config;
  config.rng_seed = 4242;

  const VPResult a = ransac::run(pool, config);
  const VPResult b = ransac::run(pool, config);
  CHECK(a.vp.x == b.vp.x);
  CHECK(a.vp.y == b.vp.y);
  CHECK(a.vp.w == b.vp.w);
  CHECK(a.inlier_ids == b.inlier_ids);
  CHECK(a.score == b.score);
  CHECK(a.run_index == b.run_index);
  CHECK(a.refine_residual == b.refine_residual);
}

TEST_CASE("run returns an ideal estimate for parallel pencils", "[ransac]")
{
  std::vector<OrientedLine> lines;
  for (int i = 0; i < 6; ++i)
    lines.push_back(line_at({0.0, 15.0 * i}, 0.0));  // horizontal pencil
  const LinePool pool = pool_of(std::move(lines));
  RansacConfig config;
  config.rng_seed = 11;

  const VPResult res = ransac::run(pool, config);
  CHECK(res.vp.is_ideal());
  CHECK(std::abs(res.vp.x) == Approx(1.0).epsilon(1e-12));
  CHECK(res.vp.y == Approx(0.0).margin(1e-12));
  CHECK(res.inlier_ids.size() == 6);
}

TEST_CASE("run failure modes", "[ransac]")
{
  LinePool small;
  small.lines.push_back(line_at({0.0, 0.0}, 0.0));
  CHECK_THROWS_WITH(ransac::run(small), ContainsSubstring("insufficient lines for VP"));

  // Two directed lines whose directions both point away from their
  // intersection: every hypothesis is direction-contradicted.
  std::vector<OrientedLine> lines;
  lines.push_back(directed_line_at({10.0, 0.0}, 0.0));        // east of origin, pointing east
  lines.push_back(directed_line_at({0.0, 10.0}, kPi / 2.0));  // north of origin, pointing north
  const LinePool pool = pool_of(std::move(lines));
  CHECK_THROWS_WITH(ransac::run(pool), ContainsSubstring("no vanishing point found"));

  RansacConfig bad;
  bad.iters_per_run = 0;
  const LinePool ok = pool_of({line_at({0.0, 0.0}, 0.0), line_at({0.0, 0.0}, 1.0)});
  CHECK_THROWS_AS(ransac::run(ok, bad), std::invalid_argument);
}
