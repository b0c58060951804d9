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

#include <vanishkit/geometry.hpp>
#include <vanishkit/linefit.hpp>
#include <vanishkit/random.hpp>
#include <vanishkit/stats.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace vanishkit {

struct RansacConfig
{
  double alpha = 1.2;  ///< weight boost applied to inliers per iteration
  double beta = 0.8;   ///< weight decay applied to outliers per iteration
  int iters_per_run = 500;
  int restarts = 5;
  /// Fixed inlier distance threshold in pixels; unset selects the adaptive
  /// (median-absolute-deviation based) rule per hypothesis.
  std::optional<double> inlier_threshold;
  std::uint64_t rng_seed = 0;
  /// Image diagonal in pixels; bounds the adaptive threshold.
  double image_diagonal = 800.0;
  /// Surrogate focal length used to convert the pixel threshold into an
  /// angular tolerance when scoring hypotheses at infinity.
  double nominal_focal = 280.0;
  /// Minimum fraction of directed inliers that must point toward the
  /// hypothesis for it to survive the direction filter.
  double direction_consistency = 0.7;
  bool use_direction_filter = true;
};

struct HypothesisScore
{
  std::vector<int> inlier_ids;  ///< ascending indices into the pool
  double votes = 0.0;           ///< total weight of the inliers
};

/// Per-restart convergence diagnostics.
struct RestartDiagnostics
{
  int restart = 0;
  double best_votes = 0.0;
  int best_inliers = 0;
  int valid_hypotheses = 0;   ///< sampled pairs that produced an intersection
  double last_threshold = 0.0;  ///< inlier threshold of the winning hypothesis
};

struct VPResult
{
  VPEstimate vp;
  std::vector<int> inlier_ids;  ///< ascending indices into the pool
  double score = 0.0;           ///< consensus votes of the final estimate
  int run_index = 0;            ///< restart that produced the winner
  double refine_residual = 0.0;  ///< weighted quadratic residual of `vp`
  std::vector<RestartDiagnostics> diagnostics;
};

/// Consensus-stage operations. Nested so call sites read as
/// ransac::run(pool, config) etc.; the shared result/config types live in
/// the enclosing namespace.
namespace ransac {

/// Initial sampling weights: each line starts with the sum of
/// exp(-acute angle) to every other line, so lines sharing a direction
/// trend (and therefore plausibly a vanishing point) start more likely to
/// be sampled. Requires at least two lines.
inline std::vector<double> init_weights(const LinePool& pool)
{
  const std::size_t n = pool.lines.size();
  if (n < 2)
    throw std::invalid_argument("init_weights: insufficient lines for VP");
  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i)
        continue;
      acc += std::exp(-acute_angle(pool.lines[i].line, pool.lines[j].line));
    }
    w[i] = acc;
  }
  return w;
}

/// Multiplies inlier weights by alpha and the rest by beta, then rescales
/// so the weights sum to the pool size (keeping vote magnitudes comparable
/// across iterations). `inlier_ids` must be valid indices.
inline void update_weights(std::vector<double>& weights,
                           const std::vector<int>& inlier_ids,
                           double alpha,
                           double beta)
{
  if (alpha <= 0.0 || beta <= 0.0)
    throw std::invalid_argument("update_weights: factors must be positive");
  std::vector<bool> is_inlier(weights.size(), false);
  for (int id : inlier_ids)
    is_inlier[static_cast<std::size_t>(id)] = true;
  double sum = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] *= is_inlier[i] ? alpha : beta;
    sum += weights[i];
  }
  if (!(sum > 0.0))
    throw std::runtime_error("update_weights: weight collapse");
  const double scale = static_cast<double>(weights.size()) / sum;
  for (double& w : weights)
    w *= scale;
}

namespace detail {

/// Draws one index from a categorical distribution over `weights`,
/// excluding `skip` (pass -1 to allow all). Assumes a positive total.
inline int draw_weighted(const std::vector<double>& weights, int skip, Rng& rng)
{
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (static_cast<int>(i) != skip)
      total += weights[i];
  const double r = rng.uniform() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (static_cast<int>(i) == skip)
      continue;
    if (weights[i] > 0.0)
      last_positive = static_cast<int>(i);
    acc += weights[i];
    if (r < acc)
      return static_cast<int>(i);
  }
  return last_positive;  // numerical fallback (r landed on the total)
}

inline bool lines_coincident(const HomLine& a, const HomLine& b)
{
  // Canonical forms make coincident lines bit-comparable up to roundoff.
  return std::abs(a.a - b.a) < 1e-12 && std::abs(a.b - b.b) < 1e-12 &&
         std::abs(a.c - b.c) < 1e-12;
}

}  // namespace detail

/// Samples a pair of distinct lines for hypothesis generation, proportional
/// to the current weights. Pairs closer than 0.5 degrees apart in direction
/// are re-drawn (up to 20 attempts); if no well-separated pair exists the
/// most-separated distinct pair is returned instead, so degenerate pools
/// still make progress. Throws std::runtime_error("weight collapse") when
/// fewer than two lines carry positive weight.
inline std::pair<int, int> sample_pair(const LinePool& pool,
                                       const std::vector<double>& weights,
                                       Rng& rng)
{
  const int n = static_cast<int>(pool.lines.size());
  if (n < 2 || weights.size() != pool.lines.size())
    throw std::invalid_argument("sample_pair: bad pool or weights");
  int positive = 0;
  for (double w : weights)
    if (w > 0.0)
      ++positive;
  if (positive < 2)
    throw std::runtime_error("sample_pair: weight collapse");

  const double min_angle = deg2rad(0.5);
  for (int attempt = 0; attempt < 20; ++attempt) {
    const int i = detail::draw_weighted(weights, -1, rng);
    const int j = detail::draw_weighted(weights, i, rng);
    if (i < 0 || j < 0)
      break;
    if (acute_angle(pool.lines[static_cast<std::size_t>(i)].line,
                    pool.lines[static_cast<std::size_t>(j)].line) >= min_angle)
      return {i, j};
  }

  // Fallback: the most-separated distinct pair (ties to lowest indices).
  int bi = -1, bj = -1;
  double best = -1.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const auto& la = pool.lines[static_cast<std::size_t>(i)].line;
      const auto& lb = pool.lines[static_cast<std::size_t>(j)].line;
      if (detail::lines_coincident(la, lb))
        continue;
      const double ang = acute_angle(la, lb);
      if (ang > best) {
        best = ang;
        bi = i;
        bj = j;
      }
    }
  if (bi < 0)
    throw std::runtime_error("sample_pair: weight collapse");
  return {bi, bj};
}

/// Adaptive inlier threshold for one hypothesis: 2.5 times the median
/// absolute deviation of all line residuals, clamped to
/// [1 px, 2% of the image diagonal]. Ideal hypotheses measure residuals as
/// angular deviations scaled by the nominal focal length, putting them on
/// the same pixel-like footing.
inline double adaptive_threshold(const LinePool& pool,
                                 const VPEstimate& vp,
                                 const RansacConfig& config)
{
  std::vector<double> residuals;
  residuals.reserve(pool.lines.size());
  if (vp.is_ideal()) {
    const Vec2 dir = Vec2{vp.x, vp.y}.normalized();
    for (const OrientedLine& l : pool.lines) {
      const Vec2 t = l.line.tangent();
      const double ang = std::atan2(std::abs(t.cross(dir)), std::abs(t.dot(dir)));
      residuals.push_back(ang * config.nominal_focal);
    }
  } else {
    const Point2 p = vp.point();
    for (const OrientedLine& l : pool.lines)
      residuals.push_back(point_line_distance(p, l.line));
  }
  const double spread = mad(residuals);
  const double hi = std::max(1.0, 0.02 * config.image_diagonal);
  return std::clamp(2.5 * spread, 1.0, hi);
}

/// Scores a hypothesis against the pool.
///
/// A line is a distance inlier when the hypothesis lies within `threshold`
/// of it — Euclidean point-line distance for finite hypotheses; for ideal
/// hypotheses, angular deviation within threshold / nominal_focal. Directed
/// lines additionally must point toward the hypothesis; if fewer than
/// `direction_consistency` of the directed distance-inliers do, the whole
/// hypothesis is rejected (empty score), since a vanishing point on the
/// wrong side of the recurrence trails is a geometric contradiction.
/// Votes are the summed weights of the surviving inliers.
inline HypothesisScore score_hypothesis(const VPEstimate& vp,
                                        const LinePool& pool,
                                        const std::vector<double>& weights,
                                        double threshold,
                                        const RansacConfig& config = {})
{
  if (weights.size() != pool.lines.size())
    throw std::invalid_argument("score_hypothesis: weight count mismatch");
  HypothesisScore out;
  std::vector<int> distance_inliers;
  distance_inliers.reserve(pool.lines.size());

  if (vp.is_ideal()) {
    const Vec2 dir = Vec2{vp.x, vp.y}.normalized();
    const double tol = threshold / config.nominal_focal;
    for (std::size_t i = 0; i < pool.lines.size(); ++i) {
      const Vec2 t = pool.lines[i].line.tangent();
      const double ang = std::atan2(std::abs(t.cross(dir)), std::abs(t.dot(dir)));
      if (ang <= tol)
        distance_inliers.push_back(static_cast<int>(i));
    }
  } else {
    const Point2 p = vp.point();
    for (std::size_t i = 0; i < pool.lines.size(); ++i)
      if (point_line_distance(p, pool.lines[i].line) <= threshold)
        distance_inliers.push_back(static_cast<int>(i));
  }

  if (config.use_direction_filter) {
    int directed = 0, consistent = 0;
    for (int id : distance_inliers) {
      const OrientedLine& l = pool.lines[static_cast<std::size_t>(id)];
      if (!l.direction)
        continue;
      ++directed;
      if (vp_on_positive_side(l, vp))
        ++consistent;
    }
    if (directed > 0 &&
        static_cast<double>(consistent) < config.direction_consistency * directed)
      return out;  // contradicted by the recurrence directions
    for (int id : distance_inliers) {
      const OrientedLine& l = pool.lines[static_cast<std::size_t>(id)];
      if (l.direction && !vp_on_positive_side(l, vp))
        continue;  // drop the individually contradicting lines
      out.inlier_ids.push_back(id);
    }
  } else {
    out.inlier_ids = std::move(distance_inliers);
  }

  for (int id : out.inlier_ids)
    out.votes += weights[static_cast<std::size_t>(id)];
  return out;
}

/// Weighted least-squares refinement of a vanishing point over its inliers:
/// the minimizer of sum_i w_i (l_i^T p)^2 over unit homogeneous p, i.e. the
/// smallest-eigenvalue eigenvector of the weighted scatter of the line
/// coefficients. Returns the refined estimate and its residual (the
/// smallest eigenvalue). Throws std::invalid_argument for fewer than two
/// inliers and std::runtime_error("degenerate refinement") when the scatter
/// does not determine a unique point (all inlier lines coincident).
inline std::pair<VPEstimate, double> refine_vp_eigen(const LinePool& pool,
                                                     const std::vector<int>& inlier_ids,
                                                     const std::vector<double>& weights)
{
  if (inlier_ids.size() < 2)
    throw std::invalid_argument("refine_vp_eigen: need at least 2 inliers");
  if (weights.size() != pool.lines.size())
    throw std::invalid_argument("refine_vp_eigen: weight count mismatch");
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  for (int id : inlier_ids) {
    const HomLine& l = pool.lines[static_cast<std::size_t>(id)].line;
    const Eigen::Vector3d v(l.a, l.b, l.c);
    m += weights[static_cast<std::size_t>(id)] * v * v.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  const Eigen::Vector3d evals = es.eigenvalues();  // ascending
  if (!(evals(2) > 0.0) || evals(1) <= 1e-12 * evals(2))
    throw std::runtime_error("refine_vp_eigen: degenerate refinement");
  const Eigen::Vector3d p = es.eigenvectors().col(0);
  return {vanishkit::detail::normalize_vp(p.x(), p.y(), p.z()), std::max(0.0, evals(0))};
}

namespace detail {

/// Weighted quadratic residual of an arbitrary estimate, in the same
/// normalization as refine_vp_eigen (unit homogeneous vector).
inline double quadratic_residual(const LinePool& pool,
                                 const std::vector<int>& inlier_ids,
                                 const std::vector<double>& weights,
                                 const VPEstimate& vp)
{
  Eigen::Vector3d p(vp.x, vp.y, vp.w);
  const double n = p.norm();
  if (!(n > 0.0))
    return std::numeric_limits<double>::infinity();
  p /= n;
  double acc = 0.0;
  for (int id : inlier_ids) {
    const HomLine& l = pool.lines[static_cast<std::size_t>(id)].line;
    const double r = l.a * p.x() + l.b * p.y() + l.c * p.z();
    acc += weights[static_cast<std::size_t>(id)] * r * r;
  }
  return acc;
}

}  // namespace detail

/// Runs the full weighted-consensus search: `restarts` independent restarts
/// (each with its own derived RNG stream and fresh weights) of
/// `iters_per_run` iterations. Each iteration samples a weighted line pair,
/// intersects it, scores the hypothesis at the (fixed or adaptive)
/// threshold, and re-weights the pool multiplicatively (inliers x alpha,
/// outliers x beta). The multiplicative updates steer the sampling; the
/// hypothesis ranking itself is by largest inlier set (weight sums drift
/// over iterations, so they only break count ties and are reported as the
/// score). Each restart's best hypothesis is refined over its inliers with
/// the weight state that scored it; the best refined candidate across
/// restarts (inlier count, then votes, then lower residual) wins.
/// Deterministic for a fixed config. Throws std::invalid_argument for a
/// pool smaller than two and std::runtime_error("no vanishing point found")
/// when no valid hypothesis (>= 2 inliers) ever emerges.
inline VPResult run(const LinePool& pool, const RansacConfig& config = {})
{
  const std::size_t n = pool.lines.size();
  if (n < 2)
    throw std::invalid_argument("run: insufficient lines for VP");
  if (config.iters_per_run < 1 || config.restarts < 1)
    throw std::invalid_argument("run: invalid iteration configuration");

  struct Candidate
  {
    VPEstimate vp;
    std::vector<int> inliers;
    double votes = -1.0;
    double residual = std::numeric_limits<double>::infinity();
    int run_index = -1;
  };
  Candidate best;
  std::vector<RestartDiagnostics> diagnostics;

  for (int r = 0; r < config.restarts; ++r) {
    Rng rng = Rng::derived(config.rng_seed, static_cast<std::uint64_t>(r));
    std::vector<double> weights = init_weights(pool);

    // Best raw hypothesis of this restart, with the weight state that
    // scored it (the refinement re-uses those weights).
    bool have_best = false;
    VPEstimate best_vp;
    std::vector<int> best_inliers;
    std::vector<double> best_weights;
    double best_votes = -1.0;
    double best_threshold = 0.0;
    int valid = 0;

    for (int it = 0; it < config.iters_per_run; ++it) {
      std::pair<int, int> idx;
      try {
        idx = sample_pair(pool, weights, rng);
      } catch (const std::runtime_error&) {
        break;  // weight collapse: nothing left to sample
      }
      VPEstimate hyp;
      try {
        hyp = intersect(pool.lines[static_cast<std::size_t>(idx.first)].line,
                        pool.lines[static_cast<std::size_t>(idx.second)].line);
      } catch (const std::invalid_argument&) {
        continue;  // coincident pair: no hypothesis
      }
      ++valid;
      const double threshold =
          config.inlier_threshold ? *config.inlier_threshold
                                  : adaptive_threshold(pool, hyp, config);
      const HypothesisScore hs = score_hypothesis(hyp, pool, weights, threshold, config);
      // Largest inlier set wins. The evolving weight sums are not
      // comparable across iterations (updates concentrate mass on the
      // consensus), so count ties keep the earliest hypothesis: its weight
      // snapshot is the least skewed, which conditions the refinement.
      if (hs.inlier_ids.size() >= 2 &&
          (!have_best || hs.inlier_ids.size() > best_inliers.size())) {
        have_best = true;
        best_vp = hyp;
        best_inliers = hs.inlier_ids;
        best_weights = weights;
        best_votes = hs.votes;
        best_threshold = threshold;
      }
      update_weights(weights, hs.inlier_ids, config.alpha, config.beta);
    }

    RestartDiagnostics diag;
    diag.restart = r;
    diag.valid_hypotheses = valid;
    if (have_best) {
      // Refine over the restart's inliers, then re-score at the same
      // threshold so votes stay comparable.
      VPEstimate refined = best_vp;
      double residual;
      try {
        std::tie(refined, residual) = refine_vp_eigen(pool, best_inliers, best_weights);
      } catch (const std::exception&) {
        refined = best_vp;
        residual = detail::quadratic_residual(pool, best_inliers, best_weights, best_vp);
      }
      HypothesisScore rescored =
          score_hypothesis(refined, pool, best_weights, best_threshold, config);
      if (rescored.inlier_ids.size() < 2) {
        // Refinement drifted off the consensus (can happen with highly
        // asymmetric weights); fall back to the raw hypothesis.
        refined = best_vp;
        residual = detail::quadratic_residual(pool, best_inliers, best_weights, best_vp);
        rescored.inlier_ids = best_inliers;
        rescored.votes = best_votes;
      }

      diag.best_votes = rescored.votes;
      diag.best_inliers = static_cast<int>(rescored.inlier_ids.size());
      diag.last_threshold = best_threshold;

      const bool better =
          rescored.inlier_ids.size() > best.inliers.size() ||
          (rescored.inlier_ids.size() == best.inliers.size() &&
           (rescored.votes > best.votes ||
            (rescored.votes == best.votes && residual < best.residual)));
      if (better) {
        best.vp = refined;
        best.inliers = rescored.inlier_ids;
        best.votes = rescored.votes;
        best.residual = residual;
        best.run_index = r;
      }
    }
    diagnostics.push_back(diag);
  }

  if (best.run_index < 0)
    throw std::runtime_error("no vanishing point found");

  VPResult out;
  out.vp = best.vp;
  out.inlier_ids = best.inliers;
  std::sort(out.inlier_ids.begin(), out.inlier_ids.end());
  out.score = best.votes;
  out.run_index = best.run_index;
  out.refine_residual = best.residual;
  out.diagnostics = std::move(diagnostics);
  return out;
}

}  // namespace ransac
}  // namespace vanishkit
