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

#include <vanishkit/clustering.hpp>
#include <vanishkit/config.hpp>
#include <vanishkit/features.hpp>
#include <vanishkit/geometry.hpp>
#include <vanishkit/image.hpp>
#include <vanishkit/linefit.hpp>
#include <vanishkit/ransac.hpp>
#include <vanishkit/selection.hpp>

#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vanishkit {

/// Wall-clock spent in each pipeline stage, in milliseconds.
struct StageTimings
{
  double extract_ms = 0.0;
  double cluster_ms = 0.0;
  double select_ms = 0.0;
  double fit_ms = 0.0;
  double ransac_ms = 0.0;
};

/// Result of one detection. `vp` is absent when no vanishing point was
/// found; `fail_stage` then names the stage that ran out of material
/// ("pool" when fewer than two candidate lines existed, "ransac" when
/// consensus failed, "ideal_vp" when the estimate lies at infinity and so
/// has no pixel coordinates). A present `vp` is always finite.
struct DetectionOutput
{
  std::string image_id;
  std::optional<Point2> vp;
  int n_implicit = 0;
  int n_explicit = 0;
  int n_inliers = 0;
  double runtime_ms = 0.0;
  StageTimings timings;
  std::string fail_stage;
};

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0)
{
  const auto dt = std::chrono::steady_clock::now() - t0;
  return std::chrono::duration<double, std::milli>(dt).count();
}

}  // namespace detail

/// Runs cluster -> select -> fit -> pool -> consensus on pre-extracted
/// features plus explicit segments resolved by the caller. Deterministic
/// for a fixed config (the consensus seed comes from `config.seed`).
/// Stages degrade gracefully: too few features simply produce no implicit
/// lines, and only an under-filled pool or failed consensus yields an
/// absent vp (never an exception).
inline DetectionOutput detect_pipeline(const std::vector<Feature>& feats,
                                       int width,
                                       int height,
                                       const std::vector<LineSegment>& segments,
                                       const PipelineConfig& config,
                                       const std::string& image_id = "")
{
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("detect_pipeline: invalid image size");
  const auto t_start = std::chrono::steady_clock::now();
  DetectionOutput out;
  out.image_id = image_id;

  // Cluster descriptors into visual words.
  auto t0 = std::chrono::steady_clock::now();
  std::vector<FeatureGroup> groups;
  if (feats.size() >= 2) {
    const DistanceMatrix dm = build_distance_matrix(feats);
    const Dendrogram dd = single_linkage(dm);
    groups = cut_dendrogram(dd, config.cluster);
  }
  out.timings.cluster_ms = detail::ms_since(t0);

  // Forward-select recurring runs inside each visual word.
  t0 = std::chrono::steady_clock::now();
  std::vector<OrderedSubset> subsets;
  for (const FeatureGroup& g : groups)
    for (OrderedSubset& s : forward_select(feats, g.member_ids, config.selection))
      subsets.push_back(std::move(s));
  out.timings.select_ms = detail::ms_since(t0);

  // Fit one implicit line per run.
  t0 = std::chrono::steady_clock::now();
  std::vector<OrientedLine> implicit_lines;
  implicit_lines.reserve(subsets.size());
  for (const OrderedSubset& s : subsets) {
    try {
      implicit_lines.push_back(fit_oriented_line(feats, s));
    } catch (const std::invalid_argument&) {
      // A degenerate run contributes nothing.
    }
  }
  out.timings.fit_ms = detail::ms_since(t0);

  // Pool with the explicit segments and run the weighted consensus.
  LinePool pool;
  try {
    pool = build_pool(implicit_lines, segments);
  } catch (const std::invalid_argument&) {
    out.n_implicit = static_cast<int>(implicit_lines.size());
    out.n_explicit = static_cast<int>(segments.size());
    out.fail_stage = "pool";
    out.runtime_ms = detail::ms_since(t_start);
    return out;
  }
  out.n_implicit = pool.implicit_count;
  out.n_explicit = pool.explicit_count;

  t0 = std::chrono::steady_clock::now();
  RansacConfig rc = config.ransac;
  rc.rng_seed = config.seed;
  rc.image_diagonal = std::hypot(static_cast<double>(width), static_cast<double>(height));
  rc.nominal_focal = (width + height) / 4.0;
  try {
    const VPResult res = ransac::run(pool, rc);
    out.n_inliers = static_cast<int>(res.inlier_ids.size());
    if (res.vp.is_ideal())
      out.fail_stage = "ideal_vp";
    else
      out.vp = res.vp.point();
  } catch (const std::runtime_error&) {
    out.fail_stage = "ransac";
  }
  out.timings.ransac_ms = detail::ms_since(t0);
  out.runtime_ms = detail::ms_since(t_start);
  return out;
}

/// Full pipeline on an image: extraction, then the feature-based stages.
/// Explicit segments follow `config.explicit_source` (builtin detector,
/// segments file, or none).
inline DetectionOutput detect_pipeline(const Image& img,
                                       const PipelineConfig& config,
                                       const std::string& image_id = "")
{
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<Feature> feats = extract_features(img, config.features);
  const double extract_ms = detail::ms_since(t0);

  std::vector<LineSegment> segments;
  switch (config.explicit_source) {
    case ExplicitSource::Builtin:
      segments = detect_segments(img, config.segments);
      break;
    case ExplicitSource::File:
      segments = load_segments(config.segments_file);
      break;
    case ExplicitSource::None:
      break;
  }

  DetectionOutput out =
      detect_pipeline(feats, img.width, img.height, segments, config, image_id);
  out.timings.extract_ms = extract_ms;
  out.runtime_ms += extract_ms;
  return out;
}

}  // namespace vanishkit
