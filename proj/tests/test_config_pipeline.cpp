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

#include <vanishkit/config.hpp>
#include <vanishkit/pipeline.hpp>
#include <vanishkit/synthgen.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

using namespace vanishkit;
using Catch::Approx;
using Catch::Matchers::ContainsSubstring;

namespace {

PipelineConfig custom_config()
{
  PipelineConfig cfg;
  cfg.seed = 42;
  cfg.explicit_source = ExplicitSource::File;
  cfg.segments_file = "segs.csv";
  cfg.features.num_octaves = 5;
  cfg.features.scales_per_octave = 4;
  cfg.features.initial_sigma = 1.3;
  cfg.features.input_blur = 0.6;
  cfg.features.contrast_threshold = 0.02;
  cfg.features.edge_ratio = 12.0;
  cfg.features.max_features = 500;
  cfg.cluster.threshold = 0.75;
  cfg.cluster.percentile = 60.0;
  cfg.cluster.min_size = 4;
  cfg.cluster.max_size = 20;
  cfg.selection.accept_threshold = 0.4;
  cfg.selection.growth_factor = 1.25;
  cfg.selection.max_exhaustive = 10;
  cfg.segments.min_length = 25.0;
  cfg.segments.grad_threshold = 0.15;
  cfg.segments.max_deviation = 1.2;
  cfg.segments.angle_tolerance = deg2rad(3.5);
  cfg.ransac.alpha = 1.3;
  cfg.ransac.beta = 0.7;
  cfg.ransac.iters_per_run = 64;
  cfg.ransac.restarts = 8;
  cfg.ransac.inlier_threshold = 2.0;
  cfg.ransac.direction_consistency = 0.6;
  cfg.ransac.use_direction_filter = false;
  return cfg;
}

void check_configs_equal(const PipelineConfig& a, const PipelineConfig& b)
{
  CHECK(a.seed == b.seed);
  CHECK(a.explicit_source == b.explicit_source);
  CHECK(a.segments_file == b.segments_file);
  CHECK(a.features.num_octaves == b.features.num_octaves);
  CHECK(a.features.scales_per_octave == b.features.scales_per_octave);
  CHECK(a.features.initial_sigma == b.features.initial_sigma);
  CHECK(a.features.input_blur == b.features.input_blur);
  CHECK(a.features.contrast_threshold == b.features.contrast_threshold);
  CHECK(a.features.edge_ratio == b.features.edge_ratio);
  CHECK(a.features.max_features == b.features.max_features);
  CHECK(a.cluster.threshold.has_value() == b.cluster.threshold.has_value());
  if (a.cluster.threshold && b.cluster.threshold)
    CHECK(*a.cluster.threshold == *b.cluster.threshold);
  CHECK(a.cluster.percentile == b.cluster.percentile);
  CHECK(a.cluster.min_size == b.cluster.min_size);
  CHECK(a.cluster.max_size == b.cluster.max_size);
  CHECK(a.selection.accept_threshold == b.selection.accept_threshold);
  CHECK(a.selection.growth_factor == b.selection.growth_factor);
  CHECK(a.selection.max_exhaustive == b.selection.max_exhaustive);
  CHECK(a.segments.min_length == b.segments.min_length);
  CHECK(a.segments.grad_threshold == b.segments.grad_threshold);
  CHECK(a.segments.max_deviation == b.segments.max_deviation);
  CHECK(a.segments.angle_tolerance == b.segments.angle_tolerance);
  CHECK(a.ransac.alpha == b.ransac.alpha);
  CHECK(a.ransac.beta == b.ransac.beta);
  CHECK(a.ransac.iters_per_run == b.ransac.iters_per_run);
  CHECK(a.ransac.restarts == b.ransac.restarts);
  CHECK(a.ransac.inlier_threshold.has_value() == b.ransac.inlier_threshold.has_value());
  if (a.ransac.inlier_threshold && b.ransac.inlier_threshold)
    CHECK(*a.ransac.inlier_threshold == *b.ransac.inlier_threshold);
  CHECK(a.ransac.direction_consistency == b.ransac.direction_consistency);
  CHECK(a.ransac.use_direction_filter == b.ransac.use_direction_filter);
}

}  // namespace

TEST_CASE("config round-trips losslessly", "[config]")
{
  for (const PipelineConfig& cfg : {PipelineConfig{}, custom_config()}) {
    const std::string text = serialize_config(cfg);
    const PipelineConfig parsed = parse_config_text(text, "<string>");
    check_configs_equal(cfg, parsed);
    // Byte-identical second serialization.
    CHECK(serialize_config(parsed) == text);
  }
}

TEST_CASE("config sentinels auto and adaptive", "[config]")
{
  const PipelineConfig def;  // both optionals unset by default
  const std::string text = serialize_config(def);
  CHECK_THAT(text, ContainsSubstring("cluster.threshold = auto"));
  CHECK_THAT(text, ContainsSubstring("ransac.inlier_threshold = adaptive"));
  const PipelineConfig parsed = parse_config_text(text, "<string>");
  CHECK_FALSE(parsed.cluster.threshold.has_value());
  CHECK_FALSE(parsed.ransac.inlier_threshold.has_value());

  // Explicit values survive, and setting back to the sentinel clears them.
  const PipelineConfig p2 =
      parse_config_text("cluster.threshold = 0.5\nransac.inlier_threshold = 3.25\n", "<string>");
  REQUIRE(p2.cluster.threshold.has_value());
  CHECK(*p2.cluster.threshold == 0.5);
  REQUIRE(p2.ransac.inlier_threshold.has_value());
  CHECK(*p2.ransac.inlier_threshold == 3.25);
}

TEST_CASE("config ignores comments and blank lines, trims whitespace", "[config]")
{
  const std::string text =
      "# a comment\n"
      "\n"
      "   seed =  99  \n"
      "\t# another\n"
      "  cluster.min_size=5\n";
  const PipelineConfig cfg = parse_config_text(text, "<string>");
  CHECK(cfg.seed == 99);
  CHECK(cfg.cluster.min_size == 5);
}

TEST_CASE("config rejects unknown keys and malformed values with line numbers", "[config]")
{
  CHECK_THROWS_WITH(parse_config_text("bogus = 1\n", "<string>"),
                    ContainsSubstring("<string>:1: unknown key 'bogus'"));
  CHECK_THROWS_WITH(parse_config_text("seed = 1\n\nransac.alpha = abc\n", "cfg.txt"),
                    ContainsSubstring("cfg.txt:3: invalid number 'abc'"));
  CHECK_THROWS_WITH(parse_config_text("features.num_octaves = 1.5\n", "<string>"),
                    ContainsSubstring("invalid integer '1.5'"));
  CHECK_THROWS_WITH(parse_config_text("seed = -3\n", "<string>"),
                    ContainsSubstring("invalid seed '-3'"));
  CHECK_THROWS_WITH(parse_config_text("just some words\n", "<string>"),
                    ContainsSubstring("<string>:1: expected 'key = value'"));
  CHECK_THROWS_WITH(parse_config_text("explicit_lines.source = magic\n", "<string>"),
                    ContainsSubstring("invalid source 'magic'"));
  CHECK_THROWS_WITH(parse_config_text("ransac.use_direction_filter = yes\n", "<string>"),
                    ContainsSubstring("invalid boolean 'yes'"));
}

TEST_CASE("config file save and load", "[config]")
{
  const auto path = std::filesystem::temp_directory_path() / "vanishkit_cfg_roundtrip.txt";
  const PipelineConfig cfg = custom_config();
  save_config(cfg, path.string());
  const PipelineConfig back = parse_config(path.string());
  check_configs_equal(cfg, back);
  std::filesystem::remove(path);
  CHECK_THROWS_WITH(parse_config(path.string()), ContainsSubstring("cannot open file"));
}

TEST_CASE("detect_pipeline recovers the vanishing point from clean features",
          "[pipeline]")
{
  for (std::uint64_t scene_seed : {1ULL, 2ULL, 3ULL}) {
    Rng rng(scene_seed);
    const auto [scene, cam] = random_scene(rng);
    const SyntheticInstance inst = generate_instance(scene, cam, {}, scene_seed + 100);

    PipelineConfig cfg;
    cfg.seed = 9;
    cfg.explicit_source = ExplicitSource::None;
    const DetectionOutput out =
        detect_pipeline(inst.features, cam.width, cam.height, {}, cfg, "clean");
    INFO("scene seed " << scene_seed << " fail_stage '" << out.fail_stage << "'");
    REQUIRE(out.vp.has_value());
    CHECK(out.image_id == "clean");
    CHECK(out.fail_stage.empty());
    CHECK(out.n_implicit >= 2);
    CHECK(out.n_inliers >= 2);
    CHECK(out.n_explicit == 0);
    const double err =
        angular_error(make_vp(*out.vp), inst.gt_vp, cam.width, cam.height);
    CHECK(err <= 0.1);
  }
}

TEST_CASE("detect_pipeline is deterministic", "[pipeline]")
{
  Rng rng(6);
  const auto [scene, cam] = random_scene(rng);
  NoiseParams noise;
  noise.pos_sigma = 1.0;
  const SyntheticInstance inst = generate_instance(scene, cam, noise, 17);

  PipelineConfig cfg;
  cfg.seed = 4;
  const DetectionOutput a = detect_pipeline(inst.features, cam.width, cam.height, {}, cfg);
  const DetectionOutput b = detect_pipeline(inst.features, cam.width, cam.height, {}, cfg);
  REQUIRE(a.vp.has_value() == b.vp.has_value());
  if (a.vp) {
    CHECK(a.vp->x == b.vp->x);
    CHECK(a.vp->y == b.vp->y);
  }
  CHECK(a.n_implicit == b.n_implicit);
  CHECK(a.n_inliers == b.n_inliers);
  CHECK(a.fail_stage == b.fail_stage);
}

TEST_CASE("detect_pipeline reports an under-filled pool", "[pipeline]")
{
  PipelineConfig cfg;
  const DetectionOutput out = detect_pipeline({}, 640, 480, {}, cfg, "empty");
  CHECK_FALSE(out.vp.has_value());
  CHECK(out.fail_stage == "pool");
  CHECK(out.n_implicit == 0);
  CHECK(out.n_explicit == 0);
  CHECK(out.n_inliers == 0);

  CHECK_THROWS_WITH(detect_pipeline({}, 0, 480, {}, cfg),
                    ContainsSubstring("invalid image size"));
}

TEST_CASE("detect_pipeline flags an estimate at infinity", "[pipeline]")
{
  // Two parallel horizontal segments meet only at infinity: detection
  // cannot produce pixel coordinates and must say why.
  std::vector<LineSegment> segments;
  segments.push_back({{10.0, 10.0}, {200.0, 10.0}});
  segments.push_back({{10.0, 40.0}, {200.0, 40.0}});
  PipelineConfig cfg;
  cfg.seed = 1;
  const DetectionOutput out = detect_pipeline({}, 256, 256, segments, cfg);
  CHECK_FALSE(out.vp.has_value());
  CHECK(out.fail_stage == "ideal_vp");
  CHECK(out.n_explicit == 2);
  CHECK(out.n_implicit == 0);
  CHECK(out.n_inliers == 2);
}

TEST_CASE("detect_pipeline on a blank image fails in the pool stage", "[pipeline]")
{
  Image img(64, 64, 0.5f);
  PipelineConfig cfg;
  const DetectionOutput out = detect_pipeline(img, cfg, "blank");
  CHECK_FALSE(out.vp.has_value());
  CHECK(out.fail_stage == "pool");
  CHECK(out.n_implicit == 0);
  CHECK(out.n_explicit == 0);
  CHECK(out.image_id == "blank");
}

TEST_CASE("detect_pipeline end-to-end on a rendered instance", "[pipeline][slow]")
{
  // The dots must stay several pixels wide at every depth for the
  // scale-space extractor to localize them, so this scenario uses a large
  // pattern on a roomy canvas.
  GenParams gp;
  gp.width = 800;
  gp.height = 600;
  gp.min_size = 26.0;
  gp.max_size = 34.0;
  gp.min_pattern = 2;
  gp.max_pattern = 2;
  gp.min_count = 5;
  gp.max_count = 5;

  Rng rng(5);
  const auto [scene, cam] = random_scene(rng, gp);
  const SyntheticInstance inst = generate_instance(scene, cam, {}, 105);
  const Image img = render_dots(inst);

  PipelineConfig cfg;
  cfg.seed = 2;
  cfg.explicit_source = ExplicitSource::None;
  // Rendered dots are identical disks, so descriptors carry no slot
  // identity: an absolute cut above the maximum possible descriptor
  // distance keeps all detections in one recurrence group and leaves the
  // trail separation to forward selection.
  cfg.cluster.threshold = 1.5;

  const DetectionOutput out = detect_pipeline(img, cfg, "rendered");
  INFO("fail_stage '" << out.fail_stage << "' implicit " << out.n_implicit);
  REQUIRE(out.vp.has_value());
  const double err = angular_error(make_vp(*out.vp), inst.gt_vp, cam.width, cam.height);
  CHECK(err <= 2.0);
  CHECK(out.timings.extract_ms > 0.0);
  CHECK(out.runtime_ms >= out.timings.extract_ms);
}
