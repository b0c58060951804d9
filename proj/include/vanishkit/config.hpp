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
#include <vanishkit/features.hpp>
#include <vanishkit/geometry.hpp>
#include <vanishkit/linefit.hpp>
#include <vanishkit/ransac.hpp>
#include <vanishkit/selection.hpp>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vanishkit {

/// Where explicit line segments come from in the pipeline.
enum class ExplicitSource
{
  Builtin,  ///< run the built-in segment detector on the input image
  File,     ///< read segments from `segments_file`
  None,     ///< implicit lines only
};

/// Complete pipeline configuration. Serializes losslessly to a plain-text
/// file of `section.key = value` lines (see parse_config / serialize_config).
struct PipelineConfig
{
  std::uint64_t seed = 0;
  ExplicitSource explicit_source = ExplicitSource::Builtin;
  std::string segments_file;  ///< used when explicit_source == File

  FeatureParams features;
  CutPolicy cluster;
  SelectionConfig selection;
  SegmentParams segments;
  RansacConfig ransac;  ///< rng_seed/image_diagonal/nominal_focal are
                        ///< derived per image at detection time
};

namespace detail {

inline std::string_view trim(std::string_view s)
{
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

[[noreturn]] inline void config_error(const std::string& origin, int line, const std::string& msg)
{
  throw std::runtime_error(origin + ":" + std::to_string(line) + ": " + msg);
}

inline double config_double(const std::string& origin, int line, std::string_view v)
{
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    config_error(origin, line, "invalid number '" + std::string(v) + "'");
  return out;
}

inline int config_int(const std::string& origin, int line, std::string_view v)
{
  int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    config_error(origin, line, "invalid integer '" + std::string(v) + "'");
  return out;
}

inline std::uint64_t config_u64(const std::string& origin, int line, std::string_view v)
{
  std::uint64_t out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    config_error(origin, line, "invalid seed '" + std::string(v) + "'");
  return out;
}

inline bool config_bool(const std::string& origin, int line, std::string_view v)
{
  if (v == "true")
    return true;
  if (v == "false")
    return false;
  config_error(origin, line, "invalid boolean '" + std::string(v) + "' (use true/false)");
}

}  // namespace detail

/// Parses configuration text. `origin` names the source (a path, or e.g.
/// "<string>") for error messages. Lines are `key = value`; blank lines and
/// lines starting with `#` are ignored. Unknown keys are hard errors, so
/// typos never silently fall back to defaults.
inline PipelineConfig parse_config_text(const std::string& text, const std::string& origin)
{
  PipelineConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = detail::trim(raw);
    if (line.empty() || line.front() == '#')
      continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      detail::config_error(origin, line_no, "expected 'key = value'");
    const std::string key{detail::trim(line.substr(0, eq))};
    const std::string_view val = detail::trim(line.substr(eq + 1));
    const auto num = [&] { return detail::config_double(origin, line_no, val); };
    const auto integer = [&] { return detail::config_int(origin, line_no, val); };

    if (key == "seed") {
      cfg.seed = detail::config_u64(origin, line_no, val);
    } else if (key == "explicit_lines.source") {
      if (val == "builtin")
        cfg.explicit_source = ExplicitSource::Builtin;
      else if (val == "file")
        cfg.explicit_source = ExplicitSource::File;
      else if (val == "none")
        cfg.explicit_source = ExplicitSource::None;
      else
        detail::config_error(origin, line_no,
                             "invalid source '" + std::string(val) +
                                 "' (use builtin/file/none)");
    } else if (key == "explicit_lines.file") {
      cfg.segments_file = std::string(val);
    } else if (key == "features.num_octaves") {
      cfg.features.num_octaves = integer();
    } else if (key == "features.scales_per_octave") {
      cfg.features.scales_per_octave = integer();
    } else if (key == "features.initial_sigma") {
      cfg.features.initial_sigma = num();
    } else if (key == "features.input_blur") {
      cfg.features.input_blur = num();
    } else if (key == "features.contrast_threshold") {
      cfg.features.contrast_threshold = num();
    } else if (key == "features.edge_ratio") {
      cfg.features.edge_ratio = num();
    } else if (key == "features.max_features") {
      cfg.features.max_features = integer();
    } else if (key == "cluster.threshold") {
      if (val == "auto")
        cfg.cluster.threshold.reset();
      else
        cfg.cluster.threshold = num();
    } else if (key == "cluster.percentile") {
      cfg.cluster.percentile = num();
    } else if (key == "cluster.min_size") {
      cfg.cluster.min_size = integer();
    } else if (key == "cluster.max_size") {
      cfg.cluster.max_size = integer();
    } else if (key == "selection.accept_threshold") {
      cfg.selection.accept_threshold = num();
    } else if (key == "selection.growth_factor") {
      cfg.selection.growth_factor = num();
    } else if (key == "selection.max_exhaustive") {
      cfg.selection.max_exhaustive = integer();
    } else if (key == "segments.min_length") {
      cfg.segments.min_length = num();
    } else if (key == "segments.grad_threshold") {
      cfg.segments.grad_threshold = num();
    } else if (key == "segments.max_deviation") {
      cfg.segments.max_deviation = num();
    } else if (key == "segments.angle_tolerance_deg") {
      cfg.segments.angle_tolerance = deg2rad(num());
    } else if (key == "ransac.alpha") {
      cfg.ransac.alpha = num();
    } else if (key == "ransac.beta") {
      cfg.ransac.beta = num();
    } else if (key == "ransac.iters_per_run") {
      cfg.ransac.iters_per_run = integer();
    } else if (key == "ransac.restarts") {
      cfg.ransac.restarts = integer();
    } else if (key == "ransac.inlier_threshold") {
      if (val == "adaptive")
        cfg.ransac.inlier_threshold.reset();
      else
        cfg.ransac.inlier_threshold = num();
    } else if (key == "ransac.direction_consistency") {
      cfg.ransac.direction_consistency = num();
    } else if (key == "ransac.use_direction_filter") {
      cfg.ransac.use_direction_filter = detail::config_bool(origin, line_no, val);
    } else {
      detail::config_error(origin, line_no, "unknown key '" + key + "'");
    }
  }
  return cfg;
}

/// Reads and parses a configuration file.
inline PipelineConfig parse_config(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

/// Serializes a configuration to the text format accepted by
/// parse_config_text. Round-trips losslessly: parsing the output reproduces
/// the input configuration exactly, including the `auto`/`adaptive`
/// sentinels for unset optional values.
inline std::string serialize_config(const PipelineConfig& cfg)
{
  std::string out;
  const auto put = [&](std::string_view key, const std::string& value) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  };
  const auto put_num = [&](std::string_view key, double v) {
    std::string s;
    detail::append_number(s, v);
    put(key, s);
  };
  const auto put_int = [&](std::string_view key, long long v) { put(key, std::to_string(v)); };

  put("seed", std::to_string(cfg.seed));
  switch (cfg.explicit_source) {
    case ExplicitSource::Builtin: put("explicit_lines.source", "builtin"); break;
    case ExplicitSource::File: put("explicit_lines.source", "file"); break;
    case ExplicitSource::None: put("explicit_lines.source", "none"); break;
  }
  put("explicit_lines.file", cfg.segments_file);
  put_int("features.num_octaves", cfg.features.num_octaves);
  put_int("features.scales_per_octave", cfg.features.scales_per_octave);
  put_num("features.initial_sigma", cfg.features.initial_sigma);
  put_num("features.input_blur", cfg.features.input_blur);
  put_num("features.contrast_threshold", cfg.features.contrast_threshold);
  put_num("features.edge_ratio", cfg.features.edge_ratio);
  put_int("features.max_features", cfg.features.max_features);
  if (cfg.cluster.threshold)
    put_num("cluster.threshold", *cfg.cluster.threshold);
  else
    put("cluster.threshold", "auto");
  put_num("cluster.percentile", cfg.cluster.percentile);
  put_int("cluster.min_size", cfg.cluster.min_size);
  put_int("cluster.max_size", cfg.cluster.max_size);
  put_num("selection.accept_threshold", cfg.selection.accept_threshold);
  put_num("selection.growth_factor", cfg.selection.growth_factor);
  put_int("selection.max_exhaustive", cfg.selection.max_exhaustive);
  put_num("segments.min_length", cfg.segments.min_length);
  put_num("segments.grad_threshold", cfg.segments.grad_threshold);
  put_num("segments.max_deviation", cfg.segments.max_deviation);
  put_num("segments.angle_tolerance_deg", rad2deg(cfg.segments.angle_tolerance));
  put_num("ransac.alpha", cfg.ransac.alpha);
  put_num("ransac.beta", cfg.ransac.beta);
  put_int("ransac.iters_per_run", cfg.ransac.iters_per_run);
  put_int("ransac.restarts", cfg.ransac.restarts);
  if (cfg.ransac.inlier_threshold)
    put_num("ransac.inlier_threshold", *cfg.ransac.inlier_threshold);
  else
    put("ransac.inlier_threshold", "adaptive");
  put_num("ransac.direction_consistency", cfg.ransac.direction_consistency);
  put("ransac.use_direction_filter", cfg.ransac.use_direction_filter ? "true" : "false");
  return out;
}

/// Writes a configuration file.
inline void save_config(const PipelineConfig& cfg, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  out << serialize_config(cfg);
  if (!out)
    throw std::runtime_error(path + ": write failed");
}

}  // namespace vanishkit
