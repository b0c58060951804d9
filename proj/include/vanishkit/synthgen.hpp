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
#include <vanishkit/image.hpp>
#include <vanishkit/image_io.hpp>
#include <vanishkit/random.hpp>

#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vanishkit {

/// Pinhole camera with identity intrinsics apart from the focal length; the
/// principal point sits at the image center. `R` and `t` are the
/// camera-to-world pose: a world point p maps to camera coordinates
/// R^T (p - t), with the image y axis pointing down and z forward.
struct CameraParams
{
  double f = 280.0;
  int width = 640;
  int height = 480;
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  Point2 principal_point() const { return {width / 2.0, height / 2.0}; }
};

/// Whether R is a proper rotation (orthonormal, determinant +1).
inline bool is_valid_rotation(const Eigen::Matrix3d& r, double tol = 1e-9)
{
  return (r.transpose() * r - Eigen::Matrix3d::Identity()).norm() < tol &&
         std::abs(r.determinant() - 1.0) < tol;
}

/// A straight trail of recurring pattern instances in world space: `count`
/// copies of the pattern placed every `spacing` units along `direction`
/// starting at `origin`. Each pattern point is origin + i*spacing*direction
/// + pattern_scale * offset.
struct SceneSpec
{
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  Eigen::Vector3d direction = Eigen::Vector3d::UnitZ();
  double spacing = 1.0;
  int count = 0;
  std::vector<Eigen::Vector3d> pattern_offsets;
  double pattern_scale = 0.2;
};

/// Projects a world point. Throws std::invalid_argument for points at or
/// behind the camera plane.
inline Point2 project(const Eigen::Vector3d& p_world, const CameraParams& cam)
{
  if (!is_valid_rotation(cam.R))
    throw std::invalid_argument("project: R is not a rotation matrix");
  const Eigen::Vector3d pc = cam.R.transpose() * (p_world - cam.t);
  if (!(pc.z() > 1e-12))
    throw std::invalid_argument("project: point not in front of camera");
  const Point2 c = cam.principal_point();
  return {cam.f * pc.x() / pc.z() + c.x, cam.f * pc.y() / pc.z() + c.y};
}

/// Vanishing point of a world direction: the image of the direction vector
/// under the camera rotation,
///   vp = (f * dx/dz + cx, f * dy/dz + cy)   with (dx,dy,dz) = R^T d.
/// Directions parallel to the image plane (dz == 0) produce an ideal
/// estimate. Throws for a zero direction or invalid rotation.
inline VPEstimate theoretical_vp(const Eigen::Vector3d& d_world, const CameraParams& cam)
{
  if (!is_valid_rotation(cam.R))
    throw std::invalid_argument("theoretical_vp: R is not a rotation matrix");
  if (!(d_world.norm() > 0.0))
    throw std::invalid_argument("theoretical_vp: zero direction");
  const Eigen::Vector3d d = cam.R.transpose() * d_world.normalized();
  const Point2 c = cam.principal_point();
  // Homogeneous form (f*dx + cx*dz, f*dy + cy*dz, dz): finite for dz != 0,
  // ideal in direction (dx, dy) otherwise.
  return detail::normalize_vp(cam.f * d.x() + c.x * d.z(), cam.f * d.y() + c.y * d.z(),
                              d.z());
}

/// Vanishing point recovered from the scene's projected geometry alone: two
/// pattern slots are projected into image lines (first and last instance of
/// each) and intersected. This is the estimate a perfect detector would
/// reach, and must agree with theoretical_vp. Requires count >= 2 and two
/// pattern slots whose image lines are distinct.
inline VPEstimate empirical_vp(const SceneSpec& scene, const CameraParams& cam)
{
  if (scene.count < 2 || scene.pattern_offsets.size() < 2)
    throw std::invalid_argument("empirical_vp: need >= 2 instances and >= 2 pattern points");
  const Eigen::Vector3d dir = scene.direction.normalized();
  auto slot_line = [&](std::size_t j) {
    const Eigen::Vector3d base = scene.origin + scene.pattern_scale * scene.pattern_offsets[j];
    const Point2 a = project(base, cam);
    const Point2 b =
        project(base + (scene.count - 1) * scene.spacing * dir, cam);
    return line_through(a, b);
  };
  const HomLine l0 = slot_line(0);
  for (std::size_t j = 1; j < scene.pattern_offsets.size(); ++j) {
    try {
      return intersect(l0, slot_line(j));
    } catch (const std::invalid_argument&) {
      continue;  // coincident projection; try the next slot
    }
  }
  throw std::invalid_argument("empirical_vp: all pattern trails project to one line");
}

/// Measurement noise applied to generated features.
struct NoiseParams
{
  double pos_sigma = 0.0;         ///< Gaussian position noise, px
  double size_jitter = 0.0;       ///< relative size perturbation
  double descriptor_sigma = 0.0;  ///< additive descriptor noise before renorm
};

struct SyntheticInstance
{
  std::vector<Feature> features;
  VPEstimate gt_vp;
  CameraParams camera;
  SceneSpec scene;
};

/// Generates the feature list of a scene under a camera, with optional
/// noise. Each pattern slot gets one persistent appearance (descriptor
/// base, orientation, world radius) shared by all its instances; feature
/// size is the projected slot radius f * r / z, so sizes shrink toward the
/// vanishing point. The same seed always produces the identical instance,
/// and the RNG consumption is independent of the noise levels so that
/// noise-free and noisy variants of a seed share their underlying geometry.
inline SyntheticInstance generate_instance(const SceneSpec& scene,
                                           const CameraParams& cam,
                                           const NoiseParams& noise,
                                           std::uint64_t seed)
{
  if (scene.count < 3)
    throw std::invalid_argument("generate_instance: need at least 3 instances");
  if (scene.pattern_offsets.empty())
    throw std::invalid_argument("generate_instance: empty pattern");
  if (!(scene.spacing > 0.0))
    throw std::invalid_argument("generate_instance: non-positive spacing");
  if (!(scene.direction.norm() > 0.0))
    throw std::invalid_argument("generate_instance: zero direction");
  if (!is_valid_rotation(cam.R))
    throw std::invalid_argument("generate_instance: R is not a rotation matrix");

  const Eigen::Vector3d dir = scene.direction.normalized();
  const std::size_t slots = scene.pattern_offsets.size();

  // Per-slot persistent appearance.
  Rng slot_rng = Rng::derived(seed, 0);
  std::vector<std::array<float, kDescriptorSize>> base_descr(slots);
  std::vector<double> slot_angle(slots), slot_radius(slots);
  for (std::size_t j = 0; j < slots; ++j) {
    std::array<double, kDescriptorSize> raw{};
    double norm = 0.0;
    for (auto& v : raw) {
      v = std::abs(slot_rng.normal());
      norm += v * v;
    }
    norm = std::sqrt(std::max(norm, 1e-30));
    for (int k = 0; k < kDescriptorSize; ++k)
      base_descr[j][static_cast<std::size_t>(k)] = static_cast<float>(raw[static_cast<std::size_t>(k)] / norm);
    slot_angle[j] = slot_rng.uniform(0.0, 2.0 * kPi);
    slot_radius[j] = scene.pattern_scale * (0.35 + 0.3 * slot_rng.uniform());
  }

  Rng noise_rng = Rng::derived(seed, 1);
  std::vector<Feature> feats;
  feats.reserve(static_cast<std::size_t>(scene.count) * slots);
  for (int i = 0; i < scene.count; ++i) {
    for (std::size_t j = 0; j < slots; ++j) {
      const Eigen::Vector3d p = scene.origin + (i * scene.spacing) * dir +
                                scene.pattern_scale * scene.pattern_offsets[j];
      const Point2 uv = project(p, cam);
      const double z = (cam.R.transpose() * (p - cam.t)).z();

      // Draw every noise variate unconditionally so RNG consumption does
      // not depend on which noise terms are enabled.
      const double nx = noise_rng.normal();
      const double ny = noise_rng.normal();
      const double nsize = noise_rng.normal();
      Feature f;
      f.x = uv.x + noise.pos_sigma * nx;
      f.y = uv.y + noise.pos_sigma * ny;
      f.size = std::max(0.05, cam.f * slot_radius[j] / z * (1.0 + noise.size_jitter * nsize));
      f.angle = slot_angle[j];
      f.response = 1.0;
      f.octave = 0;
      std::array<double, kDescriptorSize> d{};
      double norm = 0.0;
      for (int k = 0; k < kDescriptorSize; ++k) {
        const double v = std::max(
            0.0, static_cast<double>(base_descr[j][static_cast<std::size_t>(k)]) +
                     noise.descriptor_sigma * noise_rng.normal());
        d[static_cast<std::size_t>(k)] = v;
        norm += v * v;
      }
      norm = std::sqrt(std::max(norm, 1e-30));
      for (int k = 0; k < kDescriptorSize; ++k)
        f.descriptor[static_cast<std::size_t>(k)] = static_cast<float>(d[static_cast<std::size_t>(k)] / norm);
      feats.push_back(std::move(f));
    }
  }

  detail::canonical_sort(feats);
  for (std::size_t i = 0; i < feats.size(); ++i)
    feats[i].id = static_cast<int>(i);

  SyntheticInstance inst;
  inst.features = std::move(feats);
  inst.gt_vp = theoretical_vp(dir, cam);
  inst.camera = cam;
  inst.scene = scene;
  return inst;
}

/// Parameters of the random scene sampler.
struct GenParams
{
  int width = 640;
  int height = 480;
  double focal = 0.0;             ///< 0: sample in [0.8, 1.5] x (w+h)/4
  double vp_radius_factor = 3.0;  ///< max VP distance from center, diagonals
  int min_count = 6;              ///< pattern instances per trail
  int max_count = 8;
  int min_pattern = 3;            ///< feature slots per pattern
  int max_pattern = 4;
  double margin_frac = 0.06;      ///< image border kept clear
  double min_size = 16.0;         ///< projected pattern radius at the nearest instance, px
  double max_size = 32.0;
  // Trails of one recurring pattern all meet at the vanishing point, so
  // their mutual angles are set by the pattern extent; small patterns give
  // near-parallel trails whose intersection is ill-conditioned. The floor
  // here keeps generated ground truth usable for accuracy measurements.
  double min_trail_angle_deg = 2.5;
};

/// Samples a random scene/camera pair whose ground-truth vanishing point is
/// finite and lies within `vp_radius_factor` image diagonals of the center,
/// whose pattern trails all project inside the image with a margin, and
/// whose trail lines are mutually non-degenerate. Rejection-samples until
/// those hold; throws std::runtime_error if no valid scene emerges (which
/// indicates inconsistent parameters).
inline std::pair<SceneSpec, CameraParams> random_scene(Rng& rng, const GenParams& params = {})
{
  const double diag = std::hypot(params.width, params.height);
  const double cx = params.width / 2.0;
  const double cy = params.height / 2.0;

  for (int attempt = 0; attempt < 2000; ++attempt) {
    CameraParams cam;
    cam.width = params.width;
    cam.height = params.height;
    cam.f = params.focal > 0.0
                ? params.focal
                : rng.uniform(0.8, 1.5) * (params.width + params.height) / 4.0;

    // Target vanishing point: half the time inside the frame (the
    // interesting regime), otherwise anywhere within the radius budget.
    Point2 vp;
    if (rng.uniform() < 0.5) {
      vp = {rng.uniform(0.15, 0.85) * params.width, rng.uniform(0.15, 0.85) * params.height};
    } else {
      const double r = rng.uniform(0.0, params.vp_radius_factor * diag);
      const double phi = rng.uniform(0.0, 2.0 * kPi);
      vp = {cx + r * std::cos(phi), cy + r * std::sin(phi)};
    }

    // Random proper rotation from a uniform quaternion.
    Eigen::Vector4d q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    if (q.norm() < 1e-9)
      continue;
    q.normalize();
    cam.R = Eigen::Quaterniond(q(0), q(1), q(2), q(3)).toRotationMatrix();
    cam.t = Eigen::Vector3d(rng.uniform(-5.0, 5.0), rng.uniform(-5.0, 5.0),
                            rng.uniform(-5.0, 5.0));

    // The camera-frame direction that lands on the target VP, mapped back
    // into world coordinates.
    const Eigen::Vector3d d_cam =
        Eigen::Vector3d((vp.x - cx) / cam.f, (vp.y - cy) / cam.f, 1.0).normalized();
    const Eigen::Vector3d d_world = cam.R * d_cam;

    SceneSpec scene;
    scene.direction = d_world;
    scene.count = params.min_count + rng.uniform_int(params.max_count - params.min_count + 1);

    const double size_px = rng.uniform(params.min_size, params.max_size);

    // Choose the projected trail span first, then place the anchor so the
    // whole corridor (span plus pattern extent) fits inside the margins.
    // The depth ratio follows from span and VP distance: image positions
    // approach the VP as 1 - z0/z, so a trail from a0 covering span S ends
    // at depth ratio r = L / (L - S) with L = |vp - a0|.
    const double margin = params.margin_frac * std::min(params.width, params.height);
    const double span =
        rng.uniform(0.30, 0.65) * std::min(params.width, params.height);
    const double pad = margin + 1.2 * size_px;

    Point2 a0{};
    double depth_ratio = 0.0;
    bool anchored = false;
    for (int tries = 0; tries < 50 && !anchored; ++tries) {
      const Point2 cand{rng.uniform(pad, params.width - pad),
                        rng.uniform(pad, params.height - pad)};
      const double L = std::hypot(vp.x - cand.x, vp.y - cand.y);
      if (L <= 1.2 * span)
        continue;  // depth ratio would exceed 6
      const double r = L / (L - span);
      if (r < 1.05)
        continue;  // trail too flat to show any perspective shrink
      const Point2 end{cand.x + span * (vp.x - cand.x) / L,
                       cand.y + span * (vp.y - cand.y) / L};
      if (end.x < pad || end.x > params.width - pad || end.y < pad ||
          end.y > params.height - pad)
        continue;
      a0 = cand;
      depth_ratio = r;
      anchored = true;
    }
    if (!anchored)
      continue;

    const double z0 = rng.uniform(4.0, 10.0);
    const Eigen::Vector3d o_cam =
        z0 * Eigen::Vector3d((a0.x - cx) / cam.f, (a0.y - cy) / cam.f, 1.0);
    scene.origin = cam.R * o_cam + cam.t;
    scene.spacing = z0 * (depth_ratio - 1.0) /
                    (static_cast<double>(scene.count - 1) * d_cam.z());
    if (!(scene.spacing > 0.0))
      continue;

    // Pattern: slots on a jittered regular simplex filling the unit ball,
    // sized so the nearest instance projects to the requested pattern
    // radius. The wide placement keeps same-instance dots disjoint (slot
    // dots have radius at most 0.325 pattern units: slot radii are at most
    // 0.65 * pattern_scale and dots are drawn at half the feature size) and
    // keeps the per-slot trails angularly separated at the vanishing point.
    scene.pattern_scale = size_px * z0 / cam.f;
    const int slots = params.min_pattern + rng.uniform_int(params.max_pattern - params.min_pattern + 1);

    Eigen::Vector4d sq(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    if (sq.norm() < 1e-9)
      continue;
    sq.normalize();
    const Eigen::Matrix3d srot =
        Eigen::Quaterniond(sq(0), sq(1), sq(2), sq(3)).toRotationMatrix();
    constexpr double kSimplexRadius = 0.88;
    constexpr double kSlotJitter = 0.08;
    std::vector<Eigen::Vector3d> verts;
    if (slots <= 3) {
      const double phase = rng.uniform(0.0, 2.0 * kPi);
      for (int j = 0; j < slots; ++j) {
        const double th = phase + 2.0 * kPi * j / 3.0;
        verts.emplace_back(kSimplexRadius * std::cos(th), kSimplexRadius * std::sin(th), 0.0);
      }
    } else {
      const double s3 = kSimplexRadius / std::sqrt(3.0);
      verts = {{s3, s3, s3}, {s3, -s3, -s3}, {-s3, s3, -s3}, {-s3, -s3, s3}};
    }
    scene.pattern_offsets.clear();
    for (std::size_t j = 0; j < verts.size() && j < static_cast<std::size_t>(slots); ++j) {
      const Eigen::Vector3d jit(rng.uniform(-kSlotJitter, kSlotJitter),
                                rng.uniform(-kSlotJitter, kSlotJitter),
                                rng.uniform(-kSlotJitter, kSlotJitter));
      scene.pattern_offsets.push_back(srot * verts[j] + jit);
    }
    // Any slots beyond the simplex vertices fall back to rejection
    // placement in the unit ball.
    bool placed_all = true;
    while (scene.pattern_offsets.size() < static_cast<std::size_t>(slots) && placed_all) {
      placed_all = false;
      for (int tries = 0; tries < 128; ++tries) {
        const Eigen::Vector3d o(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                                rng.uniform(-1.0, 1.0));
        if (o.norm() > 1.0)
          continue;
        bool far_enough = true;
        for (const auto& prev : scene.pattern_offsets)
          if ((o - prev).norm() < 0.95)
            far_enough = false;
        if (far_enough) {
          scene.pattern_offsets.push_back(o);
          placed_all = true;
          break;
        }
      }
    }
    if (!placed_all)
      continue;

    // Validate the projected geometry.
    bool valid = true;
    std::vector<HomLine> trail_lines;
    std::vector<Point2> all_pts;
    std::vector<double> all_radii;  // max projected dot radius per feature
    try {
      for (std::size_t j = 0; j < scene.pattern_offsets.size() && valid; ++j) {
        const Eigen::Vector3d base =
            scene.origin + scene.pattern_scale * scene.pattern_offsets[j];
        Point2 first{}, last{};
        for (int i = 0; i < scene.count; ++i) {
          const Eigen::Vector3d p = base + (i * scene.spacing) * d_world;
          const Eigen::Vector3d pc = cam.R.transpose() * (p - cam.t);
          if (!(pc.z() > 0.5)) {
            valid = false;
            break;
          }
          const Point2 uv = project(p, cam);
          if (uv.x < margin || uv.x > params.width - margin || uv.y < margin ||
              uv.y > params.height - margin) {
            valid = false;
            break;
          }
          all_pts.push_back(uv);
          all_radii.push_back(0.325 * scene.pattern_scale * cam.f / pc.z());
          if (i == 0)
            first = uv;
          if (i == scene.count - 1)
            last = uv;
        }
        if (valid) {
          if (std::hypot(last.x - first.x, last.y - first.y) < 0.25 * std::min(params.width, params.height)) {
            valid = false;  // trail too short to constrain a line
          } else {
            trail_lines.push_back(line_through(first, last));
          }
        }
      }
    } catch (const std::invalid_argument&) {
      valid = false;
    }
    if (!valid)
      continue;

    // Distinct projected positions: every pair of dots must clear the sum
    // of its radii with slack, or nearby features would blur together.
    for (std::size_t a = 0; a < all_pts.size() && valid; ++a)
      for (std::size_t b = a + 1; b < all_pts.size(); ++b) {
        const double need = 1.15 * (all_radii[a] + all_radii[b]) + 1.0;
        if (std::hypot(all_pts[a].x - all_pts[b].x, all_pts[a].y - all_pts[b].y) < need) {
          valid = false;
          break;
        }
      }
    // ...and mutually non-degenerate trail lines.
    const double min_angle = deg2rad(params.min_trail_angle_deg);
    for (std::size_t a = 0; a < trail_lines.size() && valid; ++a)
      for (std::size_t b = a + 1; b < trail_lines.size(); ++b)
        if (acute_angle(trail_lines[a], trail_lines[b]) < min_angle) {
          valid = false;
          break;
        }
    if (!valid)
      continue;

    return {scene, cam};
  }
  throw std::runtime_error("random_scene: failed to sample a valid scene");
}

/// Renders an instance as dark anti-aliased dots on a white background,
/// one disk of radius size/2 per feature.
inline Image render_dots(const SyntheticInstance& inst)
{
  Image img(inst.camera.width, inst.camera.height, 1.0f);
  for (const Feature& f : inst.features)
    draw_disk(img, f.x, f.y, f.size / 2.0, 0.05f);
  return img;
}

/// Writes an instance directory: features.csv, gt.txt (`x y` of the finite
/// ground-truth point), camera.json, and optionally image.png with the
/// rendered dots. Throws for ideal ground truth, which has no planar
/// serialization in this layout.
inline void save_instance(const std::string& dir,
                          const SyntheticInstance& inst,
                          bool with_image = false)
{
  namespace fs = std::filesystem;
  if (inst.gt_vp.is_ideal())
    throw std::invalid_argument("save_instance: ideal ground truth is not serializable");
  fs::create_directories(dir);
  save_features(inst.features, (fs::path(dir) / "features.csv").string());

  {
    std::ofstream out(fs::path(dir) / "gt.txt", std::ios::binary);
    if (!out)
      throw std::runtime_error(dir + ": cannot write gt.txt");
    const Point2 p = inst.gt_vp.point();
    std::string line;
    detail::append_number(line, p.x);
    line += ' ';
    detail::append_number(line, p.y);
    line += '\n';
    out << line;
  }
  {
    nlohmann::ordered_json j;
    j["f"] = inst.camera.f;
    j["width"] = inst.camera.width;
    j["height"] = inst.camera.height;
    auto& r = j["R"] = nlohmann::ordered_json::array();
    for (int row = 0; row < 3; ++row)
      for (int col = 0; col < 3; ++col)
        r.push_back(inst.camera.R(row, col));
    auto& t = j["t"] = nlohmann::ordered_json::array();
    for (int k = 0; k < 3; ++k)
      t.push_back(inst.camera.t(k));
    std::ofstream out(fs::path(dir) / "camera.json", std::ios::binary);
    if (!out)
      throw std::runtime_error(dir + ": cannot write camera.json");
    out << j.dump(2) << "\n";
  }
  if (with_image)
    write_png(render_dots(inst), (fs::path(dir) / "image.png").string());
}

/// Reads an instance directory written by save_instance. The scene
/// description is not round-tripped (it is not needed for evaluation); the
/// returned scene is default-constructed.
inline SyntheticInstance load_instance(const std::string& dir)
{
  namespace fs = std::filesystem;
  SyntheticInstance inst;
  inst.features = load_features((fs::path(dir) / "features.csv").string());

  {
    const std::string gt_path = (fs::path(dir) / "gt.txt").string();
    std::ifstream in(gt_path, std::ios::binary);
    if (!in)
      throw std::runtime_error(gt_path + ": cannot open file");
    double x = 0.0, y = 0.0;
    if (!(in >> x >> y) || !std::isfinite(x) || !std::isfinite(y))
      throw std::runtime_error(gt_path + ": expected 'x y'");
    inst.gt_vp = make_vp({x, y});
  }
  {
    const std::string cam_path = (fs::path(dir) / "camera.json").string();
    std::ifstream in(cam_path, std::ios::binary);
    if (!in)
      throw std::runtime_error(cam_path + ": cannot open file");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(cam_path + ": " + e.what());
    }
    try {
      inst.camera.f = j.at("f").get<double>();
      inst.camera.width = j.at("width").get<int>();
      inst.camera.height = j.at("height").get<int>();
      const auto& r = j.at("R");
      const auto& t = j.at("t");
      if (r.size() != 9 || t.size() != 3)
        throw std::runtime_error(cam_path + ": R must have 9 entries and t 3");
      for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col)
          inst.camera.R(row, col) = r.at(static_cast<std::size_t>(row * 3 + col)).get<double>();
      for (int k = 0; k < 3; ++k)
        inst.camera.t(k) = t.at(static_cast<std::size_t>(k)).get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(cam_path + ": " + e.what());
    }
    if (!(inst.camera.f > 0.0) || inst.camera.width <= 0 || inst.camera.height <= 0)
      throw std::runtime_error(cam_path + ": invalid camera parameters");
    if (!is_valid_rotation(inst.camera.R, 1e-6))
      throw std::runtime_error(cam_path + ": R is not a rotation matrix");
  }
  return inst;
}

}  // namespace vanishkit
