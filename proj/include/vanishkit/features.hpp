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
#include <vanishkit/image.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace vanishkit {

/// Number of descriptor dimensions (4 x 4 spatial cells x 8 orientations).
constexpr int kDescriptorSize = 128;

/// A scale-space blob feature with a local appearance descriptor.
struct Feature
{
  int id = 0;          ///< index within the extracted (sorted) feature list
  double x = 0.0;      ///< sub-pixel x in original image coordinates
  double y = 0.0;      ///< sub-pixel y in original image coordinates
  double size = 0.0;   ///< detection scale sigma, in original-image pixels
  double angle = 0.0;  ///< dominant gradient orientation, radians in [0, 2*pi)
  double response = 0.0;  ///< interpolated DoG extremum magnitude
  int octave = 0;         ///< pyramid octave the feature was detected in
  std::array<float, kDescriptorSize> descriptor{};

  Point2 position() const { return {x, y}; }
};

struct FeatureParams
{
  int num_octaves = 4;
  int scales_per_octave = 3;
  double initial_sigma = 1.6;   ///< scale of the first pyramid level
  double input_blur = 0.5;      ///< blur assumed already present in the input
  double contrast_threshold = 0.03;  ///< DoG rejection level for [0,1] images
  double edge_ratio = 10.0;     ///< max principal-curvature ratio
  int max_features = 0;         ///< keep the strongest N when > 0
};

/// Euclidean distance between two descriptors.
inline double descriptor_distance(const Feature& a, const Feature& b)
{
  double acc = 0.0;
  for (int i = 0; i < kDescriptorSize; ++i) {
    const double d = static_cast<double>(a.descriptor[i]) - b.descriptor[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

namespace detail {

constexpr int kScanBorder = 5;          ///< extremum scan margin, pyramid px
constexpr int kMaxRefineSteps = 5;      ///< sub-pixel localization iterations
constexpr int kOriHistBins = 36;
constexpr double kOriSigmaFactor = 1.5;  ///< orientation window vs. scale
constexpr double kOriPeakRatio = 0.8;    ///< secondary orientation threshold
constexpr int kDescrWidth = 4;           ///< descriptor cells per side
constexpr int kDescrOriBins = 8;
constexpr double kDescrCellScale = 3.0;  ///< cell width vs. scale
constexpr double kDescrMagClip = 0.2;    ///< descriptor clipping threshold

struct Pyramid
{
  // gauss[o][i] has octave-relative scale initial_sigma * 2^(i/S);
  // dog[o][i] = gauss[o][i+1] - gauss[o][i].
  std::vector<std::vector<Image>> gauss;
  std::vector<std::vector<Image>> dog;
};

inline Pyramid build_pyramid(const Image& img, const FeatureParams& p)
{
  const int s = p.scales_per_octave;
  const int levels = s + 3;
  const double k = std::pow(2.0, 1.0 / s);

  // Cap the octave count so the coarsest octave keeps at least ~16 pixels
  // on its shorter side.
  const int max_octaves =
      std::max(1, static_cast<int>(std::floor(std::log2(std::min(img.width, img.height) / 16.0))) + 1);
  const int octaves = std::clamp(p.num_octaves, 1, max_octaves);

  // Bring the input up to the base scale, accounting for its assumed blur.
  const double base_diff =
      std::sqrt(std::max(0.0, p.initial_sigma * p.initial_sigma - p.input_blur * p.input_blur));
  Image base = gaussian_blur(img, base_diff);

  Pyramid pyr;
  pyr.gauss.resize(static_cast<std::size_t>(octaves));
  pyr.dog.resize(static_cast<std::size_t>(octaves));
  for (int o = 0; o < octaves; ++o) {
    auto& g = pyr.gauss[static_cast<std::size_t>(o)];
    g.reserve(static_cast<std::size_t>(levels));
    g.push_back(o == 0 ? std::move(base)
                       : half_sample(pyr.gauss[static_cast<std::size_t>(o - 1)][static_cast<std::size_t>(s)]));
    for (int i = 1; i < levels; ++i) {
      const double sig_prev = p.initial_sigma * std::pow(k, i - 1);
      const double sig_total = sig_prev * k;
      const double sig_diff = std::sqrt(sig_total * sig_total - sig_prev * sig_prev);
      g.push_back(gaussian_blur(g.back(), sig_diff));
    }
    auto& d = pyr.dog[static_cast<std::size_t>(o)];
    d.reserve(static_cast<std::size_t>(levels - 1));
    for (int i = 0; i + 1 < levels; ++i)
      d.push_back(subtract(g[static_cast<std::size_t>(i + 1)], g[static_cast<std::size_t>(i)]));
  }
  return pyr;
}

/// True when dog[li](x, y) is a strict-or-equal extremum over its 26
/// neighbors in the 3x3x3 cube.
inline bool is_extremum(const std::vector<Image>& dog, int li, int x, int y)
{
  const float v = dog[static_cast<std::size_t>(li)].at(x, y);
  if (v > 0.0f) {
    for (int dl = -1; dl <= 1; ++dl)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dl == 0 && dy == 0 && dx == 0)
            continue;
          if (v < dog[static_cast<std::size_t>(li + dl)].at(x + dx, y + dy))
            return false;
        }
    return true;
  }
  if (v < 0.0f) {
    for (int dl = -1; dl <= 1; ++dl)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dl == 0 && dy == 0 && dx == 0)
            continue;
          if (v > dog[static_cast<std::size_t>(li + dl)].at(x + dx, y + dy))
            return false;
        }
    return true;
  }
  return false;
}

struct Localized
{
  double dx = 0.0, dy = 0.0, ds = 0.0;  ///< sub-pixel offsets
  double contrast = 0.0;                ///< interpolated extremum value
  int x = 0, y = 0, li = 0;             ///< final integer location
};

/// Iterative quadratic localization of a scale-space extremum. Returns
/// false when the extremum is unstable (diverges or leaves the valid range).
inline bool localize_extremum(const std::vector<Image>& dog,
                              int scales,
                              int li,
                              int x,
                              int y,
                              Localized& out)
{
  const int w = dog[0].width;
  const int h = dog[0].height;
  double ddx = 0.0, ddy = 0.0, dds = 0.0;
  Eigen::Vector3d grad;

  for (int step = 0; step < kMaxRefineSteps; ++step) {
    const Image& prev = dog[static_cast<std::size_t>(li - 1)];
    const Image& cur = dog[static_cast<std::size_t>(li)];
    const Image& next = dog[static_cast<std::size_t>(li + 1)];
    const double v = cur.at(x, y);

    grad << (cur.at(x + 1, y) - cur.at(x - 1, y)) / 2.0,
        (cur.at(x, y + 1) - cur.at(x, y - 1)) / 2.0,
        (next.at(x, y) - prev.at(x, y)) / 2.0;

    const double dxx = cur.at(x + 1, y) + cur.at(x - 1, y) - 2.0 * v;
    const double dyy = cur.at(x, y + 1) + cur.at(x, y - 1) - 2.0 * v;
    const double dss = next.at(x, y) + prev.at(x, y) - 2.0 * v;
    const double dxy = (cur.at(x + 1, y + 1) - cur.at(x + 1, y - 1) -
                        cur.at(x - 1, y + 1) + cur.at(x - 1, y - 1)) / 4.0;
    const double dxs = (next.at(x + 1, y) - next.at(x - 1, y) -
                        prev.at(x + 1, y) + prev.at(x - 1, y)) / 4.0;
    const double dys = (next.at(x, y + 1) - next.at(x, y - 1) -
                        prev.at(x, y + 1) + prev.at(x, y - 1)) / 4.0;

    Eigen::Matrix3d hess;
    hess << dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss;
    if (std::abs(hess.determinant()) < 1e-30)
      return false;
    const Eigen::Vector3d delta = hess.colPivHouseholderQr().solve(-grad);
    ddx = delta.x();
    ddy = delta.y();
    dds = delta.z();
    if (std::abs(ddx) < 0.5 && std::abs(ddy) < 0.5 && std::abs(dds) < 0.5) {
      out.dx = ddx;
      out.dy = ddy;
      out.ds = dds;
      out.contrast = v + 0.5 * grad.dot(delta);
      out.x = x;
      out.y = y;
      out.li = li;
      return true;
    }
    if (std::abs(ddx) > static_cast<double>(w) || std::abs(ddy) > static_cast<double>(h) ||
        std::abs(dds) > static_cast<double>(scales))
      return false;  // diverging
    x += static_cast<int>(std::lround(ddx));
    y += static_cast<int>(std::lround(ddy));
    li += static_cast<int>(std::lround(dds));
    if (li < 1 || li > scales || x < kScanBorder || x >= w - kScanBorder ||
        y < kScanBorder || y >= h - kScanBorder)
      return false;
  }
  return false;
}

/// Rejects edge-like responses via the principal-curvature ratio of the
/// 2x2 spatial Hessian.
inline bool passes_edge_test(const Image& dog, int x, int y, double edge_ratio)
{
  const double v = dog.at(x, y);
  const double dxx = dog.at(x + 1, y) + dog.at(x - 1, y) - 2.0 * v;
  const double dyy = dog.at(x, y + 1) + dog.at(x, y - 1) - 2.0 * v;
  const double dxy = (dog.at(x + 1, y + 1) - dog.at(x + 1, y - 1) -
                      dog.at(x - 1, y + 1) + dog.at(x - 1, y - 1)) / 4.0;
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  if (det <= 0.0)
    return false;
  const double r = edge_ratio;
  return tr * tr * r < (r + 1.0) * (r + 1.0) * det;
}

/// 36-bin gradient orientation histogram around (xi, yi), returning the
/// peak value. Out-of-bounds samples are skipped.
inline double orientation_histogram(const Image& img,
                                    int xi,
                                    int yi,
                                    double sigma,
                                    std::array<double, kOriHistBins>& hist)
{
  hist.fill(0.0);
  const double ori_sigma = kOriSigmaFactor * sigma;
  const int radius = static_cast<int>(std::lround(3.0 * ori_sigma));
  const double denom = 2.0 * ori_sigma * ori_sigma;

  std::array<double, kOriHistBins> raw{};
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const int px = xi + dx;
      const int py = yi + dy;
      if (px < 1 || px >= img.width - 1 || py < 1 || py >= img.height - 1)
        continue;
      const double gx = img.at(px + 1, py) - img.at(px - 1, py);
      const double gy = img.at(px, py + 1) - img.at(px, py - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0)
        continue;
      const double w = std::exp(-(static_cast<double>(dx) * dx + static_cast<double>(dy) * dy) / denom);
      double ang = std::atan2(gy, gx);
      if (ang < 0.0)
        ang += 2.0 * kPi;
      int bin = static_cast<int>(std::lround(kOriHistBins * ang / (2.0 * kPi)));
      bin %= kOriHistBins;
      raw[static_cast<std::size_t>(bin)] += w * mag;
    }
  }
  // One circular [1 4 6 4 1]/16 smoothing pass.
  double peak = 0.0;
  for (int i = 0; i < kOriHistBins; ++i) {
    auto tap = [&](int j) { return raw[static_cast<std::size_t>(((j % kOriHistBins) + kOriHistBins) % kOriHistBins)]; };
    hist[static_cast<std::size_t>(i)] =
        (tap(i - 2) + tap(i + 2)) * (1.0 / 16.0) +
        (tap(i - 1) + tap(i + 1)) * (4.0 / 16.0) + tap(i) * (6.0 / 16.0);
    peak = std::max(peak, hist[static_cast<std::size_t>(i)]);
  }
  return peak;
}

/// Computes the 128-dimensional descriptor for a keypoint at octave
/// coordinates (xf, yf) with octave-relative scale sigma and orientation
/// theta. Returns false for an all-zero (flat patch) descriptor.
inline bool compute_descriptor(const Image& img,
                               double xf,
                               double yf,
                               double sigma,
                               double theta,
                               std::array<float, kDescriptorSize>& out)
{
  constexpr int d = kDescrWidth;
  constexpr int n = kDescrOriBins;
  const double cos_t = std::cos(theta);
  const double sin_t = std::sin(theta);
  const double hist_width = kDescrCellScale * sigma;
  const int radius =
      static_cast<int>(std::lround(hist_width * std::sqrt(2.0) * (d + 1) * 0.5));
  const int xi = static_cast<int>(std::lround(xf));
  const int yi = static_cast<int>(std::lround(yf));

  // (d+2)^2 spatial cells x n orientation bins, with a one-cell apron so the
  // trilinear scatter never writes out of range.
  std::array<double, (d + 2) * (d + 2) * n> hist{};
  auto at = [&](int r, int c, int o) -> double& {
    return hist[static_cast<std::size_t>((r * (d + 2) + c) * n + o)];
  };

  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      const double rot_u = (dx * cos_t + dy * sin_t) / hist_width;
      const double rot_v = (-dx * sin_t + dy * cos_t) / hist_width;
      const double ubin = rot_u + d / 2.0 - 0.5;
      const double vbin = rot_v + d / 2.0 - 0.5;
      if (!(ubin > -1.0 && ubin < d && vbin > -1.0 && vbin < d))
        continue;
      const int px = xi + dx;
      const int py = yi + dy;
      if (px < 1 || px >= img.width - 1 || py < 1 || py >= img.height - 1)
        continue;
      const double gx = img.at(px + 1, py) - img.at(px - 1, py);
      const double gy = img.at(px, py + 1) - img.at(px, py - 1);
      double ang = std::atan2(gy, gx) - theta;
      while (ang < 0.0)
        ang += 2.0 * kPi;
      while (ang >= 2.0 * kPi)
        ang -= 2.0 * kPi;
      const double obin = ang * n / (2.0 * kPi);
      const double mag = std::hypot(gx, gy) *
                         std::exp(-(rot_u * rot_u + rot_v * rot_v) / (0.5 * d * d));

      int r0 = static_cast<int>(std::floor(vbin));
      int c0 = static_cast<int>(std::floor(ubin));
      int o0 = static_cast<int>(std::floor(obin));
      const double rb = vbin - r0;
      const double cb = ubin - c0;
      const double ob = obin - o0;
      for (int ri = 0; ri <= 1; ++ri) {
        const double wr = mag * (ri ? rb : 1.0 - rb);
        for (int ci = 0; ci <= 1; ++ci) {
          const double wc = wr * (ci ? cb : 1.0 - cb);
          for (int oi = 0; oi <= 1; ++oi) {
            const double wo = wc * (oi ? ob : 1.0 - ob);
            at(r0 + 1 + ri, c0 + 1 + ci, (o0 + oi) % n) += wo;
          }
        }
      }
    }
  }

  std::array<double, kDescriptorSize> vec{};
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      for (int o = 0; o < n; ++o)
        vec[static_cast<std::size_t>((r * d + c) * n + o)] = at(r + 1, c + 1, o);

  double norm = 0.0;
  for (double v : vec)
    norm += v * v;
  norm = std::sqrt(norm);
  if (norm <= 1e-12)
    return false;  // flat patch: no usable descriptor
  const double clip = kDescrMagClip * norm;
  double norm2 = 0.0;
  for (double& v : vec) {
    v = std::min(v, clip);
    norm2 += v * v;
  }
  norm2 = std::sqrt(norm2);
  for (int i = 0; i < kDescriptorSize; ++i)
    out[static_cast<std::size_t>(i)] = static_cast<float>(vec[static_cast<std::size_t>(i)] / norm2);
  return true;
}

inline void canonical_sort(std::vector<Feature>& feats)
{
  std::sort(feats.begin(), feats.end(), [](const Feature& a, const Feature& b) {
    if (a.octave != b.octave)
      return a.octave < b.octave;
    if (a.response != b.response)
      return a.response > b.response;
    if (a.x != b.x)
      return a.x < b.x;
    if (a.y != b.y)
      return a.y < b.y;
    if (a.size != b.size)
      return a.size < b.size;
    return a.angle < b.angle;
  });
}

}  // namespace detail

/// Detects scale-space blob features and computes their descriptors.
///
/// The detector is a difference-of-Gaussians pyramid with sub-pixel
/// quadratic localization, contrast and edge-response rejection, dominant
/// gradient orientations from a smoothed 36-bin histogram (one feature per
/// accepted peak), and a 4x4x8 gradient-location-orientation descriptor
/// with trilinear interpolation, clipped at 0.2 and renormalized to unit
/// length. Features whose descriptor support exits the image are discarded.
///
/// The result is sorted by (octave asc, response desc, x, y, size, angle)
/// and ids are assigned in sorted order, so extraction is reproducible down
/// to the byte. Throws std::invalid_argument for images smaller than 32x32
/// or with non-finite pixels; a constant image yields an empty list.
inline std::vector<Feature> extract_features(const Image& img, const FeatureParams& params = {})
{
  if (img.width < 32 || img.height < 32)
    throw std::invalid_argument("extract_features: image too small (need at least 32x32)");
  float lo = img.data.empty() ? 0.0f : img.data[0];
  float hi = lo;
  for (float v : img.data) {
    if (!std::isfinite(v))
      throw std::invalid_argument("extract_features: non-finite pixel values");
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo == hi)
    return {};  // constant image: no structure

  const int s = params.scales_per_octave;
  if (s < 1 || params.num_octaves < 1)
    throw std::invalid_argument("extract_features: invalid pyramid configuration");
  const detail::Pyramid pyr = detail::build_pyramid(img, params);
  const double prefilter = 0.5 * params.contrast_threshold / s;

  std::vector<Feature> feats;
  for (int o = 0; o < static_cast<int>(pyr.dog.size()); ++o) {
    const auto& dog = pyr.dog[static_cast<std::size_t>(o)];
    const auto& gauss = pyr.gauss[static_cast<std::size_t>(o)];
    const int w = dog[0].width;
    const int h = dog[0].height;
    const double octave_scale = std::pow(2.0, o);

    for (int li = 1; li <= s; ++li) {
      for (int y = detail::kScanBorder; y < h - detail::kScanBorder; ++y) {
        for (int x = detail::kScanBorder; x < w - detail::kScanBorder; ++x) {
          const float v = dog[static_cast<std::size_t>(li)].at(x, y);
          if (std::abs(v) <= prefilter)
            continue;
          if (!detail::is_extremum(dog, li, x, y))
            continue;
          detail::Localized loc;
          if (!detail::localize_extremum(dog, s, li, x, y, loc))
            continue;
          if (std::abs(loc.contrast) * s < params.contrast_threshold)
            continue;
          if (!detail::passes_edge_test(dog[static_cast<std::size_t>(loc.li)], loc.x, loc.y,
                                        params.edge_ratio))
            continue;

          const double xf = loc.x + loc.dx;
          const double yf = loc.y + loc.dy;
          const double level = loc.li + loc.ds;
          const double sigma_rel = params.initial_sigma * std::pow(2.0, level / s);

          // Discard features whose descriptor support would leave the
          // octave image.
          const double support =
              detail::kDescrCellScale * sigma_rel * std::sqrt(2.0) * (detail::kDescrWidth + 1) * 0.5;
          if (xf - support < 1.0 || xf + support > w - 2.0 || yf - support < 1.0 ||
              yf + support > h - 2.0)
            continue;

          const int gli = std::clamp(static_cast<int>(std::lround(level)), 0, s + 2);
          const Image& gimg = gauss[static_cast<std::size_t>(gli)];

          std::array<double, detail::kOriHistBins> hist{};
          const double peak =
              detail::orientation_histogram(gimg, static_cast<int>(std::lround(xf)),
                                            static_cast<int>(std::lround(yf)), sigma_rel, hist);
          if (peak <= 0.0)
            continue;  // no gradient energy at all

          std::vector<double> angles;
          const double thresh = detail::kOriPeakRatio * peak;
          for (int b = 0; b < detail::kOriHistBins; ++b) {
            const double hl = hist[static_cast<std::size_t>((b + detail::kOriHistBins - 1) % detail::kOriHistBins)];
            const double hc = hist[static_cast<std::size_t>(b)];
            const double hr = hist[static_cast<std::size_t>((b + 1) % detail::kOriHistBins)];
            if (hc > hl && hc > hr && hc >= thresh) {
              const double denom = hl - 2.0 * hc + hr;
              const double offset = denom != 0.0 ? 0.5 * (hl - hr) / denom : 0.0;
              double ang = 2.0 * kPi * (b + offset) / detail::kOriHistBins;
              while (ang < 0.0)
                ang += 2.0 * kPi;
              while (ang >= 2.0 * kPi)
                ang -= 2.0 * kPi;
              angles.push_back(ang);
            }
          }
          if (angles.empty()) {
            // Flat histogram (e.g. rotationally symmetric blob): fall back
            // to the first maximal bin for a deterministic orientation.
            int best = 0;
            for (int b = 1; b < detail::kOriHistBins; ++b)
              if (hist[static_cast<std::size_t>(b)] > hist[static_cast<std::size_t>(best)])
                best = b;
            angles.push_back(2.0 * kPi * best / detail::kOriHistBins);
          }

          for (double ang : angles) {
            Feature f;
            f.x = xf * octave_scale;
            f.y = yf * octave_scale;
            f.size = sigma_rel * octave_scale;
            f.angle = ang;
            f.response = std::abs(loc.contrast);
            f.octave = o;
            if (!detail::compute_descriptor(gimg, xf, yf, sigma_rel, ang, f.descriptor))
              continue;
            feats.push_back(std::move(f));
          }
        }
      }
    }
  }

  // Remove exact duplicates from plateau extrema that localized to the same
  // refined keypoint.
  detail::canonical_sort(feats);
  feats.erase(std::unique(feats.begin(), feats.end(),
                          [](const Feature& a, const Feature& b) {
                            return a.x == b.x && a.y == b.y && a.size == b.size &&
                                   a.angle == b.angle;
                          }),
              feats.end());

  if (params.max_features > 0 && static_cast<int>(feats.size()) > params.max_features) {
    std::sort(feats.begin(), feats.end(), [](const Feature& a, const Feature& b) {
      if (a.response != b.response)
        return a.response > b.response;
      if (a.octave != b.octave)
        return a.octave < b.octave;
      if (a.x != b.x)
        return a.x < b.x;
      if (a.y != b.y)
        return a.y < b.y;
      if (a.size != b.size)
        return a.size < b.size;
      return a.angle < b.angle;
    });
    feats.resize(static_cast<std::size_t>(params.max_features));
    detail::canonical_sort(feats);
  }

  for (std::size_t i = 0; i < feats.size(); ++i)
    feats[i].id = static_cast<int>(i);
  return feats;
}

namespace detail {

inline void append_number(std::string& out, double v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

inline void append_number(std::string& out, float v)
{
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", static_cast<double>(v));
  out += buf;
}

inline double parse_number(const std::string& path, int line_no, std::string_view tok)
{
  double v = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v))
    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": invalid number '" +
                             std::string(tok) + "'");
  return v;
}

}  // namespace detail

/// Writes features to CSV with header
/// `x,y,size,angle,response,octave,d0,...,d127`. Output is byte-stable for
/// identical inputs.
inline void save_features(const std::vector<Feature>& feats, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  std::string line = "x,y,size,angle,response,octave";
  for (int i = 0; i < kDescriptorSize; ++i)
    line += ",d" + std::to_string(i);
  line += "\n";
  out << line;
  for (const Feature& f : feats) {
    line.clear();
    detail::append_number(line, f.x);
    line += ',';
    detail::append_number(line, f.y);
    line += ',';
    detail::append_number(line, f.size);
    line += ',';
    detail::append_number(line, f.angle);
    line += ',';
    detail::append_number(line, f.response);
    line += ',';
    line += std::to_string(f.octave);
    for (float d : f.descriptor) {
      line += ',';
      detail::append_number(line, d);
    }
    line += "\n";
    out << line;
  }
  if (!out)
    throw std::runtime_error(path + ": write failed");
}

/// Reads a feature CSV produced by save_features (or an external tool using
/// the same layout). Rows must have exactly 6 + 128 fields; malformed rows
/// raise std::runtime_error naming the file and line. Ids are assigned in
/// row order.
inline std::vector<Feature> load_features(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(path + ": cannot open file");
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file (missing header)");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line.rfind("x,y,size,angle,response,octave", 0) != 0)
    throw std::runtime_error(path + ":1: unrecognized header '" + line + "'");

  constexpr int kFields = 6 + kDescriptorSize;
  std::vector<Feature> feats;
  std::vector<std::string_view> tokens;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    tokens.clear();
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      if (comma == std::string::npos) {
        tokens.emplace_back(line.data() + start, line.size() - start);
        break;
      }
      tokens.emplace_back(line.data() + start, comma - start);
      start = comma + 1;
    }
    if (static_cast<int>(tokens.size()) != kFields)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                               std::to_string(kFields) + " fields, got " +
                               std::to_string(tokens.size()));
    Feature f;
    f.id = static_cast<int>(feats.size());
    f.x = detail::parse_number(path, line_no, tokens[0]);
    f.y = detail::parse_number(path, line_no, tokens[1]);
    f.size = detail::parse_number(path, line_no, tokens[2]);
    if (!(f.size > 0.0))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": non-positive size");
    f.angle = detail::parse_number(path, line_no, tokens[3]);
    f.angle = std::fmod(f.angle, 2.0 * kPi);
    if (f.angle < 0.0)
      f.angle += 2.0 * kPi;
    f.response = detail::parse_number(path, line_no, tokens[4]);
    f.octave = static_cast<int>(detail::parse_number(path, line_no, tokens[5]));
    for (int i = 0; i < kDescriptorSize; ++i)
      f.descriptor[static_cast<std::size_t>(i)] =
          static_cast<float>(detail::parse_number(path, line_no, tokens[static_cast<std::size_t>(6 + i)]));
    feats.push_back(std::move(f));
  }
  return feats;
}

}  // namespace vanishkit
