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
#include <vanishkit/selection.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace vanishkit {

/// An explicit straight edge segment in image coordinates.
struct LineSegment
{
  Point2 p0;
  Point2 p1;

  double length() const { return std::hypot(p1.x - p0.x, p1.y - p0.y); }
};

struct SegmentParams
{
  double min_length = 20.0;      ///< minimum accepted segment length, px
  double grad_threshold = 0.08;  ///< Sobel magnitude threshold ([0,1] images)
  double max_deviation = 1.5;    ///< max pixel distance from the fitted line
  double angle_tolerance = deg2rad(22.5);  ///< tangent continuity bound
};

/// Fits an oriented line through a recurring-feature subset.
///
/// The carrier is the total-least-squares line through the member
/// positions; the anchor is their centroid. The direction points from the
/// larger-size end toward the smaller-size end (recurring instances shrink
/// toward the vanishing point). When the two end features have exactly
/// equal size, the sign of the size-vs-position regression slope decides;
/// if that slope is negligible too, the line is left undirected.
inline OrientedLine fit_oriented_line(std::span<const Feature> feats,
                                      const OrderedSubset& subset)
{
  const auto& ids = subset.feature_ids;
  if (ids.size() < 3)
    throw std::invalid_argument("fit_oriented_line: need at least 3 members");
  std::vector<Point2> pts;
  pts.reserve(ids.size());
  for (int id : ids)
    pts.push_back(feats[static_cast<std::size_t>(id)].position());
  const HomLine line = fit_line_lsq(pts);
  const Vec2 tangent = line.tangent();

  OrientedLine out;
  out.line = line;
  out.source = LineSource::Implicit;
  out.weight = 0.0;

  double mx = 0.0, my = 0.0;
  for (const Point2& p : pts) {
    mx += p.x;
    my += p.y;
  }
  out.anchor = {mx / static_cast<double>(pts.size()), my / static_cast<double>(pts.size())};

  // Projections along the tangent, in subset order.
  std::vector<double> t(ids.size()), sz(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const Feature& f = feats[static_cast<std::size_t>(ids[i])];
    t[i] = f.x * tangent.x + f.y * tangent.y;
    sz[i] = f.size;
  }
  std::size_t lo = 0, hi = 0;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] < t[lo])
      lo = i;
    if (t[i] > t[hi])
      hi = i;
  }

  double sign = 0.0;
  if (sz[lo] > sz[hi]) {
    sign = 1.0;  // sizes shrink with increasing projection
  } else if (sz[lo] < sz[hi]) {
    sign = -1.0;
  } else {
    // End sizes equal: use the least-squares slope of size over projection.
    double tm = 0.0, sm = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      tm += t[i];
      sm += sz[i];
    }
    tm /= static_cast<double>(t.size());
    sm /= static_cast<double>(t.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      num += (t[i] - tm) * (sz[i] - sm);
      den += (t[i] - tm) * (t[i] - tm);
    }
    const double slope = den > 0.0 ? num / den : 0.0;
    const double scale = sm / std::max(t[hi] - t[lo], 1e-12);
    if (slope < -1e-9 * scale)
      sign = 1.0;
    else if (slope > 1e-9 * scale)
      sign = -1.0;
  }
  if (sign != 0.0)
    out.direction = Vec2{sign * tangent.x, sign * tangent.y};
  return out;
}

namespace detail {

/// Local edge tangent (unit, sign-ambiguous) from Sobel derivatives.
inline Vec2 edge_tangent(const Image& gx, const Image& gy, int x, int y)
{
  return Vec2{-gy.at(x, y), gx.at(x, y)}.normalized();
}

}  // namespace detail

/// Detects straight edge segments by greedy edge-pixel chaining.
///
/// Pixels above the gradient threshold are walked along the local edge
/// tangent in both directions from each unvisited seed (row-major scan
/// order, so the result is deterministic). A chain grows while the next
/// edge pixel's tangent stays within `angle_tolerance` of the walk
/// direction and the chain stays within `max_deviation` of its incremental
/// total-least-squares line. Chains are reduced to segments by projecting
/// their extreme pixels onto the fitted line; segments shorter than
/// `min_length` are dropped.
inline std::vector<LineSegment> detect_segments(const Image& img, const SegmentParams& params = {})
{
  std::vector<LineSegment> result;
  if (img.width < 3 || img.height < 3)
    return result;
  Image gx, gy;
  sobel(img, gx, gy);
  const int w = img.width;
  const int h = img.height;

  std::vector<double> mag(static_cast<std::size_t>(w) * h, 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      mag[static_cast<std::size_t>(y) * w + x] = std::hypot(gx.at(x, y), gy.at(x, y));

  std::vector<bool> visited(static_cast<std::size_t>(w) * h, false);
  const double cos_tol = std::cos(params.angle_tolerance);

  // Offsets of the 8-neighborhood, scanned in a fixed order.
  static constexpr int kOff[8][2] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                     {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

  std::vector<Point2> chain;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      const std::size_t sidx = static_cast<std::size_t>(sy) * w + sx;
      if (visited[sidx] || mag[sidx] < params.grad_threshold)
        continue;
      const Vec2 seed_tan = detail::edge_tangent(gx, gy, sx, sy);
      if (seed_tan.norm() == 0.0) {
        visited[sidx] = true;
        continue;
      }

      chain.clear();
      chain.push_back({static_cast<double>(sx), static_cast<double>(sy)});
      visited[sidx] = true;

      // Walk forward, then backward from the seed.
      for (int pass = 0; pass < 2; ++pass) {
        Vec2 dir = pass == 0 ? seed_tan : Vec2{-seed_tan.x, -seed_tan.y};
        int cx = sx, cy = sy;
        // Incremental moments of the chain for the deviation check.
        while (true) {
          int best = -1;
          double best_mag = 0.0;
          Vec2 best_tan;
          for (int k = 0; k < 8; ++k) {
            const int nx = cx + kOff[k][0];
            const int ny = cy + kOff[k][1];
            if (nx < 0 || nx >= w || ny < 0 || ny >= h)
              continue;
            const std::size_t nidx = static_cast<std::size_t>(ny) * w + nx;
            if (visited[nidx] || mag[nidx] < params.grad_threshold)
              continue;
            // Forward arc only.
            const Vec2 step = Vec2{static_cast<double>(kOff[k][0]),
                                   static_cast<double>(kOff[k][1])}.normalized();
            if (step.dot(dir) < 0.5)
              continue;
            Vec2 tan = detail::edge_tangent(gx, gy, nx, ny);
            if (tan.norm() == 0.0)
              continue;
            if (tan.dot(dir) < 0.0)
              tan = {-tan.x, -tan.y};
            if (tan.dot(dir) < cos_tol)
              continue;
            if (mag[nidx] > best_mag) {
              best_mag = mag[nidx];
              best = k;
              best_tan = tan;
            }
          }
          if (best < 0)
            break;
          const int nx = cx + kOff[best][0];
          const int ny = cy + kOff[best][1];

          // Keep the chain straight: once it is long enough to define a
          // line, reject steps that leave the fitted carrier.
          if (chain.size() >= 8) {
            const HomLine fit = fit_line_lsq(chain);
            if (point_line_distance(Point2{static_cast<double>(nx), static_cast<double>(ny)},
                                    fit) > params.max_deviation)
              break;
          }
          visited[static_cast<std::size_t>(ny) * w + nx] = true;
          chain.push_back({static_cast<double>(nx), static_cast<double>(ny)});
          cx = nx;
          cy = ny;
          dir = Vec2{best_tan.x, best_tan.y};
        }
      }

      if (static_cast<double>(chain.size()) < params.min_length)
        continue;
      HomLine fit;
      try {
        fit = fit_line_lsq(chain);
      } catch (const std::invalid_argument&) {
        continue;
      }
      const Vec2 tangent = fit.tangent();
      double tmin = std::numeric_limits<double>::infinity();
      double tmax = -std::numeric_limits<double>::infinity();
      for (const Point2& p : chain) {
        const double t = p.x * tangent.x + p.y * tangent.y;
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
      }
      if (tmax - tmin < params.min_length)
        continue;
      // Project the extremes onto the carrier line.
      auto on_line = [&](double t) -> Point2 {
        const Vec2 n = fit.normal();
        const Point2 origin{-fit.c * n.x, -fit.c * n.y};
        return {origin.x + t * tangent.x, origin.y + t * tangent.y};
      };
      result.push_back({on_line(tmin), on_line(tmax)});
    }
  }
  return result;
}

/// Reads segments from a CSV of `x0,y0,x1,y1` rows (no header). Empty files
/// yield an empty list; malformed rows raise std::runtime_error naming the
/// file and line.
inline std::vector<LineSegment> load_segments(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(path + ": cannot open file");
  std::vector<LineSegment> segs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    double v[4];
    std::size_t start = 0;
    for (int i = 0; i < 4; ++i) {
      const std::size_t comma = line.find(',', start);
      const bool last = i == 3;
      if (last != (comma == std::string::npos))
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected 4 fields 'x0,y0,x1,y1'");
      const std::size_t end = last ? line.size() : comma;
      v[i] = detail::parse_number(path, line_no,
                                  std::string_view(line.data() + start, end - start));
      start = end + 1;
    }
    LineSegment s{{v[0], v[1]}, {v[2], v[3]}};
    if (s.length() <= 0.0)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": zero-length segment");
    segs.push_back(s);
  }
  return segs;
}

/// Writes segments as bare `x0,y0,x1,y1` CSV rows.
inline void save_segments(const std::vector<LineSegment>& segs, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  std::string line;
  for (const LineSegment& s : segs) {
    line.clear();
    detail::append_number(line, s.p0.x);
    line += ',';
    detail::append_number(line, s.p0.y);
    line += ',';
    detail::append_number(line, s.p1.x);
    line += ',';
    detail::append_number(line, s.p1.y);
    line += '\n';
    out << line;
  }
  if (!out)
    throw std::runtime_error(path + ": write failed");
}

/// Converts an explicit segment into an (undirected) pooled line anchored
/// at the segment midpoint. Throws for zero-length segments.
inline OrientedLine segment_to_line(const LineSegment& seg)
{
  OrientedLine out;
  out.line = line_through(seg.p0, seg.p1);
  out.anchor = {(seg.p0.x + seg.p1.x) / 2.0, (seg.p0.y + seg.p1.y) / 2.0};
  out.direction = std::nullopt;  // an intensity edge carries no VP direction
  out.source = LineSource::Explicit;
  out.weight = 0.0;
  return out;
}

/// The hypothesis pool consumed by the consensus stage: implicit
/// (recurrence-fitted) lines first, then explicit segment lines.
struct LinePool
{
  std::vector<OrientedLine> lines;
  int implicit_count = 0;
  int explicit_count = 0;
};

/// Assembles the line pool. At least two lines in total are required to
/// intersect anything; otherwise std::invalid_argument("insufficient lines
/// for VP") is thrown.
inline LinePool build_pool(const std::vector<OrientedLine>& implicit_lines,
                           const std::vector<LineSegment>& segments)
{
  LinePool pool;
  pool.lines = implicit_lines;
  pool.implicit_count = static_cast<int>(implicit_lines.size());
  for (const LineSegment& s : segments) {
    pool.lines.push_back(segment_to_line(s));
    ++pool.explicit_count;
  }
  if (pool.lines.size() < 2)
    throw std::invalid_argument("insufficient lines for VP");
  return pool;
}

}  // namespace vanishkit
