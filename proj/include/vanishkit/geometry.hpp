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

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace vanishkit {

constexpr double kPi = 3.1415926535897932384626433832795;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

struct Point2
{
  double x = 0.0;
  double y = 0.0;
};

struct Vec2
{
  double x = 0.0;
  double y = 0.0;

  double norm() const { return std::hypot(x, y); }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  Vec2 normalized() const
  {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
};

inline Vec2 operator-(const Point2& a, const Point2& b) { return {a.x - b.x, a.y - b.y}; }

/// Line in the plane, stored as homogeneous coefficients (a, b, c) with
/// a*x + b*y + c = 0. All lines produced by this library are kept in the
/// canonical form a^2 + b^2 = 1 with (a, b) lexicographically positive
/// (a > 0, or a == 0 and b > 0), so that equal lines have bit-equal
/// coefficients and point-line products are signed Euclidean distances.
struct HomLine
{
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;

  /// Unit normal.
  Vec2 normal() const { return {a, b}; }
  /// Unit tangent (normal rotated by +90 degrees).
  Vec2 tangent() const { return {-b, a}; }
  /// Signed distance from a point (a^2 + b^2 = 1 assumed).
  double eval(const Point2& p) const { return a * p.x + b * p.y + c; }
};

/// Normalizes raw homogeneous line coefficients into canonical form.
/// Throws std::invalid_argument if (a, b) is (numerically) the zero vector,
/// since such a triple does not describe a line in the affine plane.
inline HomLine make_line(double a, double b, double c)
{
  const double n = std::hypot(a, b);
  if (!(n > 1e-300) || !std::isfinite(n) || !std::isfinite(c))
    throw std::invalid_argument("make_line: coefficients do not describe a line");
  a /= n;
  b /= n;
  c /= n;
  if (a < 0.0 || (a == 0.0 && b < 0.0)) {
    a = -a;
    b = -b;
    c = -c;
  }
  if (a == 0.0)
    a = 0.0;  // normalize -0.0 for bit-stable canonical forms
  if (b == 0.0)
    b = 0.0;
  if (c == 0.0)
    c = 0.0;
  return HomLine{a, b, c};
}

/// Line through two distinct points. Throws if the points coincide.
inline HomLine line_through(const Point2& p, const Point2& q)
{
  const double a = q.y - p.y;
  const double b = p.x - q.x;
  if (std::abs(a) < 1e-300 && std::abs(b) < 1e-300)
    throw std::invalid_argument("line_through: points coincide");
  // Anchoring the offset at the midpoint keeps the construction symmetric
  // in its arguments, so reversed calls yield bit-identical canonical lines.
  const double mx = 0.5 * (p.x + q.x);
  const double my = 0.5 * (p.y + q.y);
  return make_line(a, b, -(a * mx + b * my));
}

/// Homogeneous vanishing point estimate (x, y, w). A finite point is
/// (x/w, y/w); w == 0 (exactly) encodes a point at infinity in direction
/// (x, y). Estimates are scale-normalized so the largest-magnitude component
/// is 1, with a sign convention (w >= 0; for ideal points the first nonzero
/// of (x, y) is positive) that makes equal estimates bit-comparable.
struct VPEstimate
{
  double x = 0.0;
  double y = 0.0;
  double w = 1.0;

  bool is_ideal() const { return w == 0.0; }

  /// Finite image location. Throws for ideal points.
  Point2 point() const
  {
    if (is_ideal())
      throw std::invalid_argument("VPEstimate::point: point at infinity");
    return {x / w, y / w};
  }
};

namespace detail {

/// Scale-normalizes a raw homogeneous triple and applies the sign convention.
/// |w| below 1e-12 relative to the spatial components is snapped to exact
/// zero: a finite point further than ~1e12 image units away is ideal for
/// every practical purpose, and the snap gives downstream code a crisp
/// is_ideal() predicate instead of a fuzzy threshold.
inline VPEstimate normalize_vp(double x, double y, double w)
{
  const double m = std::max({std::abs(x), std::abs(y), std::abs(w)});
  if (!(m > 0.0) || !std::isfinite(m))
    throw std::invalid_argument("normalize_vp: zero or non-finite homogeneous triple");
  x /= m;
  y /= m;
  w /= m;
  if (std::abs(w) < 1e-12 * std::max(std::abs(x), std::abs(y)))
    w = 0.0;
  const bool flip = w < 0.0 || (w == 0.0 && (x < 0.0 || (x == 0.0 && y < 0.0)));
  if (flip) {
    x = -x;
    y = -y;
    w = -w;
  }
  if (x == 0.0)
    x = 0.0;
  if (y == 0.0)
    y = 0.0;
  if (w == 0.0)
    w = 0.0;
  return VPEstimate{x, y, w};
}

}  // namespace detail

/// Finite vanishing point at an image location.
inline VPEstimate make_vp(const Point2& p) { return detail::normalize_vp(p.x, p.y, 1.0); }

/// Vanishing point from an explicit homogeneous triple (w == 0 yields an
/// ideal point). Canonicalized like every other estimate.
inline VPEstimate make_vp(double x, double y, double w)
{
  return detail::normalize_vp(x, y, w);
}

/// Intersection of two lines as a homogeneous point (cross product of the
/// coefficient triples). Parallel distinct lines yield an ideal point
/// (w == 0) rather than an error; coincident lines have no unique
/// intersection and throw std::invalid_argument.
inline VPEstimate intersect(const HomLine& l1, const HomLine& l2)
{
  const double x = l1.b * l2.c - l1.c * l2.b;
  const double y = l1.c * l2.a - l1.a * l2.c;
  const double w = l1.a * l2.b - l1.b * l2.a;
  const double m = std::max({std::abs(x), std::abs(y), std::abs(w)});
  // Canonical unit-normal forms: the cross product of coincident lines is a
  // true numerical zero, not merely small relative to the inputs.
  if (m < 1e-12)
    throw std::invalid_argument("intersect: coincident lines");
  return detail::normalize_vp(x, y, w);
}

/// Acute angle between two lines in [0, pi/2], computed from the tangents
/// via atan2(|cross|, |dot|) for full numerical stability near 0 and pi/2.
inline double acute_angle(const HomLine& l1, const HomLine& l2)
{
  const Vec2 d1 = l1.tangent();
  const Vec2 d2 = l2.tangent();
  return std::atan2(std::abs(d1.cross(d2)), std::abs(d1.dot(d2)));
}

/// Euclidean point-line distance (canonical form assumed).
inline double point_line_distance(const Point2& p, const HomLine& l)
{
  return std::abs(l.eval(p));
}

/// Distance from a finite vanishing point estimate to a line. Ideal
/// estimates have no Euclidean distance; callers must handle them via the
/// angular comparison instead.
inline double point_line_distance(const VPEstimate& vp, const HomLine& l)
{
  if (vp.is_ideal())
    throw std::invalid_argument("point_line_distance: undefined for ideal point");
  return point_line_distance(vp.point(), l);
}

namespace detail {

/// Unit 3D viewing ray of a vanishing point under a pinhole with focal
/// length f and principal point (cx, cy). Ideal points map to a direction
/// with zero third component.
inline Eigen::Vector3d vp_ray(const VPEstimate& vp, double f, double cx, double cy)
{
  Eigen::Vector3d d;
  if (vp.is_ideal())
    d = Eigen::Vector3d(vp.x, vp.y, 0.0);
  else {
    const Point2 p = vp.point();
    d = Eigen::Vector3d(p.x - cx, p.y - cy, f);
  }
  d.normalize();
  return d;
}

}  // namespace detail

/// Angular error in degrees between two vanishing points, measured between
/// their viewing rays (vp - center, f) under a pinhole camera centered on
/// the image. When no focal length is supplied, the conventional surrogate
/// f = (W + H) / 4 is used. Result is in [0, 180].
inline double angular_error(const VPEstimate& detected,
                            const VPEstimate& truth,
                            double image_width,
                            double image_height,
                            std::optional<double> focal = std::nullopt)
{
  if (!(image_width > 0.0) || !(image_height > 0.0))
    throw std::invalid_argument("angular_error: invalid image size");
  const double f = (focal && *focal > 0.0) ? *focal : (image_width + image_height) / 4.0;
  const double cx = image_width / 2.0;
  const double cy = image_height / 2.0;
  const Eigen::Vector3d u = detail::vp_ray(detected, f, cx, cy);
  const Eigen::Vector3d v = detail::vp_ray(truth, f, cx, cy);
  const double ang = std::atan2(u.cross(v).norm(), u.dot(v));
  return rad2deg(ang);
}

/// Scale-free discrepancy between two homogeneous estimates: Euclidean
/// distance relative to magnitude for two finite points, chord distance
/// between folded unit directions for two ideal points, and +infinity for a
/// finite/ideal mismatch.
inline double homogeneous_discrepancy(const VPEstimate& a, const VPEstimate& b)
{
  if (a.is_ideal() != b.is_ideal())
    return std::numeric_limits<double>::infinity();
  if (a.is_ideal()) {
    Vec2 da = Vec2{a.x, a.y}.normalized();
    Vec2 db = Vec2{b.x, b.y}.normalized();
    if (da.dot(db) < 0.0)
      db = {-db.x, -db.y};
    return std::hypot(da.x - db.x, da.y - db.y);
  }
  const Point2 pa = a.point();
  const Point2 pb = b.point();
  const double scale = std::max({1.0, std::hypot(pa.x, pa.y), std::hypot(pb.x, pb.y)});
  return std::hypot(pa.x - pb.x, pa.y - pb.y) / scale;
}

/// Total least squares (orthogonal regression) line fit, optionally
/// weighted. The fitted direction is the principal eigenvector of the
/// weighted 2x2 covariance of the points; the line passes through the
/// weighted centroid. Throws std::invalid_argument for fewer than two
/// points, an all-identical point set, negative weights, or an all-zero
/// weight vector.
inline HomLine fit_line_lsq(std::span<const Point2> points,
                            std::span<const double> weights = {})
{
  if (points.size() < 2)
    throw std::invalid_argument("fit_line_lsq: need at least 2 points");
  if (!weights.empty() && weights.size() != points.size())
    throw std::invalid_argument("fit_line_lsq: weight count mismatch");

  double wsum = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w < 0.0)
      throw std::invalid_argument("fit_line_lsq: negative weight");
    wsum += w;
    mx += w * points[i].x;
    my += w * points[i].y;
  }
  if (!(wsum > 0.0))
    throw std::invalid_argument("fit_line_lsq: weights sum to zero");
  mx /= wsum;
  my /= wsum;

  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    const double dx = points[i].x - mx;
    const double dy = points[i].y - my;
    sxx += w * dx * dx;
    sxy += w * dx * dy;
    syy += w * dy * dy;
  }
  if (!((sxx + syy) > 1e-30))
    throw std::invalid_argument("fit_line_lsq: degenerate point set");

  Eigen::Matrix2d cov;
  cov << sxx, sxy, sxy, syy;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
  // Eigenvalues ascending; column 1 is the principal (line) direction.
  const Eigen::Vector2d dir = es.eigenvectors().col(1);
  const double a = -dir.y();
  const double b = dir.x();
  return make_line(a, b, -(a * mx + b * my));
}

/// Provenance of a pooled line hypothesis.
enum class LineSource
{
  Implicit,  ///< fitted through a recurring-feature subset
  Explicit   ///< detected as an intensity edge segment
};

/// A pooled line with optional orientation toward the vanishing point.
/// `direction`, when present, is a unit vector parallel to the line that
/// points from larger recurring instances toward smaller ones (i.e. away
/// from the camera); segments and direction-ambiguous fits leave it unset.
struct OrientedLine
{
  HomLine line;
  Point2 anchor;                  ///< reference point on the line
  std::optional<Vec2> direction;  ///< unit tangent toward the VP, if known
  LineSource source = LineSource::Implicit;
  double weight = 0.0;            ///< consensus weight (managed by RANSAC)
};

/// Whether a vanishing point estimate lies on (or at) the side of the
/// anchor that a directed line points toward. Undirected lines are
/// compatible with both sides and return true.
inline bool vp_on_positive_side(const OrientedLine& l, const VPEstimate& vp)
{
  if (!l.direction)
    return true;
  if (vp.is_ideal())
    return l.direction->dot(Vec2{vp.x, vp.y}) >= 0.0;
  const Vec2 to_vp = vp.point() - l.anchor;
  return l.direction->dot(to_vp) >= 0.0;
}

}  // namespace vanishkit
