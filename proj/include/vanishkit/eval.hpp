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
#include <vanishkit/random.hpp>
#include <vanishkit/stats.hpp>
#include <vanishkit/synthgen.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vanishkit {

/// Angular error assigned to a record when the detector produced nothing.
/// 180 degrees is the metric's maximum, so failures land at the far end of
/// every cumulative curve and never silently improve a summary statistic.
constexpr double kFailureErrorDeg = 180.0;

/// One evaluated image: the detector's angular error (absent on detection
/// failure) and its runtime.
struct EvalRecord
{
  std::string image_id;
  std::optional<double> error_deg;
  double runtime_ms = 0.0;
};

/// Cumulative success curve: success_rate[i] is the fraction of ALL records
/// (failures included in the denominator) with error <= thresholds[i].
struct CurveData
{
  std::vector<double> thresholds;
  std::vector<double> success_rate;
};

/// Standard evaluation grid: 0 to 10 degrees in 0.1-degree steps.
inline std::vector<double> default_grid()
{
  std::vector<double> g;
  g.reserve(101);
  for (int i = 0; i <= 100; ++i)
    g.push_back(static_cast<double>(i) / 10.0);
  return g;
}

/// Builds the cumulative success curve of a record set over a threshold
/// grid. The grid must be nonempty and strictly increasing; the record set
/// must be nonempty.
inline CurveData curve(const std::vector<EvalRecord>& records, const std::vector<double>& grid)
{
  if (records.empty())
    throw std::invalid_argument("curve: empty record set");
  if (grid.empty())
    throw std::invalid_argument("curve: empty threshold grid");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("curve: thresholds must be strictly increasing");

  CurveData c;
  c.thresholds = grid;
  c.success_rate.resize(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    int hits = 0;
    for (const EvalRecord& r : records)
      if (r.error_deg && *r.error_deg <= grid[i])
        ++hits;
    c.success_rate[i] = static_cast<double>(hits) / static_cast<double>(records.size());
  }
  return c;
}

/// Area under the success curve up to theta_max, by trapezoidal rule, with
/// the curve extended as constant from 0 to the first threshold. A perfect
/// curve (success 1 everywhere) yields exactly theta_max. theta_max must lie
/// within the curve's threshold range.
inline double auc_at(const CurveData& c, double theta_max)
{
  if (c.thresholds.empty() || c.thresholds.size() != c.success_rate.size())
    throw std::invalid_argument("auc_at: malformed curve");
  if (!(theta_max > 0.0) || theta_max > c.thresholds.back() + 1e-9)
    throw std::invalid_argument("auc_at: theta_max outside the threshold grid");

  double area = 0.0;
  // Constant extension on [0, t0].
  const double t0 = std::min(c.thresholds.front(), theta_max);
  if (t0 > 0.0)
    area += t0 * c.success_rate.front();
  for (std::size_t i = 1; i < c.thresholds.size(); ++i) {
    const double a = c.thresholds[i - 1];
    const double b = c.thresholds[i];
    if (a >= theta_max)
      break;
    const double hi = std::min(b, theta_max);
    // Linear interpolation inside a partially covered cell.
    const double frac = (hi - a) / (b - a);
    const double ya = c.success_rate[i - 1];
    const double yb = ya + frac * (c.success_rate[i] - ya);
    area += 0.5 * (ya + yb) * (hi - a);
  }
  return area;
}

/// Median angular error with failures counted at kFailureErrorDeg.
inline double median_error(const std::vector<EvalRecord>& records)
{
  if (records.empty())
    throw std::invalid_argument("median_error: empty record set");
  std::vector<double> errs;
  errs.reserve(records.size());
  for (const EvalRecord& r : records)
    errs.push_back(r.error_deg ? *r.error_deg : kFailureErrorDeg);
  return median(errs);
}

namespace detail {

/// Exact two-sided Wilcoxon signed-rank p-value by dynamic programming over
/// the doubled (integer) midranks: under the null each |difference| gets a
/// random sign, so the distribution of the doubled positive-rank sum is the
/// convolution of fair {0, 2r_i} coins.
inline double wilcoxon_exact_p(const std::vector<int>& doubled_ranks, long long doubled_w_plus)
{
  long long total = 0;
  for (int r : doubled_ranks)
    total += r;
  std::vector<double> dist(static_cast<std::size_t>(total) + 1, 0.0);
  dist[0] = 1.0;
  long long reach = 0;
  for (int r : doubled_ranks) {
    reach += r;
    for (long long s = reach; s >= r; --s)
      dist[static_cast<std::size_t>(s)] += dist[static_cast<std::size_t>(s - r)];
  }
  const double denom = std::pow(2.0, static_cast<double>(doubled_ranks.size()));
  double lo = 0.0, hi = 0.0;
  for (long long s = 0; s <= total; ++s) {
    if (s <= doubled_w_plus)
      lo += dist[static_cast<std::size_t>(s)];
    if (s >= doubled_w_plus)
      hi += dist[static_cast<std::size_t>(s)];
  }
  return std::min(1.0, 2.0 * std::min(lo, hi) / denom);
}

}  // namespace detail

/// Paired two-sided Wilcoxon signed-rank test over matched error records.
///
/// Records are paired by image_id (both sets must contain exactly the same
/// ids); failures enter at kFailureErrorDeg. Zero differences are dropped
/// per standard practice — identical inputs therefore return p = 1. Ties
/// among |differences| get midranks. Up to 25 effective pairs the exact
/// permutation distribution is used; beyond that, the normal approximation
/// with tie correction and continuity correction. Throws on unpaired record
/// sets or fewer than 6 pairs overall (too few for any significance).
inline double significance(const std::vector<EvalRecord>& a, const std::vector<EvalRecord>& b)
{
  if (a.size() != b.size())
    throw std::invalid_argument("significance: record sets differ in size");
  if (a.size() < 6)
    throw std::invalid_argument("significance: need at least 6 paired records");
  std::map<std::string, double> ea, eb;
  for (const EvalRecord& r : a)
    ea[r.image_id] = r.error_deg ? *r.error_deg : kFailureErrorDeg;
  for (const EvalRecord& r : b)
    eb[r.image_id] = r.error_deg ? *r.error_deg : kFailureErrorDeg;
  if (ea.size() != a.size() || eb.size() != b.size())
    throw std::invalid_argument("significance: duplicate image ids");

  std::vector<double> diffs;
  for (const auto& [id, err] : ea) {
    const auto it = eb.find(id);
    if (it == eb.end())
      throw std::invalid_argument("significance: record sets are not paired");
    const double d = err - it->second;
    if (d != 0.0)
      diffs.push_back(d);
  }
  if (diffs.empty())
    return 1.0;  // the two sets are identical

  // Midranks of |d|, doubled so ties produce integers.
  const std::size_t n = diffs.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i)
    order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(diffs[i]) < std::abs(diffs[j]);
  });
  std::vector<int> doubled_rank(n, 0);
  std::vector<std::size_t> tie_sizes;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(diffs[order[j]]) == std::abs(diffs[order[i]]))
      ++j;
    // Midrank of positions i+1 .. j (1-based), doubled: (i+1 + j).
    const int doubled = static_cast<int>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      doubled_rank[order[k]] = doubled;
    tie_sizes.push_back(j - i);
    i = j;
  }

  long long doubled_w_plus = 0;
  std::vector<int> all_doubled;
  all_doubled.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    all_doubled.push_back(doubled_rank[i]);
    if (diffs[i] > 0.0)
      doubled_w_plus += doubled_rank[i];
  }

  if (n <= 25)
    return detail::wilcoxon_exact_p(all_doubled, doubled_w_plus);

  // Normal approximation with tie and continuity corrections.
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  for (std::size_t t : tie_sizes) {
    const double td = static_cast<double>(t);
    tie_term += td * td * td - td;
  }
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0))
    return 1.0;
  const double w_plus = static_cast<double>(doubled_w_plus) / 2.0;
  const double z = (std::abs(w_plus - mean) - 0.5) / std::sqrt(var);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

/// One cell of the stress grid: detection quality at a noise level and an
/// acceptance threshold, aggregated over instances and scales.
struct StressCell
{
  double sigma = 0.0;
  double threshold_deg = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// A detector under stress evaluation: takes a (possibly perturbed)
/// instance, returns its estimate or nothing on failure.
using Detector = std::function<std::optional<VPEstimate>(const SyntheticInstance&)>;

/// Robustness stress grid.
///
/// For every instance, noise level sigma, and global scale factor, feature
/// positions are perturbed with i.i.d. Gaussian noise (fresh derived RNG
/// stream per instance/sigma pair, so cells are independent yet
/// reproducible), then positions, sizes, image dimensions, focal length,
/// and ground truth are scaled. The detector runs once per perturbed
/// instance; a detection within threshold_deg of the ground truth counts as
/// correct. Precision is correct/detected, recall is correct/total, and
/// f1 their harmonic mean (zero when undefined). Cells are ordered by
/// (sigma, threshold) following the input order.
inline std::vector<StressCell> stress_test(const Detector& detector,
                                           const std::vector<SyntheticInstance>& instances,
                                           const std::vector<double>& sigmas,
                                           const std::vector<double>& scales,
                                           const std::vector<double>& thresholds_deg,
                                           std::uint64_t seed)
{
  if (instances.empty())
    throw std::invalid_argument("stress_test: no instances");
  if (sigmas.empty() || scales.empty() || thresholds_deg.empty())
    throw std::invalid_argument("stress_test: empty parameter grid");
  for (double s : scales)
    if (!(s > 0.0))
      throw std::invalid_argument("stress_test: scales must be positive");

  std::vector<StressCell> cells;
  for (std::size_t si = 0; si < sigmas.size(); ++si) {
    const double sigma = sigmas[si];
    // success[t], detected, total aggregated over instances x scales.
    std::vector<int> correct(thresholds_deg.size(), 0);
    int detected = 0;
    int total = 0;

    for (std::size_t ii = 0; ii < instances.size(); ++ii) {
      Rng rng = Rng::derived(seed, si * instances.size() + ii);
      SyntheticInstance noisy = instances[ii];
      for (Feature& f : noisy.features) {
        // Unconditional draws keep streams aligned across sigma values.
        const double nx = rng.normal();
        const double ny = rng.normal();
        f.x += sigma * nx;
        f.y += sigma * ny;
      }

      for (double scale : scales) {
        SyntheticInstance scaled = noisy;
        for (Feature& f : scaled.features) {
          f.x *= scale;
          f.y *= scale;
          f.size *= scale;
        }
        scaled.camera.width = static_cast<int>(std::lround(scaled.camera.width * scale));
        scaled.camera.height = static_cast<int>(std::lround(scaled.camera.height * scale));
        scaled.camera.f *= scale;
        const Point2 gt = scaled.gt_vp.point();
        scaled.gt_vp = make_vp({gt.x * scale, gt.y * scale});

        ++total;
        const std::optional<VPEstimate> det = detector(scaled);
        if (!det)
          continue;
        ++detected;
        const double err =
            angular_error(*det, scaled.gt_vp, scaled.camera.width, scaled.camera.height);
        for (std::size_t t = 0; t < thresholds_deg.size(); ++t)
          if (err <= thresholds_deg[t])
            ++correct[t];
      }
    }

    for (std::size_t t = 0; t < thresholds_deg.size(); ++t) {
      StressCell cell;
      cell.sigma = sigma;
      cell.threshold_deg = thresholds_deg[t];
      cell.precision = detected > 0 ? static_cast<double>(correct[t]) / detected : 0.0;
      cell.recall = total > 0 ? static_cast<double>(correct[t]) / total : 0.0;
      cell.f1 = (cell.precision + cell.recall) > 0.0
                    ? 2.0 * cell.precision * cell.recall / (cell.precision + cell.recall)
                    : 0.0;
      cells.push_back(cell);
    }
  }
  return cells;
}

/// Writes a curve as `threshold_deg,success_rate` CSV (with header).
inline void write_curve_csv(const CurveData& c, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  out << "threshold_deg,success_rate\n";
  std::string line;
  for (std::size_t i = 0; i < c.thresholds.size(); ++i) {
    line.clear();
    detail::append_number(line, c.thresholds[i]);
    line += ',';
    detail::append_number(line, c.success_rate[i]);
    line += '\n';
    out << line;
  }
  if (!out)
    throw std::runtime_error(path + ": write failed");
}

/// Writes stress cells as `sigma,threshold_deg,precision,recall,f1` CSV.
inline void write_stress_csv(const std::vector<StressCell>& cells, const std::string& path)
{
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  out << "sigma,threshold_deg,precision,recall,f1\n";
  std::string line;
  for (const StressCell& c : cells) {
    line.clear();
    detail::append_number(line, c.sigma);
    line += ',';
    detail::append_number(line, c.threshold_deg);
    line += ',';
    detail::append_number(line, c.precision);
    line += ',';
    detail::append_number(line, c.recall);
    line += ',';
    detail::append_number(line, c.f1);
    line += '\n';
    out << line;
  }
  if (!out)
    throw std::runtime_error(path + ": write failed");
}

/// A named curve for plotting.
struct NamedCurve
{
  std::string name;
  CurveData curve;
};

/// Renders success curves as a self-contained SVG line plot (no external
/// dependencies; suitable for reports).
inline void write_curve_svg(const std::vector<NamedCurve>& curves, const std::string& path)
{
  if (curves.empty())
    throw std::invalid_argument("write_curve_svg: no curves");
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
  const int w = 640, h = 420;
  const int ml = 60, mr = 20, mt = 30, mb = 50;
  const double pw = w - ml - mr, ph = h - mt - mb;
  double tmax = 0.0;
  for (const auto& nc : curves)
    for (double t : nc.curve.thresholds)
      tmax = std::max(tmax, t);
  if (!(tmax > 0.0))
    tmax = 1.0;

  auto px = [&](double t) { return ml + t / tmax * pw; };
  auto py = [&](double s) { return mt + (1.0 - s) * ph; };

  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error(path + ": cannot open file for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
      << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // Axes and grid.
  for (int i = 0; i <= 5; ++i) {
    const double s = i / 5.0;
    out << "<line x1=\"" << ml << "\" y1=\"" << py(s) << "\" x2=\"" << w - mr << "\" y2=\""
        << py(s) << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << ml - 8 << "\" y=\"" << py(s) + 4
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"#333333\">" << s << "</text>\n";
  }
  for (int i = 0; i <= 5; ++i) {
    const double t = tmax * i / 5.0;
    out << "<line x1=\"" << px(t) << "\" y1=\"" << mt << "\" x2=\"" << px(t) << "\" y2=\""
        << h - mb << "\" stroke=\"#dddddd\"/>\n"
        << "<text x=\"" << px(t) << "\" y=\"" << h - mb + 18
        << "\" font-size=\"12\" text-anchor=\"middle\" fill=\"#333333\">" << t << "</text>\n";
  }
  out << "<text x=\"" << ml + pw / 2 << "\" y=\"" << h - 12
      << "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111111\">threshold (degrees)"
      << "</text>\n"
      << "<text x=\"16\" y=\"" << mt + ph / 2
      << "\" font-size=\"13\" text-anchor=\"middle\" fill=\"#111111\" transform=\"rotate(-90 16 "
      << mt + ph / 2 << ")\">success rate</text>\n";

  for (std::size_t ci = 0; ci < curves.size(); ++ci) {
    const CurveData& c = curves[ci].curve;
    out << "<polyline fill=\"none\" stroke=\"" << kColors[ci % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < c.thresholds.size(); ++i)
      out << px(c.thresholds[i]) << "," << py(c.success_rate[i]) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 + 16 * static_cast<double>(ci)
        << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << kColors[ci % 8] << "\">"
        << curves[ci].name << "</text>\n";
  }
  out << "</svg>\n";
  if (!out)
    throw std::runtime_error(path + ": write failed");
}

}  // namespace vanishkit
