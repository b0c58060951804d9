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

// vanishkit command-line interface: detection, synthetic data generation,
// evaluation, comparison, stress testing, and benchmarking.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <vanishkit/vanishkit.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace vanishkit;

namespace {

// ---------------------------------------------------------------------------
// Shared helpers

/// Seed precedence: --seed flag, then VANISHKIT_SEED, then the config file.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag_seed,
                           std::uint64_t config_seed)
{
  if (flag_seed)
    return *flag_seed;
  if (const char* env = std::getenv("VANISHKIT_SEED")) {
    std::uint64_t v = 0;
    std::size_t pos = 0;
    const std::string s(env);
    try {
      v = std::stoull(s, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != s.size() || s.empty())
      throw CLI::ValidationError("VANISHKIT_SEED", "invalid seed '" + s + "'");
    return v;
  }
  return config_seed;
}

PipelineConfig load_pipeline_config(const std::string& config_path,
                                    const std::optional<std::uint64_t>& flag_seed)
{
  PipelineConfig cfg;
  if (!config_path.empty())
    cfg = parse_config(config_path);
  cfg.seed = resolve_seed(flag_seed, cfg.seed);
  return cfg;
}

std::vector<double> parse_double_list(const std::string& csv, const std::string& flag)
{
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(tok, &pos);
      if (pos != tok.size())
        throw std::invalid_argument(tok);
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::runtime_error(flag + ": invalid number '" + tok + "'");
    }
  }
  if (out.empty())
    throw std::runtime_error(flag + ": empty list");
  return out;
}

// ---------------------------------------------------------------------------
// Detection inputs

struct WorkItem
{
  enum class Kind
  {
    ImageFile,    ///< PNG/JPEG on disk
    InstanceDir,  ///< directory with features.csv (synthetic instance layout)
    FeaturesCsv,  ///< bare features file
  };
  Kind kind;
  std::string id;
  fs::path path;
};

bool is_image_file(const fs::path& p)
{
  const std::string ext = p.extension().string();
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".PNG" ||
         ext == ".JPG" || ext == ".JPEG";
}

/// Expands a detect input into work items: a single image/features file, an
/// instance directory, or a dataset directory of either. Items are sorted
/// by id so processing order (and output order) is deterministic.
std::vector<WorkItem> collect_inputs(const fs::path& input)
{
  std::vector<WorkItem> items;
  if (fs::is_directory(input)) {
    if (fs::exists(input / "features.csv")) {
      items.push_back({WorkItem::Kind::InstanceDir, input.filename().string(), input});
      return items;
    }
    for (const auto& entry : fs::directory_iterator(input)) {
      const fs::path p = entry.path();
      if (entry.is_directory() && fs::exists(p / "features.csv"))
        items.push_back({WorkItem::Kind::InstanceDir, p.filename().string(), p});
      else if (entry.is_regular_file() && is_image_file(p))
        items.push_back({WorkItem::Kind::ImageFile, p.stem().string(), p});
    }
    if (items.empty())
      throw std::runtime_error(input.string() + ": no images or instance directories found");
    std::sort(items.begin(), items.end(),
              [](const WorkItem& a, const WorkItem& b) { return a.id < b.id; });
    return items;
  }
  if (!fs::exists(input))
    throw std::runtime_error(input.string() + ": no such file or directory");
  if (input.extension() == ".csv")
    items.push_back({WorkItem::Kind::FeaturesCsv, input.stem().string(), input});
  else
    items.push_back({WorkItem::Kind::ImageFile, input.stem().string(), input});
  return items;
}

struct DetectFlags
{
  std::string features_file;  ///< overrides extraction for image inputs
  std::string segments_file;  ///< overrides the config's explicit source
  int width = 640;            ///< fallback dimensions for bare features files
  int height = 480;
};

DetectionOutput detect_one(const WorkItem& item, const PipelineConfig& cfg,
                           const DetectFlags& flags)
{
  PipelineConfig local = cfg;
  if (!flags.segments_file.empty()) {
    local.explicit_source = ExplicitSource::File;
    local.segments_file = flags.segments_file;
  }

  switch (item.kind) {
    case WorkItem::Kind::ImageFile: {
      const Image img = load_image(item.path.string());
      if (!flags.features_file.empty()) {
        const std::vector<Feature> feats = load_features(flags.features_file);
        std::vector<LineSegment> segments;
        if (local.explicit_source == ExplicitSource::Builtin)
          segments = detect_segments(img, local.segments);
        else if (local.explicit_source == ExplicitSource::File)
          segments = load_segments(local.segments_file);
        return detect_pipeline(feats, img.width, img.height, segments, local, item.id);
      }
      return detect_pipeline(img, local, item.id);
    }
    case WorkItem::Kind::InstanceDir: {
      const SyntheticInstance inst = load_instance(item.path.string());
      std::vector<LineSegment> segments;
      if (local.explicit_source == ExplicitSource::File) {
        segments = load_segments(local.segments_file);
      } else if (local.explicit_source == ExplicitSource::Builtin &&
                 fs::exists(item.path / "image.png")) {
        const Image img = load_image((item.path / "image.png").string());
        segments = detect_segments(img, local.segments);
      }
      return detect_pipeline(inst.features, inst.camera.width, inst.camera.height,
                             segments, local, item.id);
    }
    case WorkItem::Kind::FeaturesCsv: {
      const std::vector<Feature> feats = load_features(item.path.string());
      std::vector<LineSegment> segments;
      if (local.explicit_source == ExplicitSource::File)
        segments = load_segments(local.segments_file);
      return detect_pipeline(feats, flags.width, flags.height, segments, local, item.id);
    }
  }
  throw std::logic_error("unreachable");
}

std::string format_predictions(const std::vector<DetectionOutput>& outs)
{
  std::string text = "imageId,x,y\n";
  for (const DetectionOutput& o : outs) {
    text += o.image_id;
    if (o.vp) {
      text += ',';
      detail::append_number(text, o.vp->x);
      text += ',';
      detail::append_number(text, o.vp->y);
    } else {
      text += ",none,none";
    }
    text += '\n';
  }
  return text;
}

int cmd_detect(const std::string& input, const std::string& config_path,
               const std::optional<std::uint64_t>& seed, const DetectFlags& flags,
               const std::string& out_path, int jobs)
{
  const PipelineConfig cfg = load_pipeline_config(config_path, seed);
  const std::vector<WorkItem> items = collect_inputs(input);

  std::vector<DetectionOutput> outs(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(items.size())));
  if (n_threads == 1) {
    for (std::size_t i = 0; i < items.size(); ++i)
      outs[i] = detect_one(items[i], cfg, flags);
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
        try {
          outs[i] = detect_one(items[i], cfg, flags);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      threads.emplace_back(worker);
    for (std::thread& t : threads)
      t.join();
    for (const std::exception_ptr& e : errors)
      if (e)
        std::rethrow_exception(e);
  }

  const std::string text = format_predictions(outs);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out)
      throw std::runtime_error(out_path + ": cannot open file for writing");
    out << text;
    if (!out)
      throw std::runtime_error(out_path + ": write failed");
  } else {
    std::cout << text;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Synthetic data generation

int cmd_synth(int scenes, std::uint64_t seed, double noise, const std::string& out_dir,
              bool render)
{
  if (scenes <= 0)
    throw std::runtime_error("--scenes must be positive");
  NoiseParams np;
  np.pos_sigma = noise;
  for (int k = 0; k < scenes; ++k) {
    Rng rng = Rng::derived(seed, 2 * static_cast<std::uint64_t>(k));
    const auto [scene, cam] = random_scene(rng);
    const std::uint64_t inst_seed = seed + 1000003ULL * static_cast<std::uint64_t>(k + 1);
    const SyntheticInstance inst = generate_instance(scene, cam, np, inst_seed);
    char name[32];
    std::snprintf(name, sizeof name, "instance_%05d", k);
    save_instance((fs::path(out_dir) / name).string(), inst, render);
  }
  std::cout << "wrote " << scenes << " instances to " << out_dir << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// Evaluation

struct Prediction
{
  std::string id;
  std::optional<Point2> vp;
};

std::vector<Prediction> read_predictions(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::runtime_error(path + ": cannot open file");
  std::vector<Prediction> preds;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    if (line_no == 1 && line.rfind("imageId", 0) == 0)
      continue;  // header
    const std::size_t c1 = line.find(',');
    const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'imageId,x,y'");
    Prediction p;
    p.id = line.substr(0, c1);
    const std::string xs = line.substr(c1 + 1, c2 - c1 - 1);
    const std::string ys = line.substr(c2 + 1);
    if (xs == "none" || ys == "none") {
      p.vp = std::nullopt;
    } else {
      const double x = detail::parse_number(path, line_no, xs);
      const double y = detail::parse_number(path, line_no, ys);
      p.vp = Point2{x, y};
    }
    if (p.id.empty())
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": empty image id");
    preds.push_back(std::move(p));
  }
  if (preds.empty())
    throw std::runtime_error(path + ": no predictions");
  return preds;
}

struct GroundTruth
{
  Point2 vp;
  int width = 640;
  int height = 480;
};

/// Looks up ground truth for an image id under the gt directory: either the
/// synthetic-instance layout `<dir>/<id>/gt.txt` (with dimensions from
/// camera.json) or a flat `<dir>/<id>.txt` (with fallback dimensions).
GroundTruth load_gt(const fs::path& gt_dir, const std::string& id, int fallback_w,
                    int fallback_h)
{
  GroundTruth gt;
  gt.width = fallback_w;
  gt.height = fallback_h;
  fs::path gt_file = gt_dir / id / "gt.txt";
  if (fs::exists(gt_file)) {
    const fs::path cam_file = gt_dir / id / "camera.json";
    if (fs::exists(cam_file)) {
      const SyntheticInstance inst = load_instance((gt_dir / id).string());
      gt.vp = inst.gt_vp.point();
      gt.width = inst.camera.width;
      gt.height = inst.camera.height;
      return gt;
    }
  } else {
    gt_file = gt_dir / (id + ".txt");
  }
  std::ifstream in(gt_file, std::ios::binary);
  if (!in)
    throw std::runtime_error(gt_file.string() + ": no ground truth for image '" + id + "'");
  double x = 0.0, y = 0.0;
  if (!(in >> x >> y))
    throw std::runtime_error(gt_file.string() + ": expected 'x y'");
  gt.vp = {x, y};
  return gt;
}

std::vector<EvalRecord> evaluate_predictions(const std::vector<Prediction>& preds,
                                             const fs::path& gt_dir, int fallback_w,
                                             int fallback_h)
{
  std::vector<EvalRecord> records;
  records.reserve(preds.size());
  for (const Prediction& p : preds) {
    const GroundTruth gt = load_gt(gt_dir, p.id, fallback_w, fallback_h);
    EvalRecord r;
    r.image_id = p.id;
    if (p.vp)
      r.error_deg =
          angular_error(make_vp(*p.vp), make_vp(gt.vp), gt.width, gt.height);
    records.push_back(std::move(r));
  }
  // Summary statistics must not depend on prediction-file row order.
  std::sort(records.begin(), records.end(),
            [](const EvalRecord& a, const EvalRecord& b) { return a.image_id < b.image_id; });
  return records;
}

std::string format_summary(const std::string& label, const std::vector<EvalRecord>& records)
{
  const CurveData c = curve(records, default_grid());
  int detected = 0;
  for (const EvalRecord& r : records)
    if (r.error_deg)
      ++detected;
  std::string text;
  const auto put = [&](const std::string& key, double v) {
    text += label.empty() ? key : label + "." + key;
    text += " = ";
    detail::append_number(text, v);
    text += '\n';
  };
  text += (label.empty() ? std::string("images") : label + ".images") + " = " +
          std::to_string(records.size()) + '\n';
  text += (label.empty() ? std::string("detected") : label + ".detected") + " = " +
          std::to_string(detected) + '\n';
  put("median_error_deg", median_error(records));
  put("auc_2deg", auc_at(c, 2.0));
  put("auc_5deg", auc_at(c, 5.0));
  put("auc_10deg", auc_at(c, 10.0));
  return text;
}

int cmd_eval(const std::string& pred_path, const std::string& gt_dir,
             const std::string& curve_path, const std::string& plot_path, int width,
             int height)
{
  const std::vector<Prediction> preds = read_predictions(pred_path);
  const std::vector<EvalRecord> records = evaluate_predictions(preds, gt_dir, width, height);
  std::cout << format_summary("", records);
  if (!curve_path.empty())
    write_curve_csv(curve(records, default_grid()), curve_path);
  if (!plot_path.empty())
    write_curve_svg({{fs::path(pred_path).stem().string(), curve(records, default_grid())}},
                    plot_path);
  return 0;
}

int cmd_compare(const std::string& pred_a, const std::string& pred_b,
                const std::string& gt_dir, int width, int height)
{
  const std::vector<EvalRecord> ra =
      evaluate_predictions(read_predictions(pred_a), gt_dir, width, height);
  const std::vector<EvalRecord> rb =
      evaluate_predictions(read_predictions(pred_b), gt_dir, width, height);
  std::cout << format_summary("a", ra) << format_summary("b", rb);
  std::string text = "p_value = ";
  detail::append_number(text, significance(ra, rb));
  text += '\n';
  std::cout << text;
  return 0;
}

// ---------------------------------------------------------------------------
// Stress test and benchmark

std::vector<SyntheticInstance> load_dataset(const std::string& dir)
{
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory() && fs::exists(entry.path() / "features.csv"))
      names.push_back(entry.path().string());
  if (names.empty())
    throw std::runtime_error(dir + ": no instance directories found");
  std::sort(names.begin(), names.end());
  std::vector<SyntheticInstance> instances;
  instances.reserve(names.size());
  for (const std::string& n : names)
    instances.push_back(load_instance(n));
  return instances;
}

int cmd_stress(const std::string& dataset, const std::string& sigmas_csv,
               const std::string& scales_csv, const std::string& thresholds_csv,
               const std::string& config_path, const std::optional<std::uint64_t>& seed,
               const std::string& out_path)
{
  const PipelineConfig cfg = load_pipeline_config(config_path, seed);
  const std::vector<SyntheticInstance> instances = load_dataset(dataset);
  const std::vector<double> sigmas = parse_double_list(sigmas_csv, "--sigmas");
  const std::vector<double> scales = parse_double_list(scales_csv, "--scales");
  const std::vector<double> thresholds = parse_double_list(thresholds_csv, "--thresholds");

  const Detector detector = [&cfg](const SyntheticInstance& inst) -> std::optional<VPEstimate> {
    const DetectionOutput out = detect_pipeline(inst.features, inst.camera.width,
                                                inst.camera.height, {}, cfg);
    if (!out.vp)
      return std::nullopt;
    return make_vp(*out.vp);
  };
  const std::vector<StressCell> cells =
      stress_test(detector, instances, sigmas, scales, thresholds, cfg.seed);

  std::string text = "sigma,threshold_deg,precision,recall,f1\n";
  for (const StressCell& c : cells) {
    detail::append_number(text, c.sigma);
    text += ',';
    detail::append_number(text, c.threshold_deg);
    text += ',';
    detail::append_number(text, c.precision);
    text += ',';
    detail::append_number(text, c.recall);
    text += ',';
    detail::append_number(text, c.f1);
    text += '\n';
  }
  std::cout << text;
  if (!out_path.empty())
    write_stress_csv(cells, out_path);
  return 0;
}

int cmd_bench(const std::string& dataset, const std::string& config_path,
              const std::optional<std::uint64_t>& seed)
{
  const PipelineConfig cfg = load_pipeline_config(config_path, seed);
  const std::vector<WorkItem> items = collect_inputs(dataset);
  std::vector<double> times;
  times.reserve(items.size());
  int detected = 0;
  for (const WorkItem& item : items) {
    const DetectionOutput out = detect_one(item, cfg, {});
    times.push_back(out.runtime_ms);
    if (out.vp)
      ++detected;
  }
  std::cout << "images = " << items.size() << "\n"
            << "detected = " << detected << "\n"
            << "median_runtime_ms = " << median(times) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"vanishing point detection from recurring patterns"};
  app.require_subcommand(1);

  // ---- detect ----
  auto* detect = app.add_subcommand("detect", "detect the dominant vanishing point");
  std::string det_input, det_config, det_out;
  DetectFlags det_flags;
  std::optional<std::uint64_t> det_seed;
  int det_jobs = 1;
  detect->add_option("input", det_input, "image file, features CSV, instance dir, or dataset dir")
      ->required();
  detect->add_option("--config", det_config, "pipeline configuration file");
  detect->add_option("--features", det_flags.features_file,
                     "use features from this CSV instead of extracting");
  detect->add_option("--segments", det_flags.segments_file,
                     "read explicit segments from this CSV");
  detect->add_option("--seed", det_seed, "consensus RNG seed");
  detect->add_option("--out", det_out, "write predictions CSV here (default: stdout)");
  detect->add_option("--jobs", det_jobs, "parallel images in directory mode")
      ->check(CLI::PositiveNumber);
  detect->add_option("--width", det_flags.width, "image width for bare features input");
  detect->add_option("--height", det_flags.height, "image height for bare features input");

  // ---- synth ----
  auto* synth = app.add_subcommand("synth", "generate synthetic instances");
  int synth_scenes = 10;
  std::uint64_t synth_seed = 0;
  double synth_noise = 0.0;
  std::string synth_out = "synth_out";
  bool synth_render = false;
  synth->add_option("--scenes", synth_scenes, "number of instances")->required();
  synth->add_option("--seed", synth_seed, "generator seed");
  synth->add_option("--noise", synth_noise, "feature position noise sigma, px");
  synth->add_option("--out", synth_out, "output dataset directory");
  synth->add_flag("--render", synth_render, "also write rendered image.png");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "score predictions against ground truth");
  std::string eval_pred, eval_gt, eval_curve, eval_plot;
  int eval_w = 640, eval_h = 480;
  eval->add_option("--pred", eval_pred, "predictions CSV")->required();
  eval->add_option("--gt", eval_gt, "ground-truth directory")->required();
  eval->add_option("--curve", eval_curve, "write success-curve CSV here");
  eval->add_option("--plot", eval_plot, "write success-curve SVG here");
  eval->add_option("--width", eval_w, "fallback image width for flat gt files");
  eval->add_option("--height", eval_h, "fallback image height for flat gt files");

  // ---- compare ----
  auto* compare = app.add_subcommand("compare", "compare two prediction sets");
  std::string cmp_a, cmp_b, cmp_gt;
  int cmp_w = 640, cmp_h = 480;
  compare->add_option("--pred-a", cmp_a, "first predictions CSV")->required();
  compare->add_option("--pred-b", cmp_b, "second predictions CSV")->required();
  compare->add_option("--gt", cmp_gt, "ground-truth directory")->required();
  compare->add_option("--width", cmp_w, "fallback image width for flat gt files");
  compare->add_option("--height", cmp_h, "fallback image height for flat gt files");

  // ---- stress ----
  auto* stress = app.add_subcommand("stress", "noise robustness grid");
  std::string str_dataset, str_sigmas = "0.5,1,2,3,5", str_scales = "1",
              str_thresholds = "5,10", str_config, str_out;
  std::optional<std::uint64_t> str_seed;
  stress->add_option("--dataset", str_dataset, "instance dataset directory")->required();
  stress->add_option("--sigmas", str_sigmas, "comma-separated noise sigmas, px");
  stress->add_option("--scales", str_scales, "comma-separated global scale factors");
  stress->add_option("--thresholds", str_thresholds, "comma-separated success thresholds, deg");
  stress->add_option("--config", str_config, "pipeline configuration file");
  stress->add_option("--seed", str_seed, "perturbation RNG seed");
  stress->add_option("--out", str_out, "write stress CSV here");

  // ---- bench ----
  auto* bench = app.add_subcommand("bench", "median per-image runtime");
  std::string bench_dataset, bench_config;
  std::optional<std::uint64_t> bench_seed;
  bench->add_option("--dataset", bench_dataset, "image or instance dataset directory")
      ->required();
  bench->add_option("--config", bench_config, "pipeline configuration file");
  bench->add_option("--seed", bench_seed, "consensus RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (detect->parsed())
      return cmd_detect(det_input, det_config, det_seed, det_flags, det_out, det_jobs);
    if (synth->parsed())
      return cmd_synth(synth_scenes, synth_seed, synth_noise, synth_out, synth_render);
    if (eval->parsed())
      return cmd_eval(eval_pred, eval_gt, eval_curve, eval_plot, eval_w, eval_h);
    if (compare->parsed())
      return cmd_compare(cmp_a, cmp_b, cmp_gt, cmp_w, cmp_h);
    if (stress->parsed())
      return cmd_stress(str_dataset, str_sigmas, str_scales, str_thresholds, str_config,
                        str_seed, str_out);
    if (bench->parsed())
      return cmd_bench(bench_dataset, bench_config, bench_seed);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
