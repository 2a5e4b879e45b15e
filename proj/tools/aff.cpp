// Command-line front end: label generation, predictor training, inference,
// evaluation, and synthetic-suite generation.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include "aff/config.hpp"
#include "aff/elements.hpp"
#include "aff/errors.hpp"
#include "aff/evaluation.hpp"
#include "aff/grid_model.hpp"
#include "aff/labeler.hpp"
#include "aff/png_io.hpp"
#include "aff/synthetic.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit codes, stable across releases:
//   0 ok, 2 unreadable/empty input, 3 degenerate scene geometry,
//   4 training found nothing to learn from, 5 evaluation input mismatch.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitTraining = 4;
constexpr int kExitEval = 5;

std::mutex g_log_mutex;

void log_line(const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_log_mutex);
  std::cout << msg << "\n";
}

aff::CameraIntrinsics intrinsics_from_config(const aff::RunConfig& cfg,
                                             int width, int height) {
  aff::CameraIntrinsics k = aff::CameraIntrinsics::make_default(width, height);
  k.fx = cfg.get_double("fx", k.fx);
  k.fy = cfg.get_double("fy", k.fy);
  k.cx = cfg.get_double("cx", k.cx);
  k.cy = cfg.get_double("cy", k.cy);
  return k;
}

aff::LabelGenParams labelgen_params(const aff::RunConfig& cfg) {
  aff::LabelGenParams p;
  p.voxel.voxel_size = cfg.get_double("voxel_size", p.voxel.voxel_size);
  p.voxel.margin = cfg.get_double("grid_margin", p.voxel.margin);
  p.fill.min_angle_from_down_deg =
      cfg.get_double("fill_angle_deg", p.fill.min_angle_from_down_deg);
  p.thresholds.t_lo = cfg.get_double("t_lo", p.thresholds.t_lo);
  p.thresholds.t_hi = cfg.get_double("t_hi", p.thresholds.t_hi);
  p.thresholds.u_max = cfg.get_double("u_max", p.thresholds.u_max);
  p.human.height = cfg.get_double("human_height", p.human.height);
  p.human.shoulder_width =
      cfg.get_double("shoulder_width", p.human.shoulder_width);
  p.human.sitting_height =
      cfg.get_double("sitting_height", p.human.sitting_height);
  p.human.sitting_depth =
      cfg.get_double("sitting_depth", p.human.sitting_depth);
  p.human.lying_length = cfg.get_double("lying_length", p.human.lying_length);
  p.human.lying_width = cfg.get_double("lying_width", p.human.lying_width);
  p.human.reach_radius = cfg.get_double("reach_radius", p.human.reach_radius);
  p.frame.seed = cfg.get_seed("seed", p.frame.seed);
  return p;
}

std::string stem_of_depth(const fs::path& p) {
  std::string name = p.filename().string();
  const std::string suffix = "_depth.png";
  if (name.size() > suffix.size() &&
      name.substr(name.size() - suffix.size()) == suffix)
    return name.substr(0, name.size() - suffix.size());
  return p.stem().string();
}

std::vector<fs::path> list_files(const fs::path& dir,
                                 const std::string& suffix) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.size() >= suffix.size() &&
        name.substr(name.size() - suffix.size()) == suffix)
      out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Run fn(i) for i in [0, n) over a small thread pool; outputs must not
// overlap. With jobs == 1 the loop is plain and ordered.
void parallel_for(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  const int threads = std::min<int>(jobs, static_cast<int>(n));
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&]() {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

json frame_to_json(const aff::ManhattanFrame& frame) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r)
    rows.push_back({frame.rotation(r, 0), frame.rotation(r, 1),
                    frame.rotation(r, 2)});
  return rows;
}

// ---------------------------------------------------------------------------

int cmd_labelgen(const aff::RunConfig& cfg, const std::string& depth_dir,
                 const std::string& out_dir, int jobs) {
  const auto files = list_files(depth_dir, "_depth.png");
  if (files.empty()) {
    std::cerr << "labelgen: no *_depth.png under " << depth_dir << "\n";
    return kExitInput;
  }
  fs::create_directories(out_dir);
  const aff::LabelGenParams params = labelgen_params(cfg);

  std::atomic<int> degenerate{0};
  std::atomic<int> unreadable{0};
  parallel_for(files.size(), jobs, [&](size_t i) {
    const fs::path& file = files[i];
    const std::string stem = stem_of_depth(file);
    try {
      aff::RunConfig file_cfg = cfg;
      const fs::path side = file.parent_path() / (stem + "_intrinsics.txt");
      if (fs::exists(side)) file_cfg = aff::RunConfig::from_file(side.string());
      aff::DepthMap depth = aff::load_depth_png(
          file.string(), intrinsics_from_config(file_cfg, 0, 0));

      std::optional<aff::ImageU8> floor_mask;
      const fs::path mask_path = file.parent_path() / (stem + "_floor.png");
      if (fs::exists(mask_path) && cfg.get_int("use_floor_mask", 0)) {
        const aff::AffordanceMap m =
            aff::load_affordance_png(mask_path.string(), "floor");
        aff::ImageU8 mask(m.labels.width(), m.labels.height(), 0);
        for (int y = 0; y < mask.height(); ++y)
          for (int x = 0; x < mask.width(); ++x)
            mask.at(x, y) = m.labels.at(x, y) == aff::TriState::Supports;
        floor_mask = std::move(mask);
      }

      const aff::LabelGenResult result =
          aff::generate_labels(depth, params, floor_mask);
      for (const auto& map : result.maps) {
        const fs::path out =
            fs::path(out_dir) / (stem + "_" + map.affordance + ".png");
        aff::save_affordance_png(map, out.string());
      }
      const auto counts = result.grid.counts();
      json side_car = {
          {"frame_rotation", frame_to_json(result.frame)},
          {"voxel_size", result.grid.voxel_size()},
          {"grid_dims",
           {result.grid.dims().x(), result.grid.dims().y(),
            result.grid.dims().z()}},
          {"cells_occupied", counts.occupied},
          {"cells_free", counts.free},
          {"cells_unknown", counts.unknown},
          {"flagged_columns", result.flagged_columns},
          {"seed", params.frame.seed},
      };
      std::ofstream os(fs::path(out_dir) / (stem + "_labels.json"));
      os << side_car.dump(2) << "\n";
      log_line("labelgen: " + stem + " ok");
    } catch (const aff::DegenerateScene& e) {
      log_line("labelgen: " + stem + " degenerate scene: " + e.what());
      ++degenerate;
    } catch (const aff::PipelineError& e) {
      log_line("labelgen: " + stem + " failed: " + e.what());
      ++unreadable;
    }
  });
  if (unreadable > 0) return kExitInput;
  if (degenerate > 0) return kExitGeometry;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct LabeledSet {
  std::vector<aff::ImageRgb> images;
  std::vector<std::string> stems;
  // per affordance name, aligned with images
  std::map<std::string, std::vector<aff::AffordanceMap>> labels;
};

LabeledSet load_labeled_set(const std::string& image_dir,
                            const std::string& label_dir) {
  LabeledSet set;
  for (const auto& file : list_files(image_dir, "_rgb.png")) {
    const std::string name = file.filename().string();
    const std::string stem = name.substr(0, name.size() - 8);
    bool all_present = true;
    std::map<std::string, aff::AffordanceMap> maps;
    for (aff::Affordance a : aff::all_affordances()) {
      const fs::path lp =
          fs::path(label_dir) /
          (stem + "_" + std::string(aff::to_string(a)) + ".png");
      if (!fs::exists(lp)) {
        all_present = false;
        break;
      }
      maps[aff::to_string(a)] =
          aff::load_affordance_png(lp.string(), aff::to_string(a));
    }
    if (!all_present) continue;
    set.images.push_back(aff::load_rgb_png(file.string()));
    set.stems.push_back(stem);
    for (auto& [k, v] : maps) set.labels[k].push_back(std::move(v));
  }
  return set;
}

bool has_positives(const std::vector<aff::AffordanceMap>& maps) {
  for (const auto& m : maps)
    for (const auto& v : m.labels.data())
      if (v == aff::TriState::Supports) return true;
  return false;
}

int cmd_train_midlevel(const aff::RunConfig& cfg, const std::string& image_dir,
                       const std::string& label_dir,
                       const std::string& out_path) {
  const LabeledSet set = load_labeled_set(image_dir, label_dir);
  if (set.images.empty()) {
    std::cerr << "train-midlevel: no paired images/labels found\n";
    return kExitInput;
  }
  aff::ElementParams params;
  params.k_per_restart = cfg.get_int("k_per_restart", params.k_per_restart);
  params.restarts = cfg.get_int("restarts", params.restarts);
  params.cardinality_cap =
      cfg.get_int("cardinality_cap", params.cardinality_cap);
  params.svm_C = cfg.get_double("svm_c", params.svm_C);
  params.min_coverage = cfg.get_double("min_coverage", params.min_coverage);
  const uint64_t seed = cfg.get_seed("seed", 11);

  aff::ElementBank bank;
  bank.params = params;
  bool trained_any = false;
  for (aff::Affordance a : aff::all_affordances()) {
    const std::string name = aff::to_string(a);
    const auto& maps = set.labels.at(name);
    if (!has_positives(maps)) {
      log_line("train-midlevel: " + name + " has no positives, skipped");
      continue;
    }
    try {
      aff::MidlevelTrainStats stats;
      auto elements = aff::train_midlevel(set.images, maps, name, params,
                                          seed + static_cast<int>(a), &stats);
      log_line("train-midlevel: " + name + ": " +
               std::to_string(stats.patches) + " patches -> " +
               std::to_string(stats.elements) + " elements");
      for (auto& e : elements) bank.elements.push_back(std::move(e));
      trained_any = trained_any || !bank.elements.empty();
    } catch (const aff::NoQualifyingPatches& e) {
      log_line("train-midlevel: " + name + ": " + e.what());
    }
  }
  if (!trained_any) return kExitTraining;
  aff::save_element_bank(bank, out_path);
  log_line("train-midlevel: wrote " + out_path);
  return kExitOk;
}

int cmd_train_grid(const aff::RunConfig& cfg, const std::string& image_dir,
                   const std::string& label_dir, const std::string& out_path,
                   const std::string& log_path) {
  const LabeledSet set = load_labeled_set(image_dir, label_dir);
  if (set.images.empty()) {
    std::cerr << "train-grid: no paired images/labels found\n";
    return kExitInput;
  }
  aff::GridFeatureConfig fc;
  const int m = cfg.get_int("grid_m", 50);
  const int n = cfg.get_int("grid_n", 50);
  aff::TrainConfig tc;
  tc.learning_rate = cfg.get_double("learning_rate", tc.learning_rate);
  tc.momentum = cfg.get_double("momentum", tc.momentum);
  tc.batch_size = cfg.get_int("batch_size", tc.batch_size);
  tc.epochs = cfg.get_int("epochs", tc.epochs);
  tc.weight_decay = cfg.get_double("weight_decay", tc.weight_decay);
  tc.seed = cfg.get_seed("seed", tc.seed);

  std::vector<std::vector<float>> features(set.images.size());
  for (size_t i = 0; i < set.images.size(); ++i)
    features[i] = aff::extract_grid_features(set.images[i], fc);

  std::vector<aff::GridModel> models;
  std::map<std::string, std::vector<double>> curves;
  for (aff::Affordance a : aff::all_affordances()) {
    const std::string name = aff::to_string(a);
    const auto& maps = set.labels.at(name);
    if (!has_positives(maps)) {
      log_line("train-grid: " + name + " has no positives, skipped");
      continue;
    }
    std::vector<aff::GridExample> data(set.images.size());
    for (size_t i = 0; i < set.images.size(); ++i) {
      data[i].features = features[i];
      data[i].target = aff::make_grid_target(maps[i], m, n);
    }
    aff::GridModel model;
    model.init(name, m, n, fc);
    std::vector<double> curve;
    aff::train_grid_model(model, data, tc, &curve);
    curves[name] = curve;
    models.push_back(std::move(model));
    log_line("train-grid: " + name + " final loss " +
             std::to_string(curve.empty() ? 0.0 : curve.back()));
  }
  if (models.empty()) return kExitTraining;
  aff::save_grid_models(models, out_path);
  if (!log_path.empty()) {
    std::ofstream os(log_path);
    os << "epoch";
    for (const auto& [name, curve] : curves) os << "," << name;
    os << "\n";
    size_t epochs = 0;
    for (const auto& [name, curve] : curves)
      epochs = std::max(epochs, curve.size());
    for (size_t e = 0; e < epochs; ++e) {
      os << e;
      for (const auto& [name, curve] : curves) {
        os << ",";
        if (e < curve.size()) os << curve[e];
      }
      os << "\n";
    }
  }
  log_line("train-grid: wrote " + out_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_predict(const aff::RunConfig& cfg, const std::string& model_path,
                const std::string& image_dir, const std::string& out_dir,
                int jobs) {
  (void)cfg;
  const auto files = list_files(image_dir, "_rgb.png");
  if (files.empty()) {
    std::cerr << "predict: no *_rgb.png under " << image_dir << "\n";
    return kExitInput;
  }
  fs::create_directories(out_dir);

  // Model kind by magic bytes.
  std::ifstream probe(model_path, std::ios::binary);
  char magic[4] = {0, 0, 0, 0};
  probe.read(magic, 4);
  probe.close();
  const bool is_bank = std::string(magic, 4) == "AEB1";
  const bool is_grid = std::string(magic, 4) == "AGM1";
  if (!is_bank && !is_grid) {
    std::cerr << "predict: unrecognized model file " << model_path << "\n";
    return kExitInput;
  }

  aff::ElementBank bank;
  std::vector<aff::GridModel> grids;
  if (is_bank) bank = aff::load_element_bank(model_path);
  else grids = aff::load_grid_models(model_path);

  parallel_for(files.size(), jobs, [&](size_t i) {
    const std::string name = files[i].filename().string();
    const std::string stem = name.substr(0, name.size() - 8);
    const aff::ImageRgb image = aff::load_rgb_png(files[i].string());
    if (is_bank) {
      std::map<std::string, std::vector<aff::Element>> by_aff;
      for (const auto& e : bank.elements) by_aff[e.affordance].push_back(e);
      for (const auto& [affordance, elements] : by_aff) {
        const aff::ImageF scores =
            aff::infer(image, elements, bank.params);
        aff::save_score_png(scores, (fs::path(out_dir) /
                                     (stem + "_pred_" + affordance + ".png"))
                                        .string());
      }
    } else {
      for (const auto& model : grids) {
        const aff::ImageF scores = aff::predict(model, image);
        aff::save_score_png(
            scores, (fs::path(out_dir) /
                     (stem + "_pred_" + model.affordance + ".png"))
                        .string());
      }
    }
    log_line("predict: " + stem + " ok");
  });
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_eval(const aff::RunConfig& cfg, const std::string& pred_dir,
             const std::string& truth_dir, const std::string& report_path,
             bool emit_curves, bool emit_svg) {
  const bool include_unknown = cfg.get_int("include_unknown_as_negative", 0);
  std::vector<std::pair<std::string, aff::PRCurve>> rows;
  for (aff::Affordance a : aff::all_affordances()) {
    const std::string name = aff::to_string(a);
    std::vector<double> scores;
    std::vector<bool> truth;
    for (const auto& pred_file :
         list_files(pred_dir, "_pred_" + name + ".png")) {
      const std::string fname = pred_file.filename().string();
      const std::string stem =
          fname.substr(0, fname.size() - (6 + name.size() + 4));
      const fs::path truth_file =
          fs::path(truth_dir) / (stem + "_" + name + ".png");
      if (!fs::exists(truth_file)) continue;
      const aff::ImageF s = aff::load_score_png(pred_file.string());
      const aff::AffordanceMap t =
          aff::load_affordance_png(truth_file.string(), name);
      if (!s.same_size(t.labels)) {
        std::cerr << "eval: size mismatch for " << stem << "\n";
        return kExitEval;
      }
      for (int y = 0; y < s.height(); ++y)
        for (int x = 0; x < s.width(); ++x) {
          const aff::TriState lbl = t.labels.at(x, y);
          if (lbl == aff::TriState::Unknown && !include_unknown) continue;
          scores.push_back(s.at(x, y));
          truth.push_back(lbl == aff::TriState::Supports);
        }
    }
    if (scores.empty()) continue;
    try {
      aff::PRCurve curve = aff::pr_curve_from_pairs(scores, truth);
      log_line("eval: " + name + " ap=" + std::to_string(curve.ap));
      if (emit_curves)
        aff::write_pr_csv(report_path + "." + name + ".csv", curve);
      if (emit_svg)
        aff::write_pr_svg(report_path + "." + name + ".svg", curve, name);
      rows.emplace_back(name, std::move(curve));
    } catch (const aff::NoPositives&) {
      log_line("eval: " + name + " has no positives, skipped");
    }
  }
  if (rows.empty()) {
    std::cerr << "eval: nothing to evaluate\n";
    return kExitInput;
  }
  aff::write_report_csv(report_path, rows);
  log_line("eval: wrote " + report_path);
  return kExitOk;
}

// ---------------------------------------------------------------------------

int cmd_synth(const aff::RunConfig& cfg, const std::string& out_dir,
              const std::string& suite, int count, bool with_labels,
              bool with_oracle, int jobs) {
  fs::create_directories(out_dir);
  std::vector<aff::SceneSpec> scenes;
  if (suite == "oracle") {
    scenes = aff::make_oracle_suite();
  } else {
    scenes = aff::make_training_suite(count, cfg.get_seed("seed", 1));
  }

  const aff::LabelGenParams params = labelgen_params(cfg);
  parallel_for(scenes.size(), jobs, [&](size_t i) {
    char stem_buf[32];
    std::snprintf(stem_buf, sizeof(stem_buf), "scene_%03zu", i);
    const std::string stem = stem_buf;
    const aff::SceneSpec& spec = scenes[i];
    aff::save_scene(spec, (fs::path(out_dir) / (stem + ".scene")).string());
    const aff::DepthMap depth = aff::render_depth(spec);
    aff::save_depth_png(depth,
                        (fs::path(out_dir) / (stem + "_depth.png")).string());
    {
      std::ofstream os(fs::path(out_dir) / (stem + "_intrinsics.txt"));
      os << "fx = " << spec.intrinsics.fx << "\nfy = " << spec.intrinsics.fy
         << "\ncx = " << spec.intrinsics.cx
         << "\ncy = " << spec.intrinsics.cy << "\n";
    }
    aff::save_rgb_png(aff::render_rgb(spec),
                      (fs::path(out_dir) / (stem + "_rgb.png")).string());
    if (with_labels) {
      const aff::LabelGenResult result = aff::generate_labels(depth, params);
      for (const auto& map : result.maps)
        aff::save_affordance_png(
            map, (fs::path(out_dir) / (stem + "_" + map.affordance + ".png"))
                     .string());
    }
    if (with_oracle) {
      const auto bank = aff::build_filter_bank(params.human,
                                               params.voxel.voxel_size);
      const aff::OracleResult oracle = aff::oracle_affordances(
          spec, bank, spec.intrinsics, params.voxel.voxel_size,
          params.thresholds);
      for (size_t f = 0; f < oracle.maps.size(); ++f) {
        aff::save_affordance_png(
            oracle.maps[f],
            (fs::path(out_dir) /
             (stem + "_oracle_" + oracle.maps[f].affordance + ".png"))
                .string());
      }
    }
    log_line("synth: " + stem + " ok");
  });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-driven affordance labeling and direct prediction"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  int jobs = 1;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--set", overrides, "config override key=value")
      ->take_all();
  app.add_option("--jobs", jobs, "parallel files");

  // labelgen
  auto* labelgen = app.add_subcommand("labelgen", "depth maps -> label maps");
  std::string depth_dir, out_dir;
  labelgen->add_option("--depth-dir", depth_dir)->required();
  labelgen->add_option("--out", out_dir)->required();

  // train-midlevel
  auto* tmid = app.add_subcommand("train-midlevel",
                                  "learn mid-level element banks");
  std::string image_dir, label_dir, model_out;
  tmid->add_option("--image-dir", image_dir)->required();
  tmid->add_option("--label-dir", label_dir)->required();
  tmid->add_option("--out", model_out)->required();

  // train-grid
  auto* tgrid = app.add_subcommand("train-grid", "train the grid predictor");
  std::string grid_image_dir, grid_label_dir, grid_out, grid_log;
  tgrid->add_option("--image-dir", grid_image_dir)->required();
  tgrid->add_option("--label-dir", grid_label_dir)->required();
  tgrid->add_option("--out", grid_out)->required();
  tgrid->add_option("--log", grid_log);

  // predict
  auto* predict = app.add_subcommand("predict", "run a trained model");
  std::string pred_model, pred_images, pred_out;
  predict->add_option("--model", pred_model)->required();
  predict->add_option("--image-dir", pred_images)->required();
  predict->add_option("--out", pred_out)->required();

  // eval
  auto* eval = app.add_subcommand("eval", "precision-recall report");
  std::string eval_pred, eval_truth, eval_report;
  bool eval_curves = false, eval_svg = false;
  eval->add_option("--pred-dir", eval_pred)->required();
  eval->add_option("--truth-dir", eval_truth)->required();
  eval->add_option("--report", eval_report)->required();
  eval->add_flag("--curves", eval_curves, "also write PR-curve CSVs");
  eval->add_flag("--svg", eval_svg, "also write PR-curve SVGs");

  // synth
  auto* synth = app.add_subcommand("synth", "generate synthetic scenes");
  std::string synth_out, synth_suite = "train";
  int synth_count = 20;
  bool synth_labels = false, synth_oracle = false;
  synth->add_option("--out", synth_out)->required();
  synth->add_option("--suite", synth_suite, "oracle|train");
  synth->add_option("--count", synth_count);
  synth->add_flag("--labels", synth_labels, "also run label generation");
  synth->add_flag("--oracle", synth_oracle, "also write analytic labels");

  CLI11_PARSE(app, argc, argv);

  try {
    aff::RunConfig cfg;
    if (!config_path.empty()) cfg = aff::RunConfig::from_file(config_path);
    for (const std::string& kv : overrides) {
      const size_t eq = kv.find('=');
      if (eq == std::string::npos) {
        std::cerr << "--set expects key=value, got " << kv << "\n";
        return kExitInput;
      }
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    if (labelgen->parsed())
      return cmd_labelgen(cfg, depth_dir, out_dir, jobs);
    if (tmid->parsed())
      return cmd_train_midlevel(cfg, image_dir, label_dir, model_out);
    if (tgrid->parsed())
      return cmd_train_grid(cfg, grid_image_dir, grid_label_dir, grid_out,
                            grid_log);
    if (predict->parsed())
      return cmd_predict(cfg, pred_model, pred_images, pred_out, jobs);
    if (eval->parsed())
      return cmd_eval(cfg, eval_pred, eval_truth, eval_report, eval_curves,
                      eval_svg);
    if (synth->parsed())
      return cmd_synth(cfg, synth_out, synth_suite, synth_count, synth_labels,
                       synth_oracle, jobs);
  } catch (const aff::IoError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const aff::PipelineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitOk;
}
