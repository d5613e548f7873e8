#include "vipr_cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include "vipr/augment.hpp"
#include "vipr/checkpoint.hpp"
#include "vipr/error.hpp"
#include "vipr/gradcheck.hpp"
#include "vipr/labels.hpp"
#include "vipr/manifest.hpp"
#include "vipr/metrics.hpp"
#include "vipr/phantom.hpp"
#include "vipr/pipeline.hpp"
#include "vipr/png_codec.hpp"
#include "vipr/rng.hpp"
#include "vipr/synthesis.hpp"
#include "vipr/train.hpp"
#include "vipr_cli/report.hpp"

namespace fs = std::filesystem;

namespace vipr::cli {
namespace {

constexpr const char* kManifestName = "manifest.jsonl";

void log(const std::string& stage, const std::string& msg) { std::cerr << "[" << stage << "] " << msg << "\n"; }

template <typename F>
auto with_file(const fs::path& file, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.message().starts_with(file.string())) throw;
    fail(e.kind(), file.string() + ": " + e.message());
  } catch (const fs::filesystem_error& e) {
    fail(ErrorKind::kIo, file.string() + ": " + e.code().message());
  }
}

fs::path manifest_path(const fs::path& p) { return fs::is_directory(p) ? p / kManifestName : p; }

struct Dataset {
  fs::path root;
  Manifest manifest;

  fs::path resolve(const std::string& rel) const {
    const fs::path p(rel);
    return p.is_absolute() ? p : root / p;
  }
};

Dataset load_dataset(const fs::path& arg) {
  const fs::path mp = manifest_path(arg);
  if (!fs::exists(mp)) fail(ErrorKind::kIo, mp.string() + ": manifest not found");
  Dataset d;
  d.root = mp.parent_path();
  d.manifest = with_file(mp, [&] { return read_manifest_file(mp); });
  return d;
}

void save_manifest(const fs::path& dir, const Manifest& m) {
  fs::create_directories(dir);
  write_manifest_file(dir / kManifestName, m);
}

std::string frame_name(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "frame_%05zu", index);
  return buf;
}

// "a/b/frame_00020.png" -> "a_b_frame_00020"
std::string flat_stem(const std::string& rel) {
  fs::path p(rel);
  std::string s = (p.parent_path() / p.stem()).generic_string();
  std::replace(s.begin(), s.end(), '/', '_');
  return s;
}

void copy_label(const Dataset& src, const FrameRecord& rec, const fs::path& out_dir, FrameRecord* out) {
  if (!rec.label_path) return;
  const fs::path from = src.resolve(*rec.label_path);
  const fs::path rel = fs::path(out->image_path).replace_extension(".txt");
  fs::create_directories((out_dir / rel).parent_path());
  fs::copy_file(from, out_dir / rel, fs::copy_options::overwrite_existing);
  out->label_path = rel.generic_string();
}

BBox first_box(const fs::path& label_file) {
  const auto boxes = with_file(label_file, [&] { return read_yolo_label_file(label_file.string()); });
  if (boxes.empty()) fail(ErrorKind::kValidation, label_file.string() + ": label file holds no ROI box");
  return boxes.front();
}

// Per-image map transform applied to every record of a dataset, keeping layout.
void map_images(const std::string& stage, const fs::path& in, const fs::path& out,
                const std::function<GrayImage(const GrayImage&)>& fn) {
  const Dataset src = load_dataset(in);
  Manifest result;
  for (const FrameRecord& rec : src.manifest.records) {
    const fs::path from = src.resolve(rec.image_path);
    const GrayImage img = with_file(from, [&] { return read_png_file(from); });
    FrameRecord o = rec;
    o.image_path = fs::path(rec.image_path).is_absolute() ? fs::path(rec.image_path).filename().generic_string()
                                                          : rec.image_path;
    o.label_path.reset();
    with_file(out / o.image_path, [&] { write_png_file(out / o.image_path, fn(img)); });
    copy_label(src, rec, out, &o);
    result.records.push_back(std::move(o));
  }
  save_manifest(out, result);
  log(stage, std::to_string(result.records.size()) + " frames -> " + out.string());
}

// ---------------------------------------------------------------------------

struct PhantomOpts {
  std::string out;
  int videos = 2;
  int frames = 200;
  std::uint64_t seed = 0;
  std::string asymmetry;
  double jitter = 0.02;
  std::string format = "both";
};

int cmd_phantom(const PhantomOpts& o) {
  PhantomParams params;
  params.asymmetry = parse_asymmetry(o.asymmetry);
  params.validate();
  const fs::path out(o.out);
  fs::create_directories(out);
  Manifest m;
  for (int v = 0; v < o.videos; ++v) {
    char id[32];
    std::snprintf(id, sizeof(id), "video_%03d", v);
    const std::uint64_t vseed = derive_key({o.seed, static_cast<std::uint64_t>(v)});
    const auto frames = generate_sequence(params, vseed, o.frames, o.jitter);
    std::vector<GrayImage> images;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const std::string stem = std::string(id) + "/" + frame_name(k);
      write_yolo_label_file((out / (stem + ".txt")).string(), {frames[k].roi});
      if (o.format != "y4m") {
        write_png_file(out / (stem + ".png"), frames[k].image);
        FrameRecord r;
        r.image_path = stem + ".png";
        r.label_path = stem + ".txt";
        r.source_id = id;
        r.seed = vseed;
        m.records.push_back(std::move(r));
      }
      if (o.format != "png") images.push_back(frames[k].image);
    }
    if (o.format != "png") {
      std::ofstream y4m(out / (std::string(id) + ".y4m"), std::ios::binary);
      write_y4m(y4m, images);
      if (!y4m) fail(ErrorKind::kIo, (out / (std::string(id) + ".y4m")).string() + ": write failed");
    }
  }
  if (params.text_band) {
    const PixelRect& t = *params.text_band;
    write_text(out / "masks.txt", "device = phantom\nmask = " + std::to_string(t.x0) + "," + std::to_string(t.y0) +
                                      "," + std::to_string(t.x1) + "," + std::to_string(t.y1) + "\n");
  }
  save_manifest(out, m);
  log("phantom-gen", std::to_string(o.videos) + " videos x " + std::to_string(o.frames) + " frames -> " + o.out);
  return 0;
}

struct ExtractOpts {
  std::string in;
  std::size_t stride = 20;
  std::size_t offset = 0;
  std::string out;
};

int cmd_extract(const ExtractOpts& o) {
  const ExtractionConfig cfg{o.stride, o.offset};
  is_extracted(0, cfg);  // validates the stride
  const fs::path in(o.in), out(o.out);
  Manifest result;
  if (fs::is_directory(in) && fs::exists(in / kManifestName)) {
    const Dataset src = load_dataset(in);
    std::map<std::string, std::size_t> seen;
    for (const FrameRecord& rec : src.manifest.records) {
      const std::size_t index = seen[rec.source_id]++;
      if (!is_extracted(index, cfg)) continue;
      FrameRecord r = rec;
      r.image_path = rec.source_id + "/" + frame_name(index) + ".png";
      r.label_path.reset();
      fs::create_directories(out / rec.source_id);
      fs::copy_file(src.resolve(rec.image_path), out / r.image_path, fs::copy_options::overwrite_existing);
      copy_label(src, rec, out, &r);
      result.records.push_back(std::move(r));
    }
  } else {
    std::vector<fs::path> videos;
    if (fs::is_directory(in)) {
      for (const auto& e : fs::directory_iterator(in)) {
        if (e.path().extension() == ".y4m") videos.push_back(e.path());
      }
      std::sort(videos.begin(), videos.end());
    } else {
      videos.push_back(in);
    }
    if (videos.empty()) fail(ErrorKind::kIo, in.string() + ": no manifest or .y4m videos found");
    for (const fs::path& video : videos) {
      const std::string id = video.stem().string();
      std::ifstream stream(video, std::ios::binary);
      if (!stream) fail(ErrorKind::kIo, video.string() + ": cannot open");
      with_file(video, [&] {
        Y4mReader reader(stream);
        std::size_t index = 0;
        while (auto frame = reader.next()) {
          const std::size_t k = index++;
          if (!is_extracted(k, cfg)) continue;
          FrameRecord r;
          r.image_path = id + "/" + frame_name(k) + ".png";
          r.source_id = id;
          write_png_file(out / r.image_path, *frame);
          const fs::path label = video.parent_path() / id / (frame_name(k) + ".txt");
          if (fs::exists(label)) {
            const std::string rel = id + "/" + frame_name(k) + ".txt";
            fs::copy_file(label, out / rel, fs::copy_options::overwrite_existing);
            r.label_path = rel;
          }
          result.records.push_back(std::move(r));
        }
      });
    }
  }
  save_manifest(out, result);
  log("extract", std::to_string(result.records.size()) + " frames -> " + o.out);
  return 0;
}

struct MapOpts {
  std::string in;
  std::string out;
  std::string masks;
};

int cmd_anonymize(const MapOpts& o) {
  const fs::path mask_file(o.masks);
  const MaskConfig masks = with_file(mask_file, [&] {
    const auto bytes = read_file_bytes(mask_file);
    return parse_mask_config(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  });
  log("anonymize", "device '" + masks.device + "', " + std::to_string(masks.masks.size()) + " mask regions");
  map_images("anonymize", o.in, o.out, [&](const GrayImage& img) { return anonymize(img, masks.masks); });
  return 0;
}

int cmd_standardize(const MapOpts& o) {
  map_images("standardize", o.in, o.out, [](const GrayImage& img) { return standardize(img); });
  return 0;
}

struct SynthOpts {
  std::string manifest;
  std::string out;
  std::uint64_t seed = 0;
  double factor = 0.75;
  int strip = 6;
};

int cmd_synth(const SynthOpts& o) {
  const SquishParams params{o.factor, o.strip};
  params.validate(kStandardSize);
  const Dataset src = load_dataset(o.manifest);
  const fs::path out(o.out);
  Manifest result;
  for (const FrameRecord& rec : src.manifest.records) {
    if (!rec.label_path) fail(ErrorKind::kValidation, rec.image_path + ": synthesis needs an ROI label");
    const fs::path image_file = src.resolve(rec.image_path);
    RoiInput input;
    input.frame_id = rec.image_path;
    input.source_frame = with_file(image_file, [&] { return read_png_file(image_file); });
    const BBox box = first_box(src.resolve(*rec.label_path));
    with_file(image_file, [&] {
      input.roi = to_pixel_rect(box, input.source_frame.width(), input.source_frame.height());
      input.roi_image = crop_to_roi(input.source_frame, box);
    });
    for (SynthSample& s : build_groups(std::span<const RoiInput>(&input, 1), o.seed, params)) {
      FrameRecord r;
      r.image_path = std::string(to_string(s.group)) + "/" + flat_stem(rec.image_path) + ".png";
      r.source_id = rec.source_id;
      r.split = rec.split;
      r.group = std::string(to_string(s.group));
      r.label = s.label;
      r.source_frame = rec.image_path;
      r.seed = s.seed;
      write_png_file(out / r.image_path, s.image);
      result.records.push_back(std::move(r));
    }
  }
  save_manifest(out, result);
  log("synth", std::to_string(src.manifest.records.size()) + " ROIs -> " + std::to_string(result.records.size()) +
                   " samples in " + o.out);
  return 0;
}

struct AugmentOpts {
  std::string manifest;
  std::string out;
  std::uint64_t seed = 0;
};

SynthSample load_sample(const Dataset& src, const FrameRecord& rec) {
  SynthSample s;
  const fs::path file = src.resolve(rec.image_path);
  s.image = with_file(file, [&] { return read_png_file(file); });
  if (!rec.group) fail(ErrorKind::kValidation, rec.image_path + ": record has no group");
  const auto group = parse_group(*rec.group);
  if (!group) fail(ErrorKind::kValidation, rec.image_path + ": unknown group '" + *rec.group + "'");
  s.group = *group;
  s.label = rec.label.value_or(binary_label(*group));
  s.source_frame = rec.source_frame.value_or(rec.image_path);
  s.seed = rec.seed.value_or(0);
  return s;
}

int cmd_augment(const AugmentOpts& o) {
  const AugmentParams params;
  params.validate();
  const Dataset src = load_dataset(o.manifest);
  const fs::path out(o.out);
  Manifest result;
  for (std::size_t i = 0; i < src.manifest.records.size(); ++i) {
    const FrameRecord& rec = src.manifest.records[i];
    const SynthSample sample = load_sample(src, rec);
    for (AugmentRecipe recipe : kAllRecipes) {
      const SynthSample a = augment_one(sample, recipe, params, o.seed, i);
      FrameRecord r;
      r.image_path = std::string(to_string(recipe)) + "/" + flat_stem(rec.image_path) + ".png";
      r.source_id = rec.source_id;
      r.split = rec.split;
      r.group = std::string(to_string(a.group));
      r.label = a.label;
      r.source_frame = a.source_frame;
      r.seed = o.seed;
      write_png_file(out / r.image_path, a.image);
      result.records.push_back(std::move(r));
    }
  }
  save_manifest(out, result);
  log("augment", std::to_string(src.manifest.records.size()) + " -> " + std::to_string(result.records.size()) +
                     " samples in " + o.out);
  return 0;
}

int record_label(const FrameRecord& rec) {
  if (rec.label) return *rec.label;
  if (rec.group) {
    if (auto g = parse_group(*rec.group)) return binary_label(*g);
  }
  fail(ErrorKind::kValidation, rec.image_path + ": record has neither label nor group");
}

struct TrainOpts {
  std::string manifest;
  int epochs = 50;
  int batch = 64;
  std::string out;
  std::string history;
  double lr = 1e-3;
  std::string optimizer = "adam";
  std::string precision = "f32";
  std::uint64_t seed = 0;
  double val_fraction = 0.2;
};

int cmd_train(const TrainOpts& o) {
  Dataset src = load_dataset(o.manifest);
  const bool has_val = std::any_of(src.manifest.records.begin(), src.manifest.records.end(),
                                   [](const FrameRecord& r) { return r.split == Split::kVal; });
  if (!has_val && o.val_fraction > 0) {
    src.manifest = assign_splits(src.manifest, std::nullopt, o.val_fraction, o.seed);
  }
  validate_manifest(src.manifest);
  std::vector<LabeledImage> train_set, val_set;
  for (const FrameRecord& rec : src.manifest.records) {
    const fs::path file = src.resolve(rec.image_path);
    LabeledImage li{with_file(file, [&] { return read_png_file(file); }), record_label(rec)};
    (rec.split == Split::kVal ? val_set : train_set).push_back(std::move(li));
  }
  log("train", std::to_string(train_set.size()) + " train / " + std::to_string(val_set.size()) + " val images");

  TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch;
  cfg.optimizer.kind = parse_optimizer(o.optimizer);
  cfg.optimizer.learning_rate = o.lr;
  cfg.seed = o.seed;
  cfg.precision = parse_precision(o.precision);
  const TrainResult r = train(NetConfig{}, cfg, train_set, val_set, [](const EpochStats& e) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch %d train_loss %.5f val_loss %.5f val_acc %.4f", e.epoch, e.train_loss,
                  e.val_loss, e.val_acc);
    log("train", buf);
  });
  save_checkpoint_file(o.out, r.checkpoint);
  const std::string history = o.history.empty() ? o.out + ".history.csv" : o.history;
  write_text(history, r.history.to_csv());
  log("train", "checkpoint -> " + o.out + ", history -> " + history);
  return 0;
}

struct EvalClsOpts {
  std::string ckpt;
  std::string manifest;
  std::string out;
  double threshold = 0.5;
  std::string split = "val";
};

int cmd_eval_cls(const EvalClsOpts& o) {
  const Checkpoint ckpt = with_file(o.ckpt, [&] { return load_checkpoint_file(o.ckpt); });
  const Classifier clf(ckpt);
  const Dataset src = load_dataset(o.manifest);
  std::vector<double> probs;
  std::vector<int> labels;
  std::string predictions = "image_path,label,probability\n";
  for (const FrameRecord& rec : src.manifest.records) {
    if (o.split != "all" && std::string(to_string(rec.split)) != o.split) continue;
    const fs::path file = src.resolve(rec.image_path);
    const GrayImage img = with_file(file, [&] { return read_png_file(file); });
    const double p = with_file(file, [&] { return clf.predict(img); });
    probs.push_back(p);
    labels.push_back(record_label(rec));
    char buf[64];
    std::snprintf(buf, sizeof(buf), ",%d,%.9g\n", labels.back(), p);
    predictions += rec.image_path + buf;
  }
  if (probs.empty()) fail(ErrorKind::kValidation, "no records in split '" + o.split + "'");
  const ClassificationReport rep = classification_report(probs, labels, o.threshold);
  const fs::path out(o.out);
  write_text(out / "predictions.csv", predictions);
  write_text(out / "confusion.csv", rep.confusion.to_csv());
  write_text(out / "confusion.svg", svg_confusion("Normalized confusion matrix", rep.confusion));
  write_text(out / "pr.csv", rep.pr_csv());
  Series pr{"classifier", {}};
  for (auto it = rep.pr_curve.rbegin(); it != rep.pr_curve.rend(); ++it) pr.points.push_back({it->recall, it->precision});
  write_text(out / "pr.svg", svg_line_chart("Precision-recall", "recall", "precision", {pr}));
  char summary[256];
  std::snprintf(summary, sizeof(summary), "images,%zu\nthreshold,%.9g\naccuracy,%.9g\nprecision,%.9g\nrecall,%.9g\nf1,%.9g\n",
                probs.size(), o.threshold, rep.accuracy, rep.precision, rep.recall, rep.f1);
  write_text(out / "summary.csv", std::string("metric,value\n") + summary);
  std::cout << "accuracy " << rep.accuracy << " precision " << rep.precision << " recall " << rep.recall << " f1 "
            << rep.f1 << "\n";
  return 0;
}

struct EvalDetOpts {
  std::string dets;
  std::string gts;
  std::string out;
  double iou = 0.5;
};

std::map<std::string, std::vector<Detection>> read_detections(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::kIo, file.string() + ": cannot open");
  std::map<std::string, std::vector<Detection>> out;
  std::string line;
  std::size_t line_no = 0;
  auto bad = [&](const std::string& why) {
    fail(ErrorKind::kParse, file.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1) {
      if (line != "image_id,cx,cy,w,h,confidence") bad("expected header image_id,cx,cy,w,h,confidence");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 6) bad("expected 6 columns, got " + std::to_string(cells.size()));
    Detection d;
    double* fields[] = {&d.box.cx, &d.box.cy, &d.box.w, &d.box.h, &d.confidence};
    for (int k = 0; k < 5; ++k) {
      std::size_t used = 0;
      try {
        *fields[k] = std::stod(cells[static_cast<std::size_t>(k) + 1], &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != cells[static_cast<std::size_t>(k) + 1].size()) bad("bad number '" + cells[k + 1] + "'");
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) bad("confidence outside [0, 1]");
    try {
      d.box.validate();
    } catch (const Error& e) {
      bad(e.message());
    }
    out[cells[0]].push_back(d);
  }
  return out;
}

int cmd_eval_det(const EvalDetOpts& o) {
  auto dets = read_detections(o.dets);
  std::map<std::string, std::vector<BBox>> gts;
  for (const auto& e : fs::directory_iterator(o.gts)) {
    if (e.path().extension() != ".txt") continue;
    gts[e.path().stem().string()] = with_file(e.path(), [&] { return read_yolo_label_file(e.path().string()); });
  }
  for (const auto& [id, _] : dets) {
    if (!gts.count(id)) log("eval-det", "warning: detections for '" + id + "' have no ground truth file");
    gts[id];
  }
  std::vector<std::vector<Detection>> d;
  std::vector<std::vector<BBox>> g;
  for (const auto& [id, boxes] : gts) {
    g.push_back(boxes);
    d.push_back(dets.count(id) ? dets[id] : std::vector<Detection>{});
  }
  const MapResult map = map_range(d, g);
  const ConfidenceCurves curves = confidence_curves(d, g, o.iou);
  const ConfusionMatrix cm = detection_confusion(d, g, curves.optimal_threshold, o.iou);
  const fs::path out(o.out);

  std::string mcsv = "metric,value\n";
  char buf[96];
  std::snprintf(buf, sizeof(buf), "map50,%.9g\nmap50_95,%.9g\n", map.map50, map.map50_95);
  mcsv += buf;
  for (int k = 0; k < 10; ++k) {
    std::snprintf(buf, sizeof(buf), "ap%.2f,%.9g\n", kMapIouThresholds[static_cast<std::size_t>(k)], map.per_threshold[static_cast<std::size_t>(k)]);
    mcsv += buf;
  }
  std::snprintf(buf, sizeof(buf), "optimal_threshold,%.9g\noptimal_f1,%.9g\n", curves.optimal_threshold,
                curves.optimal_f1);
  mcsv += buf;
  write_text(out / "metrics.csv", mcsv);
  write_text(out / "curves.csv", curves.to_csv());
  const CurvePoint best = curves.f1.points[static_cast<std::size_t>(curves.f1.argmax)];
  write_text(out / "f1_confidence.svg", svg_line_chart("F1-confidence", "confidence", "F1", {{"F1", curves.f1.points}}, &best));
  write_text(out / "pr_confidence.svg",
             svg_line_chart("Precision / recall vs confidence", "confidence", "value",
                            {{"precision", curves.precision.points}, {"recall", curves.recall.points}}));
  write_text(out / "confusion.csv", cm.to_csv());
  write_text(out / "confusion.svg", svg_confusion("Normalized confusion matrix", cm));
  std::printf("mAP@0.5 %.6f mAP@0.5:0.95 %.6f optimal_threshold %.6f f1 %.6f\n", map.map50, map.map50_95,
              curves.optimal_threshold, curves.optimal_f1);
  return 0;
}

struct GradOpts {
  std::uint64_t seed = 0;
  double eps = 1e-5;
};

int cmd_gradcheck(const GradOpts& o) {
  const GradCheckReport r = grad_check(NetConfig::tiny(), o.seed, o.eps);
  std::printf("max relative error %.3e over %zu parameters (worst: %s[%zu])\n", r.max_relative_error, r.checked,
              r.worst_parameter.c_str(), r.worst_index);
  if (!r.finite || !(r.max_relative_error < 1e-4)) {
    std::fprintf(stderr, "gradcheck failed: error must be below 1e-4\n");
    return 2;
  }
  return 0;
}

// ---------------------------------------------------------------------------

CLI::App* add_stage(CLI::App& app, const std::string& name, const std::string& help) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("--config", "key=value configuration file; command-line flags take precedence");
  return sub;
}

CLI::Option* add_seed(CLI::App* sub, std::uint64_t& seed) {
  return sub->add_option("--seed", seed, "Random seed")->envname("VIPR_SEED")->capture_default_str();
}

// Splices the subcommand's --config file into the argument list as ordinary
// options placed before the user's own, so explicit flags win. Unknown keys
// and sections are rejected.
std::vector<std::string> expand_config(CLI::App& app, std::vector<std::string> args) {
  auto first = std::find_if(args.begin(), args.end(), [](const std::string& a) { return !a.starts_with("-"); });
  if (first == args.end()) return args;
  CLI::App* sub = nullptr;
  try {
    sub = app.get_subcommand(*first);
  } catch (const CLI::OptionNotFound&) {
    return args;
  }
  std::string path;
  for (auto it = first + 1; it != args.end(); ++it) {
    if (*it == "--config" && it + 1 != args.end()) path = *(it + 1);
    if (it->starts_with("--config=")) path = it->substr(9);
  }
  if (path.empty()) return args;

  std::vector<std::string> injected;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    const CLI::Option* opt = item.parents.empty() ? sub->get_option_no_throw("--" + item.name) : nullptr;
    if (opt == nullptr || item.name == "config") throw CLI::ConfigError::Extras(item.fullname());
    for (const auto& v : item.inputs) {
      injected.push_back("--" + item.name);
      injected.push_back(v);
    }
  }
  args.insert(first + 1, injected.begin(), injected.end());
  return args;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"Vocal-cord ultrasound dataset pipeline, VIPRnet training and evaluation", "vipr"};
  app.require_subcommand(1, 1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  PhantomOpts ph;
  ExtractOpts ex;
  MapOpts an, st;
  SynthOpts sy;
  AugmentOpts au;
  TrainOpts tr;
  EvalClsOpts ec;
  EvalDetOpts ed;
  GradOpts gc;
  std::map<CLI::App*, std::function<int()>> actions;

  auto* s = add_stage(app, "phantom-gen", "Generate phantom videos (Y4M/PNG), ROI labels and a manifest");
  s->add_option("--out", ph.out, "Output directory")->required();
  s->add_option("--videos", ph.videos, "Number of videos")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--frames", ph.frames, "Frames per video")->capture_default_str()->check(CLI::PositiveNumber);
  add_seed(s, ph.seed);
  s->add_option("--asymmetry", ph.asymmetry, "Shorten one cord: left|right[:fraction]");
  s->add_option("--jitter", ph.jitter, "Per-frame geometry jitter, fraction of frame size")->capture_default_str();
  s->add_option("--format", ph.format, "Video output")->capture_default_str()->check(CLI::IsMember({"both", "y4m", "png"}));
  actions[s] = [&] { return cmd_phantom(ph); };

  s = add_stage(app, "extract", "Keep every n-th frame of Y4M videos or a frame manifest");
  s->add_option("--in", ex.in, "Y4M file, directory of Y4M files, or dataset directory")->required();
  s->add_option("--stride", ex.stride, "Keep every stride-th frame")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--offset", ex.offset, "Index of the first kept frame")->capture_default_str();
  s->add_option("--out", ex.out, "Output directory")->required();
  actions[s] = [&] { return cmd_extract(ex); };

  s = add_stage(app, "anonymize", "Zero burned-in text regions");
  s->add_option("--in", an.in, "Dataset directory")->required();
  s->add_option("--masks", an.masks, "Mask configuration file")->required();
  s->add_option("--out", an.out, "Output directory")->required();
  actions[s] = [&] { return cmd_anonymize(an); };

  s = add_stage(app, "standardize", "Resize frames to 256x256");
  s->add_option("--in", st.in, "Dataset directory")->required();
  s->add_option("--out", st.out, "Output directory")->required();
  actions[s] = [&] { return cmd_standardize(st); };

  s = add_stage(app, "synth", "Build healthy, healthy2, leftpar and rightpar samples from labelled frames");
  s->add_option("--manifest", sy.manifest, "Input manifest or dataset directory")->required();
  s->add_option("--out", sy.out, "Output directory")->required();
  add_seed(s, sy.seed);
  s->add_option("--factor", sy.factor, "Compression factor of the squished half")->capture_default_str();
  s->add_option("--strip", sy.strip, "Seam columns replaced on each side")->capture_default_str();
  actions[s] = [&] { return cmd_synth(sy); };

  s = add_stage(app, "augment", "Expand every sample with the eight augmentation recipes");
  s->add_option("--manifest", au.manifest, "Input manifest or dataset directory")->required();
  s->add_option("--out", au.out, "Output directory")->required();
  add_seed(s, au.seed);
  actions[s] = [&] { return cmd_augment(au); };

  s = add_stage(app, "train", "Train VIPRnet");
  s->add_option("--manifest", tr.manifest, "Input manifest or dataset directory")->required();
  s->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--batch", tr.batch, "Batch size")->capture_default_str()->check(CLI::PositiveNumber);
  s->add_option("--out", tr.out, "Checkpoint path")->required();
  s->add_option("--history", tr.history, "History CSV path (default: <out>.history.csv)");
  s->add_option("--lr", tr.lr, "Learning rate")->capture_default_str();
  s->add_option("--optimizer", tr.optimizer, "Optimizer")->capture_default_str()->check(CLI::IsMember({"adam", "sgd-momentum"}));
  s->add_option("--precision", tr.precision, "Arithmetic precision")->capture_default_str()->check(CLI::IsMember({"f32", "f64"}));
  add_seed(s, tr.seed);
  s->add_option("--val-fraction", tr.val_fraction, "Fraction of sources held out when the manifest has no val split")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  actions[s] = [&] { return cmd_train(tr); };

  s = add_stage(app, "eval-cls", "Classification report for a checkpoint");
  s->add_option("--ckpt", ec.ckpt, "Checkpoint")->required();
  s->add_option("--manifest", ec.manifest, "Dataset manifest")->required();
  s->add_option("--out", ec.out, "Report directory")->required();
  s->add_option("--threshold", ec.threshold, "Decision threshold")->capture_default_str();
  s->add_option("--split", ec.split, "Records to evaluate")->capture_default_str()->check(CLI::IsMember({"val", "train", "all"}));
  actions[s] = [&] { return cmd_eval_cls(ec); };

  s = add_stage(app, "eval-det", "Detection metrics from a detections CSV and YOLO ground truth");
  s->add_option("--dets", ed.dets, "Detections CSV (image_id,cx,cy,w,h,confidence)")->required();
  s->add_option("--gts", ed.gts, "Directory of <image_id>.txt YOLO labels")->required();
  s->add_option("--out", ed.out, "Report directory")->required();
  s->add_option("--iou", ed.iou, "IoU threshold for curves and confusion")->capture_default_str();
  actions[s] = [&] { return cmd_eval_det(ed); };

  s = add_stage(app, "gradcheck", "Compare analytic and numeric gradients on the tiny network");
  add_seed(s, gc.seed);
  s->add_option("--eps", gc.eps, "Finite-difference step")->capture_default_str();
  actions[s] = [&] { return cmd_gradcheck(gc); };

  try {
    std::vector<std::string> args = expand_config(app, std::vector<std::string>(argv + 1, argv + argc));
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string stage = sub->get_name();
  std::string resolved = sub->config_to_str(true, false);
  std::cerr << "[" << stage << "] resolved config:\n" << resolved;
  try {
    return actions.at(sub)();
  } catch (const Error& e) {
    std::cerr << "vipr " << stage << ": " << e.what() << "\n";
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "vipr " << stage << ": io: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vipr " << stage << ": internal error: " << e.what() << "\n";
    return 3;
  }
}

int run(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"vipr"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace vipr::cli
