#include "vipr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <numeric>

#include "vipr/error.hpp"

namespace vipr {
namespace {

struct Ranked {
  double confidence;
  bool tp;
};

std::vector<std::size_t> confidence_order(const std::vector<Detection>& dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
  return order;
}

void check_images(std::size_t dets, std::size_t gts) {
  if (dets != gts) {
    fail(ErrorKind::kInvalidArgument, "detections cover " + std::to_string(dets) + " images but ground truth covers " +
                                          std::to_string(gts));
  }
}

std::size_t count_gts(const std::vector<std::vector<BBox>>& gts) {
  std::size_t n = 0;
  for (const auto& g : gts) n += g.size();
  return n;
}

std::vector<Ranked> pooled_ranking(const std::vector<std::vector<Detection>>& dets,
                                   const std::vector<std::vector<BBox>>& gts, double iou_thr) {
  std::vector<Ranked> ranked;
  for (std::size_t img = 0; img < dets.size(); ++img) {
    const MatchResult m = match_greedy(dets[img], gts[img], iou_thr);
    for (std::size_t i = 0; i < dets[img].size(); ++i) ranked.push_back({dets[img][i].confidence, m.true_positive[i]});
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Ranked& a, const Ranked& b) { return a.confidence > b.confidence; });
  return ranked;
}

double interpolated_ap(const std::vector<Ranked>& ranked, std::size_t n_gt) {
  std::vector<double> precision(ranked.size());
  std::vector<double> recall(ranked.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (ranked[k].tp) ++tp;
    precision[k] = static_cast<double>(tp) / static_cast<double>(k + 1);
    recall[k] = static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  // Running max from the tail makes precision[k] the best precision at recall >= recall[k].
  for (std::size_t k = ranked.size(); k-- > 1;) precision[k - 1] = std::max(precision[k - 1], precision[k]);
  double sum = 0.0;
  std::size_t k = 0;
  for (int step = 0; step <= 100; ++step) {
    const double r = step / 100.0;
    while (k < recall.size() && recall[k] < r) ++k;
    if (k == recall.size()) break;
    sum += precision[k];
  }
  return sum / 101.0;
}

ConfusionMatrix finish_confusion(ConfusionMatrix m) {
  for (int r = 0; r < 2; ++r) {
    const double support = m.counts[r][0] + m.counts[r][1];
    m.zero_support[r] = support == 0.0;
    for (int c = 0; c < 2; ++c) m.normalized[r][c] = support == 0.0 ? 0.0 : m.counts[r][c] / support;
  }
  return m;
}

}  // namespace

double iou(const BBox& a, const BBox& b) noexcept {
  const double iw = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double ih = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (iw <= 0 || ih <= 0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return uni > 0 ? inter / uni : 0.0;
}

double ciou(const BBox& a, const BBox& b) {
  if (!(a.w > 0 && a.h > 0 && b.w > 0 && b.h > 0)) {
    fail(ErrorKind::kInvalidArgument, "ciou requires boxes with positive width and height");
  }
  const double i = iou(a, b);
  const double dx = a.cx - b.cx;
  const double dy = a.cy - b.cy;
  const double rho2 = dx * dx + dy * dy;
  const double ew = std::max(a.x_max(), b.x_max()) - std::min(a.x_min(), b.x_min());
  const double eh = std::max(a.y_max(), b.y_max()) - std::min(a.y_min(), b.y_min());
  const double c2 = ew * ew + eh * eh;
  const double dv = std::atan(a.w / a.h) - std::atan(b.w / b.h);
  const double v = 4.0 / (std::numbers::pi * std::numbers::pi) * dv * dv;
  const double alpha = v == 0.0 ? 0.0 : v / ((1.0 - i) + v);
  return i - rho2 / c2 - alpha * v;
}

std::size_t MatchResult::tp_count() const noexcept {
  return static_cast<std::size_t>(std::count(true_positive.begin(), true_positive.end(), true));
}

MatchResult match_greedy(const std::vector<Detection>& dets, const std::vector<BBox>& gts, double iou_thr) {
  MatchResult m;
  m.true_positive.assign(dets.size(), false);
  m.matched_gt.assign(dets.size(), -1);
  std::vector<bool> taken(gts.size(), false);
  for (std::size_t d : confidence_order(dets)) {
    int best = -1;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (taken[g]) continue;
      const double v = iou(dets[d].box, gts[g]);
      if (v > best_iou) {
        best_iou = v;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou >= iou_thr) {
      taken[static_cast<std::size_t>(best)] = true;
      m.true_positive[d] = true;
      m.matched_gt[d] = best;
    }
  }
  m.false_negatives = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
  return m;
}

double average_precision(const std::vector<std::vector<Detection>>& dets_per_image,
                         const std::vector<std::vector<BBox>>& gts_per_image, double iou_thr) {
  check_images(dets_per_image.size(), gts_per_image.size());
  const std::size_t n_gt = count_gts(gts_per_image);
  if (n_gt == 0) fail(ErrorKind::kUndefinedAp, "average precision is undefined without ground truth boxes");
  return interpolated_ap(pooled_ranking(dets_per_image, gts_per_image, iou_thr), n_gt);
}

double average_precision(const std::vector<Detection>& dets, const std::vector<BBox>& gts, double iou_thr) {
  return average_precision(std::vector<std::vector<Detection>>{dets}, std::vector<std::vector<BBox>>{gts}, iou_thr);
}

MapResult map_range(const std::vector<std::vector<Detection>>& dets_per_image,
                    const std::vector<std::vector<BBox>>& gts_per_image) {
  MapResult r;
  double sum = 0.0;
  for (int k = 0; k < 10; ++k) {
    r.per_threshold[static_cast<std::size_t>(k)] =
        average_precision(dets_per_image, gts_per_image, kMapIouThresholds[static_cast<std::size_t>(k)]);
    sum += r.per_threshold[static_cast<std::size_t>(k)];
  }
  r.map50 = r.per_threshold[0];
  r.map50_95 = sum / 10.0;
  return r;
}

ConfidenceCurves confidence_curves(const std::vector<std::vector<Detection>>& dets_per_image,
                                   const std::vector<std::vector<BBox>>& gts_per_image, double iou_thr) {
  check_images(dets_per_image.size(), gts_per_image.size());
  const std::size_t n_gt = count_gts(gts_per_image);
  // Greedy matching visits detections by confidence, so a threshold only
  // truncates the match sequence; one matching per image serves every threshold.
  const std::vector<Ranked> ranked = pooled_ranking(dets_per_image, gts_per_image, iou_thr);

  std::vector<double> thresholds = {0.0, 1.0};
  for (const auto& r : ranked) thresholds.push_back(r.confidence);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  ConfidenceCurves out;
  for (double t : thresholds) {
    std::size_t kept = 0;
    std::size_t tp = 0;
    for (const auto& r : ranked) {
      if (r.confidence >= t) {
        ++kept;
        if (r.tp) ++tp;
      }
    }
    const double p = kept == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(kept);
    const double rc = n_gt == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(n_gt);
    const double f = p + rc == 0.0 ? 0.0 : 2.0 * p * rc / (p + rc);
    out.precision.points.push_back({t, p});
    out.recall.points.push_back({t, rc});
    out.f1.points.push_back({t, f});
  }
  int best = 0;
  for (std::size_t i = 1; i < out.f1.points.size(); ++i) {
    if (out.f1.points[i].y > out.f1.points[static_cast<std::size_t>(best)].y) best = static_cast<int>(i);
  }
  out.f1.argmax = best;
  out.optimal_threshold = out.f1.points[static_cast<std::size_t>(best)].x;
  out.optimal_f1 = out.f1.points[static_cast<std::size_t>(best)].y;
  return out;
}

ConfidenceCurves confidence_curves(const std::vector<Detection>& dets, const std::vector<BBox>& gts,
                                   double iou_thr) {
  return confidence_curves(std::vector<std::vector<Detection>>{dets}, std::vector<std::vector<BBox>>{gts}, iou_thr);
}

std::string ConfidenceCurves::to_csv() const {
  std::string out = "threshold,precision,recall,f1\n";
  char buf[128];
  for (std::size_t i = 0; i < f1.points.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g,%.9g\n", f1.points[i].x, precision.points[i].y,
                  recall.points[i].y, f1.points[i].y);
    out += buf;
  }
  return out;
}

ConfusionMatrix make_confusion(std::array<std::string, 2> labels, std::array<std::array<double, 2>, 2> counts) {
  ConfusionMatrix m;
  m.labels = std::move(labels);
  m.counts = counts;
  return finish_confusion(std::move(m));
}

std::string ConfusionMatrix::to_csv() const {
  std::string out = "truth,predicted,count,normalized\n";
  char buf[256];
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      std::snprintf(buf, sizeof(buf), "%s,%s,%.9g,%.9g\n", labels[r].c_str(), labels[c].c_str(), counts[r][c],
                    normalized[r][c]);
      out += buf;
    }
  }
  return out;
}

ConfusionMatrix detection_confusion(const std::vector<std::vector<Detection>>& dets_per_image,
                                    const std::vector<std::vector<BBox>>& gts_per_image, double conf_threshold,
                                    double iou_thr) {
  check_images(dets_per_image.size(), gts_per_image.size());
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t img = 0; img < dets_per_image.size(); ++img) {
    std::vector<Detection> kept;
    for (const auto& d : dets_per_image[img]) {
      if (d.confidence >= conf_threshold) kept.push_back(d);
    }
    const MatchResult m = match_greedy(kept, gts_per_image[img], iou_thr);
    tp += static_cast<double>(m.tp_count());
    fp += static_cast<double>(m.fp_count());
    fn += static_cast<double>(m.false_negatives);
  }
  return make_confusion({"vocal_cords", "background"}, {{{tp, fn}, {fp, 0.0}}});
}

ClassificationReport classification_report(const std::vector<double>& probs, const std::vector<int>& labels,
                                           double threshold) {
  if (probs.size() != labels.size()) {
    fail(ErrorKind::kInvalidArgument, "got " + std::to_string(probs.size()) + " probabilities for " +
                                          std::to_string(labels.size()) + " labels");
  }
  if (probs.empty()) fail(ErrorKind::kInvalidArgument, "classification report needs at least one prediction");
  std::array<std::array<double, 2>, 2> counts{};
  std::size_t positives = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1) fail(ErrorKind::kInvalidArgument, "labels must be 0 or 1");
    const int pred = probs[i] >= threshold ? 1 : 0;
    counts[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(pred)] += 1.0;
    if (labels[i] == 1) ++positives;
  }
  ClassificationReport rep;
  rep.confusion = make_confusion({"healthy", "paralyzed"}, counts);
  const double tp = counts[1][1], fp = counts[0][1], fn = counts[1][0], tn = counts[0][0];
  rep.accuracy = (tp + tn) / static_cast<double>(probs.size());
  rep.precision = tp + fp == 0.0 ? 1.0 : tp / (tp + fp);
  rep.recall = tp + fn == 0.0 ? 0.0 : tp / (tp + fn);
  rep.f1 = rep.precision + rep.recall == 0.0 ? 0.0 : 2.0 * rep.precision * rep.recall / (rep.precision + rep.recall);

  std::vector<double> thresholds = probs;
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  for (double t : thresholds) {
    double ptp = 0, pfp = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] >= t) (labels[i] == 1 ? ptp : pfp) += 1.0;
    }
    rep.pr_curve.push_back({t, ptp + pfp == 0.0 ? 1.0 : ptp / (ptp + pfp),
                            positives == 0 ? 0.0 : ptp / static_cast<double>(positives)});
  }
  return rep;
}

std::string ClassificationReport::pr_csv() const {
  std::string out = "threshold,precision,recall\n";
  char buf[128];
  for (const auto& p : pr_curve) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g\n", p.threshold, p.precision, p.recall);
    out += buf;
  }
  return out;
}

}  // namespace vipr
