#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "vipr/labels.hpp"

namespace vipr {

struct Detection {
  BBox box;
  double confidence = 0.0;
};

double iou(const BBox& a, const BBox& b) noexcept;

/// Complete IoU. Throws kInvalidArgument for a box with zero width or height.
double ciou(const BBox& a, const BBox& b);

struct MatchResult {
  std::vector<bool> true_positive;  // indexed like the input detections
  std::vector<int> matched_gt;      // -1 for false positives
  std::size_t false_negatives = 0;

  std::size_t tp_count() const noexcept;
  std::size_t fp_count() const noexcept { return true_positive.size() - tp_count(); }
};

/// Detections in descending confidence (stable on ties) each claim the unmatched
/// ground truth of highest IoU, lowest index on ties, when that IoU >= iou_thr.
MatchResult match_greedy(const std::vector<Detection>& dets, const std::vector<BBox>& gts, double iou_thr);

/// 101-point interpolated AP. Images are matched independently and then pooled
/// by confidence; ties keep image order, then detection order.
double average_precision(const std::vector<std::vector<Detection>>& dets_per_image,
                         const std::vector<std::vector<BBox>>& gts_per_image, double iou_thr);
double average_precision(const std::vector<Detection>& dets, const std::vector<BBox>& gts, double iou_thr);

struct MapResult {
  double map50 = 0.0;
  double map50_95 = 0.0;
  std::array<double, 10> per_threshold{};  // AP at 0.50, 0.55, ..., 0.95
};

MapResult map_range(const std::vector<std::vector<Detection>>& dets_per_image,
                    const std::vector<std::vector<BBox>>& gts_per_image);

inline constexpr std::array<double, 10> kMapIouThresholds = {0.50, 0.55, 0.60, 0.65, 0.70,
                                                            0.75, 0.80, 0.85, 0.90, 0.95};

struct CurvePoint {
  double x = 0.0;
  double y = 0.0;
};

struct Curve {
  std::vector<CurvePoint> points;  // x strictly increasing
  int argmax = -1;
};

struct ConfidenceCurves {
  Curve precision;
  Curve recall;
  Curve f1;
  double optimal_threshold = 0.0;
  double optimal_f1 = 0.0;

  std::string to_csv() const;  // threshold,precision,recall,f1
};

/// Sweeps thresholds over {0, 1} and every distinct confidence. Precision is 1
/// when no detection survives the threshold; F1 ties pick the lower threshold.
ConfidenceCurves confidence_curves(const std::vector<std::vector<Detection>>& dets_per_image,
                                   const std::vector<std::vector<BBox>>& gts_per_image, double iou_thr);
ConfidenceCurves confidence_curves(const std::vector<Detection>& dets, const std::vector<BBox>& gts,
                                   double iou_thr);

struct ConfusionMatrix {
  std::array<std::string, 2> labels;
  std::array<std::array<double, 2>, 2> counts{};  // [truth][predicted]
  std::array<std::array<double, 2>, 2> normalized{};
  std::array<bool, 2> zero_support{};

  std::string to_csv() const;
};

ConfusionMatrix make_confusion(std::array<std::string, 2> labels, std::array<std::array<double, 2>, 2> counts);

/// Rows: vocal cords, background. Columns: vocal cords, background.
ConfusionMatrix detection_confusion(const std::vector<std::vector<Detection>>& dets_per_image,
                                    const std::vector<std::vector<BBox>>& gts_per_image, double conf_threshold,
                                    double iou_thr);

struct PrPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct ClassificationReport {
  ConfusionMatrix confusion;  // rows: healthy, paralyzed
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<PrPoint> pr_curve;

  std::string pr_csv() const;  // threshold,precision,recall
};

/// Paralyzed (label 1) is the positive class; prob >= threshold predicts it.
ClassificationReport classification_report(const std::vector<double>& probs, const std::vector<int>& labels,
                                           double threshold = 0.5);

}  // namespace vipr
