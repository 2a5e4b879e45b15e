#pragma once

#include <array>
#include <string>
#include <vector>

#include "aff/image.hpp"
#include "aff/labeler.hpp"

namespace aff {

/// Precision-recall curve over descending score thresholds, summarized by
/// non-interpolated average precision (every positive contributes the
/// precision at its rank).
struct PRCurve {
  struct Point {
    double threshold;
    double recall;
    double precision;
  };
  std::vector<Point> points;
  double ap = 0.0;
  size_t n_known = 0;
  size_t n_positive = 0;
};

/// Core ranking computation on flat arrays (truth: true = positive).
/// Tied scores form one threshold group. Throws NoPositives.
PRCurve pr_curve_from_pairs(const std::vector<double>& scores,
                            const std::vector<bool>& truth);

/// Pixel-map wrapper: Unknown truth pixels are excluded before ranking.
PRCurve pr_curve(const ImageF& scores, const AffordanceMap& truth);

/// Threshold (from the observed score set) maximizing the Jaccard index
/// of {score >= t} against the positive mask; ties resolve to the lowest
/// such threshold. Throws NoPositives.
double select_threshold_jaccard(const std::vector<double>& scores,
                                const std::vector<bool>& truth);
double select_threshold_jaccard(const ImageF& scores,
                                const AffordanceMap& truth);

double jaccard_at_threshold(const std::vector<double>& scores,
                            const std::vector<bool>& truth, double threshold);

/// Published NYUv2 average-precision figures for the five affordances
/// (direct predictors; context only — the synthetic suite in this repo is
/// not comparable and tests never target these numbers).
struct ReferenceAp {
  const char* affordance;
  double cnn;
  double midlevel;
};
inline constexpr std::array<ReferenceAp, 5> kReferenceNyuAp = {{
    {"standing", 88.55, 83.81},
    {"sitting_upright", 37.34, 31.95},
    {"reach_feet", 68.40, 71.70},
    {"reach_hand", 50.70, 56.56},
    {"lying", 82.10, 76.04},
}};

/// Write "affordance,ap,n_known,n_positive" rows.
void write_report_csv(const std::string& path,
                      const std::vector<std::pair<std::string, PRCurve>>& rows);

/// PR curve as CSV (threshold,recall,precision) and as a small SVG plot.
void write_pr_csv(const std::string& path, const PRCurve& curve);
void write_pr_svg(const std::string& path, const PRCurve& curve,
                  const std::string& title);

}  // namespace aff
