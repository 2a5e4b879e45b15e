#pragma once

#include <vector>

namespace aff {

/// Extreme-value calibration of raw detection scores: a Weibull fit to
/// the top tail of negative-set scores. The calibrated score is the CDF
/// at the raw score — the probability of exceeding the negative tail —
/// so it increases monotonically from ~0 (deep inside the negatives) to
/// ~1 (above every negative).
struct WeibullCalibration {
  double shape = 1.0;
  double scale = 1.0;
  double location = 0.0;

  double calibrate(double raw) const;
};

/// Fit to the upper `tail_fraction` of the scores (at least min_tail of
/// them). Throws DegenerateFit when the scores carry no spread.
WeibullCalibration fit_weibull_tail(std::vector<double> scores,
                                    double tail_fraction = 0.5,
                                    size_t min_tail = 50);

}  // namespace aff
