#include "aff/weibull.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aff/errors.hpp"

namespace aff {

double WeibullCalibration::calibrate(double raw) const {
  const double x = raw - location;
  if (x <= 0.0) return 0.0;
  return 1.0 - std::exp(-std::pow(x / scale, shape));
}

WeibullCalibration fit_weibull_tail(std::vector<double> scores,
                                    double tail_fraction, size_t min_tail) {
  if (scores.size() < 2) throw DegenerateFit("need at least two scores");
  std::sort(scores.begin(), scores.end());
  const double range = scores.back() - scores.front();
  if (range < 1e-12) throw DegenerateFit("scores are constant");

  size_t tail_n = std::max<size_t>(
      min_tail, static_cast<size_t>(tail_fraction * scores.size()));
  tail_n = std::min(tail_n, scores.size());
  std::vector<double> tail(scores.end() - tail_n, scores.end());
  if (tail.back() - tail.front() < 1e-12)
    throw DegenerateFit("score tail is constant");

  WeibullCalibration cal;
  cal.location = tail.front() - 1e-6 * std::max(1.0, range);

  std::vector<double> x(tail.size()), lx(tail.size());
  for (size_t i = 0; i < tail.size(); ++i) {
    x[i] = tail[i] - cal.location;
    lx[i] = std::log(x[i]);
  }
  const double mean_lx =
      std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();

  // MLE profile equation for the shape, solved by bisection (the
  // function is increasing in k).
  auto g = [&](double k) {
    double sw = 0, swl = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double p = std::pow(x[i], k);
      sw += p;
      swl += p * lx[i];
    }
    return swl / sw - 1.0 / k - mean_lx;
  };

  double lo = 1e-2, hi = 1e3;
  double glo = g(lo);
  if (glo > 0) {
    cal.shape = lo;
  } else {
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (g(mid) > 0) hi = mid;
      else lo = mid;
      if (hi - lo < 1e-10 * hi) break;
    }
    cal.shape = 0.5 * (lo + hi);
  }

  double sw = 0;
  for (double xi : x) sw += std::pow(xi, cal.shape);
  cal.scale = std::pow(sw / x.size(), 1.0 / cal.shape);
  if (!(cal.shape > 0) || !(cal.scale > 0))
    throw DegenerateFit("ill-conditioned tail");
  return cal;
}

}  // namespace aff
