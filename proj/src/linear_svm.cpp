#include "aff/linear_svm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aff/rng.hpp"

namespace aff {

namespace {
constexpr double kBiasScale = 1.0;  // constant feature value
}

LinearSvm train_linear_svm(const std::vector<const float*>& positives,
                           const std::vector<const float*>& negatives,
                           size_t dim, const SvmParams& params) {
  const size_t n = positives.size() + negatives.size();
  std::vector<const float*> xs;
  xs.reserve(n);
  std::vector<double> ys;
  ys.reserve(n);
  for (const float* p : positives) {
    xs.push_back(p);
    ys.push_back(1.0);
  }
  for (const float* p : negatives) {
    xs.push_back(p);
    ys.push_back(-1.0);
  }

  std::vector<double> w(dim + 1, 0.0);  // last entry = bias
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qii(n);
  for (size_t i = 0; i < n; ++i) {
    double q = kBiasScale * kBiasScale;
    for (size_t d = 0; d < dim; ++d)
      q += static_cast<double>(xs[i][d]) * xs[i][d];
    qii[i] = q;
  }

  Rng rng(params.seed);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < params.epochs; ++epoch) {
    rng.shuffle(order);
    double max_step = 0.0;
    for (size_t idx : order) {
      double g = kBiasScale * w[dim];
      for (size_t d = 0; d < dim; ++d) g += w[d] * xs[idx][d];
      g = g * ys[idx] - 1.0;

      const double old_a = alpha[idx];
      double a = old_a - g / qii[idx];
      a = std::clamp(a, 0.0, params.C);
      const double delta = a - old_a;
      if (delta == 0.0) continue;
      alpha[idx] = a;
      const double dy = delta * ys[idx];
      for (size_t d = 0; d < dim; ++d) w[d] += dy * xs[idx][d];
      w[dim] += dy * kBiasScale;
      max_step = std::max(max_step, std::abs(delta));
    }
    if (max_step < 1e-8) break;
  }

  LinearSvm svm;
  svm.w.assign(w.begin(), w.begin() + dim);
  svm.bias = w[dim] * kBiasScale;
  return svm;
}

double svm_primal_objective(const LinearSvm& svm,
                            const std::vector<const float*>& positives,
                            const std::vector<const float*>& negatives,
                            size_t dim, double C) {
  double reg = svm.bias * svm.bias;
  for (double v : svm.w) reg += v * v;
  double hinge = 0.0;
  for (const float* x : positives)
    hinge += std::max(0.0, 1.0 - svm.decision(x, dim));
  for (const float* x : negatives)
    hinge += std::max(0.0, 1.0 + svm.decision(x, dim));
  return 0.5 * reg + C * hinge;
}

}  // namespace aff
