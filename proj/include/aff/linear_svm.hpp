#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace aff {

/// L2-regularized L1-loss linear SVM.
struct LinearSvm {
  std::vector<double> w;
  double bias = 0.0;

  double decision(const float* x, size_t dim) const {
    double s = bias;
    for (size_t i = 0; i < dim && i < w.size(); ++i) s += w[i] * x[i];
    return s;
  }
};

struct SvmParams {
  double C = 0.1;
  int epochs = 60;
  uint64_t seed = 7;
};

/// Dual coordinate descent (shrinking-free). Deterministic under the
/// seed. The bias is learned through an appended constant feature.
LinearSvm train_linear_svm(const std::vector<const float*>& positives,
                           const std::vector<const float*>& negatives,
                           size_t dim, const SvmParams& params = {});

/// Primal objective 0.5*|w|^2 + C * sum hinge, with the bias included in
/// the regularizer the same way training treats it.
double svm_primal_objective(const LinearSvm& svm,
                            const std::vector<const float*>& positives,
                            const std::vector<const float*>& negatives,
                            size_t dim, double C);

}  // namespace aff
