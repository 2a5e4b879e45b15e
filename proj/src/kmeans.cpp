#include "aff/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aff {

namespace {

double sq_dist(const float* a, const float* b, size_t dim) {
  double s = 0;
  for (size_t i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

KmeansResult kmeans(const std::vector<const float*>& samples, size_t dim,
                    int k, Rng& rng, int max_iters) {
  const size_t n = samples.size();
  k = std::min<int>(k, static_cast<int>(n));

  // k-means++ seeding
  std::vector<std::vector<float>> centers;
  centers.reserve(k);
  {
    const size_t first = rng.uniform_index(n);
    centers.emplace_back(samples[first], samples[first] + dim);
    std::vector<double> d2(n);
    while (static_cast<int>(centers.size()) < k) {
      double total = 0;
      for (size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& c : centers)
          best = std::min(best, sq_dist(samples[i], c.data(), dim));
        d2[i] = best;
        total += best;
      }
      size_t pick = 0;
      if (total <= 0) {
        pick = rng.uniform_index(n);  // all points coincide with centers
      } else {
        double r = rng.uniform() * total;
        for (; pick + 1 < n; ++pick) {
          r -= d2[pick];
          if (r <= 0) break;
        }
      }
      centers.emplace_back(samples[pick], samples[pick] + dim);
    }
  }

  std::vector<int> assign(n, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      int bi = 0;
      for (size_t c = 0; c < centers.size(); ++c) {
        const double d = sq_dist(samples[i], centers[c].data(), dim);
        if (d < best) {
          best = d;
          bi = static_cast<int>(c);
        }
      }
      if (assign[i] != bi) {
        assign[i] = bi;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;

    std::vector<std::vector<double>> sums(
        centers.size(), std::vector<double>(dim, 0.0));
    std::vector<size_t> counts(centers.size(), 0);
    for (size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (size_t d = 0; d < dim; ++d) sums[assign[i]][d] += samples[i][d];
    }
    for (size_t c = 0; c < centers.size(); ++c) {
      if (counts[c] == 0) continue;  // keep old center
      for (size_t d = 0; d < dim; ++d)
        centers[c][d] = static_cast<float>(sums[c][d] / counts[c]);
    }
  }

  // Compact away empty clusters.
  std::vector<size_t> counts(centers.size(), 0);
  for (int a : assign) ++counts[a];
  std::vector<int> remap(centers.size(), -1);
  KmeansResult result;
  for (size_t c = 0; c < centers.size(); ++c) {
    if (counts[c] == 0) continue;
    remap[c] = static_cast<int>(result.centers.size());
    result.centers.push_back(std::move(centers[c]));
  }
  result.assignment.resize(n);
  for (size_t i = 0; i < n; ++i) result.assignment[i] = remap[assign[i]];
  return result;
}

}  // namespace aff
