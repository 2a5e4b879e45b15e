#pragma once

#include <cstddef>
#include <vector>

#include "aff/rng.hpp"

namespace aff {

struct KmeansResult {
  std::vector<int> assignment;               // per sample, -1 never happens
  std::vector<std::vector<float>> centers;   // k x dim (empty clusters removed)
};

/// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed
/// Rng state; ties break toward the lowest center index. Empty clusters
/// are dropped from the result, so centers.size() may be < k.
KmeansResult kmeans(const std::vector<const float*>& samples, size_t dim,
                    int k, Rng& rng, int max_iters = 50);

}  // namespace aff
