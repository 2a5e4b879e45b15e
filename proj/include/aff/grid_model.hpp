#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aff/image.hpp"
#include "aff/labeler.hpp"

namespace aff {

/// Fixed whole-image feature pipeline: two HOG scales plus per-block
/// color means, all computed on a resized canonical frame.
struct GridFeatureConfig {
  int canon_px = 128;     // canonical frame, both dimensions
  int hog_cell = 8;
  int coarse_px = 64;     // second HOG scale
  int color_grid = 16;    // color pooling blocks per side
  bool operator==(const GridFeatureConfig&) const = default;
};

size_t grid_feature_dim(const GridFeatureConfig& fc);
std::vector<float> extract_grid_features(const ImageRgb& image,
                                         const GridFeatureConfig& fc);

/// Linear map from image features to an m x n grid of binary logistic
/// predictions for one affordance.
struct GridModel {
  std::string affordance;
  GridFeatureConfig features;
  int m = 50, n = 50;
  // (m*n) x (dim+1), row-major, last column is the bias.
  std::vector<double> weights;

  void init(const std::string& affordance_name, int m_, int n_,
            const GridFeatureConfig& fc);
  size_t outputs() const { return static_cast<size_t>(m) * n; }
  size_t stride() const { return grid_feature_dim(features) + 1; }
};

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 16;
  int epochs = 25;
  uint64_t seed = 1;
  double weight_decay = 1e-5;
};

/// Targets on the output grid: 1/0 with -1 for unknown cells (majority
/// vote per cell; unknown when over half the pixels are unknown).
struct GridTarget {
  int m = 0, n = 0;
  std::vector<int8_t> cells;
};

GridTarget make_grid_target(const AffordanceMap& map, int m, int n);

struct GridExample {
  std::vector<float> features;
  GridTarget target;
};

/// Summed binary logistic loss over known cells and its exact gradient
/// w.r.t. every weight. Unknown cells contribute nothing. Throws
/// NonFiniteLoss if the loss stops being finite.
double loss_and_grad(const GridModel& model, const std::vector<float>& feats,
                     const GridTarget& target, std::vector<double>& grad);

/// Minibatch SGD with momentum; deterministic under the seed. Appends the
/// mean per-example loss of each epoch to loss_curve.
void train_grid_model(GridModel& model, const std::vector<GridExample>& data,
                      const TrainConfig& config,
                      std::vector<double>* loss_curve = nullptr);

/// Sigmoid probabilities on the m x n grid, bilinearly upsampled to the
/// image size (cell centers preserved). Throws ImageTooSmall.
ImageF predict(const GridModel& model, const ImageRgb& image);

/// Probability grid before upsampling.
ImageF predict_grid(const GridModel& model, const ImageRgb& image);

ImageF upsample_bilinear(const ImageF& grid, int width, int height);

void save_grid_models(const std::vector<GridModel>& models,
                      const std::string& path);
std::vector<GridModel> load_grid_models(const std::string& path);

}  // namespace aff
