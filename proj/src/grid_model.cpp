#include "aff/grid_model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "aff/errors.hpp"
#include "aff/hog.hpp"
#include "aff/rng.hpp"

namespace aff {

size_t grid_feature_dim(const GridFeatureConfig& fc) {
  const size_t fine = static_cast<size_t>(fc.canon_px / fc.hog_cell) *
                      (fc.canon_px / fc.hog_cell) * 9;
  const size_t coarse = static_cast<size_t>(fc.coarse_px / fc.hog_cell) *
                        (fc.coarse_px / fc.hog_cell) * 9;
  const size_t color =
      static_cast<size_t>(fc.color_grid) * fc.color_grid * 3;
  return fine + coarse + color;
}

std::vector<float> extract_grid_features(const ImageRgb& image,
                                         const GridFeatureConfig& fc) {
  if (image.width() < 16 || image.height() < 16)
    throw ImageTooSmall("image below the feature extractor minimum");
  const ImageRgb canon = resize_bilinear_rgb(image, fc.canon_px, fc.canon_px);
  const ImageF gray = to_gray(canon);

  std::vector<float> out;
  out.reserve(grid_feature_dim(fc));

  const HogDescriptor fine = compute_hog(gray);
  out.insert(out.end(), fine.values.begin(), fine.values.end());
  const ImageF small = resize_bilinear(gray, fc.coarse_px, fc.coarse_px);
  const HogDescriptor coarse = compute_hog(small);
  out.insert(out.end(), coarse.values.begin(), coarse.values.end());

  const int block = fc.canon_px / fc.color_grid;
  for (int gy = 0; gy < fc.color_grid; ++gy)
    for (int gx = 0; gx < fc.color_grid; ++gx) {
      double r = 0, g = 0, b = 0;
      for (int y = gy * block; y < (gy + 1) * block; ++y)
        for (int x = gx * block; x < (gx + 1) * block; ++x) {
          r += canon.at(x, y).r;
          g += canon.at(x, y).g;
          b += canon.at(x, y).b;
        }
      const double inv = 1.0 / (255.0 * block * block);
      out.push_back(static_cast<float>(r * inv));
      out.push_back(static_cast<float>(g * inv));
      out.push_back(static_cast<float>(b * inv));
    }
  return out;
}

void GridModel::init(const std::string& affordance_name, int m_, int n_,
                     const GridFeatureConfig& fc) {
  affordance = affordance_name;
  m = m_;
  n = n_;
  features = fc;
  weights.assign(outputs() * stride(), 0.0);
}

GridTarget make_grid_target(const AffordanceMap& map, int m, int n) {
  GridTarget t;
  t.m = m;
  t.n = n;
  t.cells.assign(static_cast<size_t>(m) * n, -1);
  const int W = map.labels.width(), H = map.labels.height();
  for (int gy = 0; gy < m; ++gy)
    for (int gx = 0; gx < n; ++gx) {
      const int x0 = gx * W / n, x1 = (gx + 1) * W / n;
      const int y0 = gy * H / m, y1 = (gy + 1) * H / m;
      int sup = 0, neg = 0, unk = 0;
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) {
          switch (map.labels.at(x, y)) {
            case TriState::Supports: ++sup; break;
            case TriState::Not: ++neg; break;
            case TriState::Unknown: ++unk; break;
          }
        }
      const int total = sup + neg + unk;
      int8_t v = -1;
      if (total > 0 && unk * 2 <= total && sup != neg)
        v = sup > neg ? 1 : 0;
      t.cells[static_cast<size_t>(gy) * n + gx] = v;
    }
  return t;
}

namespace {

// log(1 + e^z) without overflow
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}
double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                : std::exp(z) / (1.0 + std::exp(z));
}

}  // namespace

double loss_and_grad(const GridModel& model, const std::vector<float>& feats,
                     const GridTarget& target, std::vector<double>& grad) {
  if (target.m != model.m || target.n != model.n)
    throw PipelineError("target grid does not match the model");
  const size_t dim = grid_feature_dim(model.features);
  const size_t stride = model.stride();
  grad.assign(model.weights.size(), 0.0);

  double loss = 0.0;
  for (size_t o = 0; o < model.outputs(); ++o) {
    const int8_t y = target.cells[o];
    if (y < 0) continue;
    const double* w = model.weights.data() + o * stride;
    double z = w[dim];  // bias
    for (size_t d = 0; d < dim; ++d) z += w[d] * feats[d];
    // y*log f + (1-y)*log(1-f), negated, in stable form
    loss += y ? softplus(-z) : softplus(z);
    const double dz = sigmoid(z) - y;
    double* g = grad.data() + o * stride;
    for (size_t d = 0; d < dim; ++d) g[d] += dz * feats[d];
    g[dim] += dz;
  }
  if (!std::isfinite(loss)) throw NonFiniteLoss("loss overflowed");
  return loss;
}

void train_grid_model(GridModel& model, const std::vector<GridExample>& data,
                      const TrainConfig& config,
                      std::vector<double>* loss_curve) {
  if (data.empty()) return;
  Rng rng(config.seed);
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  std::vector<double> velocity(model.weights.size(), 0.0);
  std::vector<double> grad, batch_grad(model.weights.size(), 0.0);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    size_t i = 0;
    while (i < order.size()) {
      const size_t batch_end =
          std::min(order.size(), i + static_cast<size_t>(config.batch_size));
      std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
      const double inv = 1.0 / static_cast<double>(batch_end - i);
      for (; i < batch_end; ++i) {
        const GridExample& ex = data[order[i]];
        epoch_loss += loss_and_grad(model, ex.features, ex.target, grad);
        for (size_t k = 0; k < grad.size(); ++k) batch_grad[k] += grad[k];
      }
      for (size_t k = 0; k < model.weights.size(); ++k) {
        const double g =
            batch_grad[k] * inv + config.weight_decay * model.weights[k];
        velocity[k] = config.momentum * velocity[k] - config.learning_rate * g;
        model.weights[k] += velocity[k];
      }
    }
    if (loss_curve) loss_curve->push_back(epoch_loss / data.size());
  }
}

ImageF predict_grid(const GridModel& model, const ImageRgb& image) {
  const std::vector<float> feats =
      extract_grid_features(image, model.features);
  const size_t dim = grid_feature_dim(model.features);
  const size_t stride = model.stride();
  ImageF grid(model.n, model.m);
  for (size_t o = 0; o < model.outputs(); ++o) {
    const double* w = model.weights.data() + o * stride;
    double z = w[dim];
    for (size_t d = 0; d < dim; ++d) z += w[d] * feats[d];
    grid.at(static_cast<int>(o % model.n), static_cast<int>(o / model.n)) =
        static_cast<float>(sigmoid(z));
  }
  return grid;
}

ImageF upsample_bilinear(const ImageF& grid, int width, int height) {
  ImageF out(width, height);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const float gx = (x + 0.5f) * grid.width() / width - 0.5f;
      const float gy = (y + 0.5f) * grid.height() / height - 0.5f;
      out.at(x, y) = bilinear_sample(grid, gx, gy);
    }
  return out;
}

ImageF predict(const GridModel& model, const ImageRgb& image) {
  return upsample_bilinear(predict_grid(model, image), image.width(),
                           image.height());
}

namespace {
constexpr char kModelMagic[4] = {'A', 'G', 'M', '1'};
}

void save_grid_models(const std::vector<GridModel>& models,
                      const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(kModelMagic, 4);
  const uint32_t count = static_cast<uint32_t>(models.size());
  os.write(reinterpret_cast<const char*>(&count), 4);
  for (const GridModel& m : models) {
    const uint32_t len = static_cast<uint32_t>(m.affordance.size());
    os.write(reinterpret_cast<const char*>(&len), 4);
    os.write(m.affordance.data(), len);
    const int32_t ints[7] = {m.m,
                             m.n,
                             m.features.canon_px,
                             m.features.hog_cell,
                             m.features.coarse_px,
                             m.features.color_grid,
                             0};
    os.write(reinterpret_cast<const char*>(ints), sizeof(ints));
    const uint64_t wn = m.weights.size();
    os.write(reinterpret_cast<const char*>(&wn), 8);
    os.write(reinterpret_cast<const char*>(m.weights.data()),
             static_cast<std::streamsize>(wn * sizeof(double)));
  }
  if (!os) throw IoError("short write to " + path);
}

std::vector<GridModel> load_grid_models(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kModelMagic, 4) != 0)
    throw IoError("not a grid model file: " + path);
  uint32_t count = 0;
  is.read(reinterpret_cast<char*>(&count), 4);
  std::vector<GridModel> models(count);
  for (GridModel& m : models) {
    uint32_t len = 0;
    is.read(reinterpret_cast<char*>(&len), 4);
    m.affordance.resize(len);
    is.read(m.affordance.data(), len);
    int32_t ints[7];
    is.read(reinterpret_cast<char*>(ints), sizeof(ints));
    m.m = ints[0];
    m.n = ints[1];
    m.features.canon_px = ints[2];
    m.features.hog_cell = ints[3];
    m.features.coarse_px = ints[4];
    m.features.color_grid = ints[5];
    uint64_t wn = 0;
    is.read(reinterpret_cast<char*>(&wn), 8);
    m.weights.resize(wn);
    is.read(reinterpret_cast<char*>(m.weights.data()),
            static_cast<std::streamsize>(wn * sizeof(double)));
  }
  if (!is) throw IoError("truncated grid model file: " + path);
  return models;
}

}  // namespace aff
