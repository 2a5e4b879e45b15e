#include "aff/elements.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "aff/errors.hpp"
#include "aff/kmeans.hpp"

namespace aff {

namespace {

// Integral images of Supports/Not counts for O(1) window coverage.
struct LabelIntegral {
  int w = 0, h = 0;
  std::vector<int32_t> sup, neg;

  explicit LabelIntegral(const AffordanceMap& map) {
    w = map.labels.width();
    h = map.labels.height();
    sup.assign(static_cast<size_t>(w + 1) * (h + 1), 0);
    neg.assign(static_cast<size_t>(w + 1) * (h + 1), 0);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const size_t i = static_cast<size_t>(y + 1) * (w + 1) + (x + 1);
        const size_t up = i - (w + 1);
        sup[i] = sup[i - 1] + sup[up] - sup[up - 1] +
                 (map.labels.at(x, y) == TriState::Supports);
        neg[i] = neg[i - 1] + neg[up] - neg[up - 1] +
                 (map.labels.at(x, y) == TriState::Not);
      }
  }

  static int32_t box(const std::vector<int32_t>& ii, int w1, int x, int y,
                     int bw, int bh) {
    const size_t a = static_cast<size_t>(y) * w1 + x;
    const size_t b = static_cast<size_t>(y) * w1 + (x + bw);
    const size_t c = static_cast<size_t>(y + bh) * w1 + x;
    const size_t d = static_cast<size_t>(y + bh) * w1 + (x + bw);
    return ii[d] - ii[b] - ii[c] + ii[a];
  }

  int32_t supports(int x, int y, int bw, int bh) const {
    return box(sup, w + 1, x, y, bw, bh);
  }
  int32_t nots(int x, int y, int bw, int bh) const {
    return box(neg, w + 1, x, y, bw, bh);
  }
};

std::vector<int8_t> make_label_grid(const AffordanceMap& map, int x, int y,
                                    int size, int cells) {
  std::vector<int8_t> grid(static_cast<size_t>(cells) * cells, -1);
  for (int cy = 0; cy < cells; ++cy)
    for (int cx = 0; cx < cells; ++cx) {
      const int x0 = x + cx * size / cells;
      const int x1 = x + (cx + 1) * size / cells;
      const int y0 = y + cy * size / cells;
      const int y1 = y + (cy + 1) * size / cells;
      int sup = 0, neg = 0;
      for (int yy = y0; yy < y1; ++yy)
        for (int xx = x0; xx < x1; ++xx) {
          const TriState s = map.labels.at(xx, yy);
          if (s == TriState::Supports) ++sup;
          else if (s == TriState::Not) ++neg;
        }
      if (sup > neg) grid[static_cast<size_t>(cy) * cells + cx] = 1;
      else if (neg > sup) grid[static_cast<size_t>(cy) * cells + cx] = 0;
    }
  return grid;
}

Patch make_patch(const ImageF& gray, const AffordanceMap& map, int image_id,
                 int x, int y, int size, const ElementParams& params) {
  Patch p;
  p.image_id = image_id;
  p.x = x;
  p.y = y;
  p.size = size;
  ImageF crop(size, size);
  for (int yy = 0; yy < size; ++yy)
    for (int xx = 0; xx < size; ++xx)
      crop.at(xx, yy) = gray.at(x + xx, y + yy);
  const ImageF canon = resize_bilinear(crop, params.canon_px, params.canon_px);
  p.appearance = compute_hog(canon);
  p.label_grid = make_label_grid(map, x, y, size, params.canon_cells);
  return p;
}

std::vector<Patch> sample_windows(const std::vector<ImageRgb>& images,
                                  const std::vector<AffordanceMap>& labels,
                                  const ElementParams& params, Rng& rng,
                                  bool background) {
  std::vector<Patch> out;
  for (size_t i = 0; i < images.size(); ++i) {
    const ImageF gray = to_gray(images[i]);
    const LabelIntegral integral(labels[i]);
    const int W = images[i].width(), H = images[i].height();

    std::vector<int> sizes;
    for (double s = 1.0; s <= 2.01; s *= std::sqrt(2.0)) {
      const int sz = static_cast<int>(std::lround(params.canon_px * s));
      if (sz <= std::min(W, H)) sizes.push_back(sz);
    }
    if (sizes.empty()) continue;

    int kept = 0;
    for (int t = 0; t < params.samples_per_image; ++t) {
      const int size = sizes[rng.uniform_index(sizes.size())];
      const int x = static_cast<int>(rng.uniform_index(W - size + 1));
      const int y = static_cast<int>(rng.uniform_index(H - size + 1));
      const int32_t sup = integral.supports(x, y, size, size);
      const int32_t neg = integral.nots(x, y, size, size);
      const int32_t known = sup + neg;
      if (background) {
        if (sup != 0 || known < size * size / 2) continue;
      } else {
        if (known == 0 ||
            static_cast<double>(sup) / known < params.min_coverage)
          continue;
      }
      out.push_back(make_patch(gray, labels[i], static_cast<int>(i), x, y,
                               size, params));
      if (++kept >= 48) break;
    }
  }
  return out;
}

}  // namespace

std::vector<Patch> sample_patches(const std::vector<ImageRgb>& images,
                                  const std::vector<AffordanceMap>& labels,
                                  const ElementParams& params, Rng& rng) {
  std::vector<Patch> out = sample_windows(images, labels, params, rng, false);
  if (out.empty())
    throw NoQualifyingPatches("no window reaches the coverage threshold");
  return out;
}

std::vector<Patch> sample_background(const std::vector<ImageRgb>& images,
                                     const std::vector<AffordanceMap>& labels,
                                     const ElementParams& params, Rng& rng) {
  return sample_windows(images, labels, params, rng, true);
}

namespace {

// Jaccard agreement between two binary label grids over cells known in
// both; an empty union counts as full agreement.
double grid_jaccard(const std::vector<int8_t>& a,
                    const std::vector<int8_t>& b) {
  int inter = 0, uni = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] < 0 || b[i] < 0) continue;
    const bool pa = a[i] == 1, pb = b[i] == 1;
    if (pa && pb) ++inter;
    if (pa || pb) ++uni;
  }
  return uni == 0 ? 1.0 : static_cast<double>(inter) / uni;
}

double cluster_consistency(const std::vector<Patch>& patches,
                           const std::vector<int>& members) {
  if (members.size() < 2) return 1.0;
  double sum = 0;
  int pairs = 0;
  for (size_t i = 0; i < members.size(); ++i)
    for (size_t j = i + 1; j < members.size(); ++j) {
      sum += grid_jaccard(patches[members[i]].label_grid,
                          patches[members[j]].label_grid);
      ++pairs;
    }
  return sum / pairs;
}

}  // namespace

std::vector<Element> init_clusters(const std::vector<Patch>& patches,
                                   const ElementParams& params, Rng& rng) {
  std::vector<Element> out;
  std::vector<int> pool(patches.size());
  std::iota(pool.begin(), pool.end(), 0);

  for (int r = 0; r < params.restarts && !pool.empty(); ++r) {
    std::vector<const float*> feats;
    feats.reserve(pool.size());
    for (int idx : pool) feats.push_back(patches[idx].features().data());
    const size_t dim = patches[pool[0]].features().size();
    const KmeansResult km =
        kmeans(feats, dim, params.k_per_restart, rng);

    std::vector<std::vector<int>> clusters(km.centers.size());
    for (size_t i = 0; i < pool.size(); ++i)
      clusters[km.assignment[i]].push_back(pool[i]);

    const bool last = (r == params.restarts - 1);
    std::vector<int> next_pool;
    for (auto& members : clusters) {
      if (members.empty()) continue;
      const bool consistent =
          cluster_consistency(patches, members) >= params.consistency;
      if (last || consistent) {
        Element e;
        e.members = std::move(members);
        out.push_back(std::move(e));
      } else {
        next_pool.insert(next_pool.end(), members.begin(), members.end());
      }
    }
    pool = std::move(next_pool);
  }
  return out;
}

double label_delta(const std::vector<float>& form,
                   const std::vector<int8_t>& label_grid) {
  double sum = 0;
  int known = 0;
  for (size_t i = 0; i < label_grid.size(); ++i) {
    if (label_grid[i] < 0) continue;
    const double d = form[i] - label_grid[i];
    sum += d * d;
    ++known;
  }
  return known == 0 ? 0.0 : sum / known;
}

namespace {

std::vector<float> mean_form(const std::vector<Patch>& patches,
                             const std::vector<int>& members, size_t cells) {
  std::vector<float> form(cells, 0.5f);
  std::vector<int> counts(cells, 0);
  std::vector<double> sums(cells, 0.0);
  for (int m : members)
    for (size_t c = 0; c < cells; ++c) {
      const int8_t v = patches[m].label_grid[c];
      if (v < 0) continue;
      sums[c] += v;
      ++counts[c];
    }
  for (size_t c = 0; c < cells; ++c)
    if (counts[c] > 0) form[c] = static_cast<float>(sums[c] / counts[c]);
  return form;
}

double member_cost(const Element& e, const Patch& p, double C) {
  const double hinge = std::max(0.0, 1.0 - e.score(p));
  return C * hinge + label_delta(e.canonical_form, p.label_grid);
}

}  // namespace

double element_objective(const Element& e, const std::vector<Patch>& patches,
                         const std::vector<Patch>& background,
                         const ElementParams& params) {
  double reg = e.bias * e.bias;
  for (double v : e.w) reg += v * v;
  double obj = 0.5 * reg;
  for (int m : e.members) obj += member_cost(e, patches[m], params.svm_C);
  for (const Patch& b : background)
    obj += params.svm_C * std::max(0.0, 1.0 + e.score(b));
  return obj;
}

Element optimize_element(Element element, const std::vector<Patch>& patches,
                         const std::vector<Patch>& background,
                         const ElementParams& params, Rng& rng,
                         OptimizeTrace* trace) {
  if (element.members.empty())
    throw ClusterCollapsed("element has no members");
  const size_t dim = patches[element.members[0]].features().size();
  const size_t cells =
      static_cast<size_t>(params.canon_cells) * params.canon_cells;
  if (element.canonical_form.empty())
    element.canonical_form = mean_form(patches, element.members, cells);

  // Membership count is held fixed; selection swaps members only.
  const size_t target_size =
      std::min<size_t>(element.members.size(), params.cardinality_cap);

  SvmParams svm_params;
  svm_params.C = params.svm_C;

  for (int iter = 0; iter < params.iterations; ++iter) {
    // (a) detector update with hard negative mining over the background
    std::vector<const float*> pos;
    pos.reserve(element.members.size());
    for (int m : element.members) pos.push_back(patches[m].features().data());

    std::vector<size_t> active;
    const size_t want =
        std::min<size_t>(params.negatives_per_round, background.size());
    std::vector<size_t> bg_order(background.size());
    std::iota(bg_order.begin(), bg_order.end(), 0);
    rng.shuffle(bg_order);
    active.assign(bg_order.begin(), bg_order.begin() + want);

    LinearSvm svm;
    svm_params.seed = rng.next_u64();
    for (int round = 0; round < params.hard_negative_rounds; ++round) {
      std::vector<const float*> negs;
      negs.reserve(active.size());
      for (size_t b : active) negs.push_back(background[b].features().data());

      if (trace) {
        LinearSvm prev{element.w, element.bias};
        trace->svm_subproblem_before.push_back(
            svm_primal_objective(prev, pos, negs, dim, params.svm_C));
      }
      svm = train_linear_svm(pos, negs, dim, svm_params);
      if (trace)
        trace->svm_subproblem_after.push_back(
            svm_primal_objective(svm, pos, negs, dim, params.svm_C));
      element.w = svm.w;
      element.bias = svm.bias;

      if (round + 1 < params.hard_negative_rounds) {
        // Mine the highest-scoring background windows into the active set.
        std::vector<std::pair<double, size_t>> scored;
        scored.reserve(background.size());
        for (size_t b = 0; b < background.size(); ++b)
          scored.emplace_back(
              svm.decision(background[b].features().data(), dim), b);
        std::sort(scored.begin(), scored.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        std::vector<size_t> merged = active;
        for (const auto& [s, b] : scored) {
          if (merged.size() >= active.size() + want) break;
          if (s < -1.0) break;  // satisfied margin, nothing hard left
          if (std::find(merged.begin(), merged.end(), b) == merged.end())
            merged.push_back(b);
        }
        active = std::move(merged);
      }
    }
    if (trace)
      trace->objective_after_step.push_back(
          element_objective(element, patches, background, params));

    // (b) membership re-selection: lowest joint cost within the gate,
    // current members always eligible so the step never climbs.
    std::vector<std::pair<double, int>> candidates;
    for (size_t i = 0; i < patches.size(); ++i) {
      const double delta =
          label_delta(element.canonical_form, patches[i].label_grid);
      const bool is_member =
          std::find(element.members.begin(), element.members.end(),
                    static_cast<int>(i)) != element.members.end();
      if (delta > params.delta_bound && !is_member) continue;
      candidates.emplace_back(
          member_cost(element, patches[i], params.svm_C),
          static_cast<int>(i));
    }
    std::sort(candidates.begin(), candidates.end());
    const size_t take = std::min(target_size, candidates.size());
    if (take == 0) throw ClusterCollapsed("membership emptied");
    element.members.clear();
    for (size_t i = 0; i < take; ++i)
      element.members.push_back(candidates[i].second);
    std::sort(element.members.begin(), element.members.end());
    if (trace)
      trace->objective_after_step.push_back(
          element_objective(element, patches, background, params));

    // (c) canonical form: per-cell known mean (exact minimizer of the
    // squared disagreement)
    element.canonical_form = mean_form(patches, element.members, cells);
    if (trace)
      trace->objective_after_step.push_back(
          element_objective(element, patches, background, params));
  }
  return element;
}

Element calibrate(Element element,
                  const std::vector<double>& negative_scores) {
  if (negative_scores.size() < 50)
    throw DegenerateFit("calibration needs at least 50 negative scores");
  element.calibration = fit_weibull_tail(negative_scores);
  return element;
}

ImageF infer(const ImageRgb& image, const std::vector<Element>& elements,
             const ElementParams& params) {
  if (elements.empty()) throw PipelineError("no elements to run");
  const ImageF gray = to_gray(image);
  const int W = image.width(), H = image.height();

  std::vector<double> num(static_cast<size_t>(W) * H, 0.0);
  std::vector<double> den(static_cast<size_t>(W) * H, 0.0);

  const int cp = params.canon_px;
  const int cells = params.canon_cells;

  for (double scale = 1.0;; scale /= std::sqrt(2.0)) {
    const int sw = static_cast<int>(std::lround(W * scale));
    const int sh = static_cast<int>(std::lround(H * scale));
    if (sw < cp || sh < cp) break;
    const ImageF level =
        (sw == W && sh == H) ? gray : resize_bilinear(gray, sw, sh);
    const int stride = cp / cells;  // one canonical cell

    for (int wy = 0; wy + cp <= sh; wy += stride) {
      for (int wx = 0; wx + cp <= sw; wx += stride) {
        const HogDescriptor hog = extract_hog(level, wx, wy, cp, cp);
        for (const Element& e : elements) {
          double s = e.bias;
          for (size_t i = 0; i < hog.values.size() && i < e.w.size(); ++i)
            s += e.w[i] * hog.values[i];
          const double calib =
              e.calibration ? e.calibration->calibrate(s)
                            : 1.0 / (1.0 + std::exp(-s));
          if (calib < params.detection_floor) continue;

          // Paste the canonical form over the window footprint in the
          // original image.
          const double inv = 1.0 / scale;
          const int ox0 = static_cast<int>(std::floor(wx * inv));
          const int oy0 = static_cast<int>(std::floor(wy * inv));
          const int ox1 = std::min<int>(
              W, static_cast<int>(std::ceil((wx + cp) * inv)));
          const int oy1 = std::min<int>(
              H, static_cast<int>(std::ceil((wy + cp) * inv)));
          const double span_x = (ox1 - ox0), span_y = (oy1 - oy0);
          for (int py = oy0; py < oy1; ++py)
            for (int px = ox0; px < ox1; ++px) {
              const double fx = (px - ox0 + 0.5) / span_x * cells - 0.5;
              const double fy = (py - oy0 + 0.5) / span_y * cells - 0.5;
              const int cx0 = std::clamp(static_cast<int>(std::floor(fx)),
                                         0, cells - 1);
              const int cy0 = std::clamp(static_cast<int>(std::floor(fy)),
                                         0, cells - 1);
              const int cx1 = std::min(cx0 + 1, cells - 1);
              const int cy1 = std::min(cy0 + 1, cells - 1);
              const double ax = std::clamp(fx - cx0, 0.0, 1.0);
              const double ay = std::clamp(fy - cy0, 0.0, 1.0);
              const auto& F = e.canonical_form;
              const double f00 = F[static_cast<size_t>(cy0) * cells + cx0];
              const double f10 = F[static_cast<size_t>(cy0) * cells + cx1];
              const double f01 = F[static_cast<size_t>(cy1) * cells + cx0];
              const double f11 = F[static_cast<size_t>(cy1) * cells + cx1];
              const double f = f00 * (1 - ax) * (1 - ay) +
                               f10 * ax * (1 - ay) + f01 * (1 - ax) * ay +
                               f11 * ax * ay;
              const size_t idx = static_cast<size_t>(py) * W + px;
              num[idx] += calib * f;
              den[idx] += calib;
            }
        }
      }
    }
  }

  ImageF out(W, H, 0.5f);
  for (int y = 0; y < H; ++y)
    for (int x = 0; x < W; ++x) {
      const size_t idx = static_cast<size_t>(y) * W + x;
      if (den[idx] > 0)
        out.at(x, y) = static_cast<float>(num[idx] / den[idx]);
    }
  return out;
}

// --------------------------------------------------------------------------
// Serialization

namespace {

constexpr char kBankMagic[4] = {'A', 'E', 'B', '1'};

template <typename T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
void get(std::istream& is, T& v) {
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

void put_string(std::ostream& os, const std::string& s) {
  put(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
std::string get_string(std::istream& is) {
  uint32_t n = 0;
  get(is, n);
  std::string s(n, '\0');
  is.read(s.data(), n);
  return s;
}

}  // namespace

void save_element_bank(const ElementBank& bank, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write " + path);
  os.write(kBankMagic, 4);
  put(os, static_cast<int32_t>(bank.params.canon_px));
  put(os, static_cast<int32_t>(bank.params.canon_cells));
  put(os, bank.params.detection_floor);
  put(os, static_cast<uint32_t>(bank.elements.size()));
  for (const Element& e : bank.elements) {
    put_string(os, e.affordance);
    put(os, static_cast<uint32_t>(e.w.size()));
    os.write(reinterpret_cast<const char*>(e.w.data()),
             static_cast<std::streamsize>(e.w.size() * sizeof(double)));
    put(os, e.bias);
    put(os, static_cast<uint32_t>(e.canonical_form.size()));
    os.write(
        reinterpret_cast<const char*>(e.canonical_form.data()),
        static_cast<std::streamsize>(e.canonical_form.size() * sizeof(float)));
    put(os, static_cast<uint8_t>(e.calibration.has_value()));
    if (e.calibration) {
      put(os, e.calibration->shape);
      put(os, e.calibration->scale);
      put(os, e.calibration->location);
    }
    put(os, static_cast<uint32_t>(e.members.size()));
    os.write(reinterpret_cast<const char*>(e.members.data()),
             static_cast<std::streamsize>(e.members.size() * sizeof(int)));
  }
  if (!os) throw IoError("short write to " + path);
}

ElementBank load_element_bank(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kBankMagic, 4) != 0)
    throw IoError("not an element bank: " + path);
  ElementBank bank;
  int32_t canon_px = 0, canon_cells = 0;
  get(is, canon_px);
  get(is, canon_cells);
  get(is, bank.params.detection_floor);
  bank.params.canon_px = canon_px;
  bank.params.canon_cells = canon_cells;
  uint32_t count = 0;
  get(is, count);
  bank.elements.resize(count);
  for (Element& e : bank.elements) {
    e.affordance = get_string(is);
    uint32_t wn = 0;
    get(is, wn);
    e.w.resize(wn);
    is.read(reinterpret_cast<char*>(e.w.data()),
            static_cast<std::streamsize>(wn * sizeof(double)));
    get(is, e.bias);
    uint32_t fn = 0;
    get(is, fn);
    e.canonical_form.resize(fn);
    is.read(reinterpret_cast<char*>(e.canonical_form.data()),
            static_cast<std::streamsize>(fn * sizeof(float)));
    uint8_t has_cal = 0;
    get(is, has_cal);
    if (has_cal) {
      WeibullCalibration cal;
      get(is, cal.shape);
      get(is, cal.scale);
      get(is, cal.location);
      e.calibration = cal;
    }
    uint32_t mn = 0;
    get(is, mn);
    e.members.resize(mn);
    is.read(reinterpret_cast<char*>(e.members.data()),
            static_cast<std::streamsize>(mn * sizeof(int)));
  }
  if (!is) throw IoError("truncated element bank: " + path);
  return bank;
}

std::vector<Element> train_midlevel(const std::vector<ImageRgb>& images,
                                    const std::vector<AffordanceMap>& labels,
                                    const std::string& affordance,
                                    const ElementParams& params,
                                    uint64_t seed,
                                    MidlevelTrainStats* stats) {
  Rng rng(seed);
  std::vector<Patch> patches = sample_patches(images, labels, params, rng);
  std::vector<Patch> background =
      sample_background(images, labels, params, rng);

  // Hold out half the background for Weibull calibration.
  std::vector<size_t> bg_order(background.size());
  std::iota(bg_order.begin(), bg_order.end(), 0);
  rng.shuffle(bg_order);
  std::vector<Patch> bg_train, bg_val;
  for (size_t i = 0; i < bg_order.size(); ++i)
    (i % 2 == 0 ? bg_train : bg_val).push_back(background[bg_order[i]]);

  std::vector<Element> elements = init_clusters(patches, params, rng);
  std::vector<Element> done;
  for (Element& e : elements) {
    if (e.members.size() < 2) continue;
    e.affordance = affordance;
    Element opt = optimize_element(std::move(e), patches, bg_train, params,
                                   rng);
    std::vector<double> val_scores;
    val_scores.reserve(bg_val.size());
    for (const Patch& b : bg_val) val_scores.push_back(opt.score(b));
    if (val_scores.size() >= 50) {
      try {
        opt = calibrate(std::move(opt), val_scores);
      } catch (const DegenerateFit&) {
        // fall back to the logistic squashing in infer()
      }
    }
    done.push_back(std::move(opt));
  }
  if (stats) {
    stats->affordance = affordance;
    stats->patches = patches.size();
    stats->elements = done.size();
  }
  return done;
}

}  // namespace aff
