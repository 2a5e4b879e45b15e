#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aff/hog.hpp"
#include "aff/image.hpp"
#include "aff/labeler.hpp"
#include "aff/linear_svm.hpp"
#include "aff/rng.hpp"
#include "aff/weibull.hpp"

namespace aff {

/// One training window: appearance descriptor plus the affordance mask
/// resampled to the canonical label grid. Label cells are {0,1} with -1
/// for unknown.
struct Patch {
  HogDescriptor appearance;
  std::vector<int8_t> label_grid;  // canon_cells x canon_cells, row-major
  int image_id = 0;
  int x = 0, y = 0, size = 0;  // source window (square), original scale

  const std::vector<float>& features() const { return appearance.values; }
};

/// Mid-level primitive: detector + canonical affordance form + members.
struct Element {
  std::vector<double> w;  // over HOG feature space
  double bias = 0.0;
  std::vector<float> canonical_form;  // per-cell P(supports), canon grid
  std::vector<int> members;           // indices into the patch store
  std::string affordance;
  std::optional<WeibullCalibration> calibration;

  double score(const Patch& p) const {
    double s = bias;
    const auto& f = p.features();
    for (size_t i = 0; i < f.size() && i < w.size(); ++i) s += w[i] * f[i];
    return s;
  }
};

struct ElementParams {
  int canon_px = 80;        // canonical patch size (10x10 HOG cells)
  int canon_cells = 10;     // label grid resolution
  double min_coverage = 0.25;
  int samples_per_image = 160;
  int k_per_restart = 12;
  int restarts = 4;
  double consistency = 0.75;  // mean pairwise Jaccard to freeze a cluster
  int cardinality_cap = 100;
  double delta_bound = 0.25;  // label-inconsistency gate for membership
  double svm_C = 0.1;
  int iterations = 3;         // alternations per element
  int hard_negative_rounds = 2;
  int negatives_per_round = 400;
  double detection_floor = 0.2;  // calibrated score floor at inference
  uint64_t seed = 11;
};

/// Windows whose known pixels support the affordance with at least
/// min_coverage (Unknown pixels leave the denominator). Multi-scale,
/// random positions. Throws NoQualifyingPatches when nothing qualifies.
std::vector<Patch> sample_patches(const std::vector<ImageRgb>& images,
                                  const std::vector<AffordanceMap>& labels,
                                  const ElementParams& params, Rng& rng);

/// Background set: windows with zero affordance coverage.
std::vector<Patch> sample_background(const std::vector<ImageRgb>& images,
                                     const std::vector<AffordanceMap>& labels,
                                     const ElementParams& params, Rng& rng);

/// Multi-restart k-means on appearance; clusters whose label grids agree
/// (mean pairwise Jaccard >= consistency) are frozen after each restart
/// and their members removed from the pool. Returns membership-only
/// elements.
std::vector<Element> init_clusters(const std::vector<Patch>& patches,
                                   const ElementParams& params, Rng& rng);

/// Mean squared label disagreement over cells known in the patch.
double label_delta(const std::vector<float>& form,
                   const std::vector<int8_t>& label_grid);

struct OptimizeTrace {
  std::vector<double> objective_after_step;  // svm, y, F per iteration
  std::vector<double> svm_subproblem_before;
  std::vector<double> svm_subproblem_after;
};

/// Alternating optimization: (a) SVM on members vs background with hard
/// negative mining, (b) membership re-selection under the cardinality
/// cap, (c) canonical form update as the per-cell known-mean. Throws
/// ClusterCollapsed when the membership empties.
Element optimize_element(Element element, const std::vector<Patch>& patches,
                         const std::vector<Patch>& background,
                         const ElementParams& params, Rng& rng,
                         OptimizeTrace* trace = nullptr);

/// Joint objective of one element (regularizer + hinge terms + member
/// label inconsistency), used by the monotonicity checks.
double element_objective(const Element& element,
                         const std::vector<Patch>& patches,
                         const std::vector<Patch>& background,
                         const ElementParams& params);

/// Weibull-calibrate the detector on held-out negative scores.
Element calibrate(Element element, const std::vector<double>& negative_scores);

/// Label transfer: run detectors over a scale pyramid (factor sqrt(2)),
/// paste calibrated-score-weighted canonical forms, normalize; 0.5 where
/// nothing fired.
ImageF infer(const ImageRgb& image, const std::vector<Element>& elements,
             const ElementParams& params);

/// Bank of elements for all affordances, with serialization.
struct ElementBank {
  std::vector<Element> elements;
  ElementParams params;
};

void save_element_bank(const ElementBank& bank, const std::string& path);
ElementBank load_element_bank(const std::string& path);

struct MidlevelTrainStats {
  std::string affordance;
  size_t patches = 0;
  size_t elements = 0;
};

/// Full training pipeline for one affordance over a labeled image set.
std::vector<Element> train_midlevel(const std::vector<ImageRgb>& images,
                                    const std::vector<AffordanceMap>& labels,
                                    const std::string& affordance,
                                    const ElementParams& params,
                                    uint64_t seed,
                                    MidlevelTrainStats* stats = nullptr);

}  // namespace aff
