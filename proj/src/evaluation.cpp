#include "aff/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "aff/errors.hpp"

namespace aff {

PRCurve pr_curve_from_pairs(const std::vector<double>& scores,
                            const std::vector<bool>& truth) {
  const size_t n = scores.size();
  size_t n_pos = 0;
  for (bool t : truth) n_pos += t;
  if (n_pos == 0) throw NoPositives("truth has no positive entries");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return scores[a] > scores[b];
  });

  PRCurve curve;
  curve.n_known = n;
  curve.n_positive = n_pos;

  size_t tp = 0, fp = 0;
  double ap = 0.0;
  size_t i = 0;
  while (i < n) {
    // One threshold group per distinct score.
    const double t = scores[order[i]];
    size_t group_tp = 0, group_fp = 0;
    while (i < n && scores[order[i]] == t) {
      if (truth[order[i]]) ++group_tp;
      else ++group_fp;
      ++i;
    }
    tp += group_tp;
    fp += group_fp;
    const double precision = static_cast<double>(tp) / (tp + fp);
    const double recall = static_cast<double>(tp) / n_pos;
    curve.points.push_back({t, recall, precision});
    ap += group_tp * precision;
  }
  curve.ap = ap / n_pos;
  return curve;
}

namespace {

void flatten(const ImageF& scores, const AffordanceMap& truth,
             std::vector<double>& s, std::vector<bool>& t) {
  if (!scores.same_size(truth.labels))
    throw PipelineError("score/truth dimension mismatch");
  s.reserve(scores.size());
  t.reserve(scores.size());
  for (int y = 0; y < scores.height(); ++y)
    for (int x = 0; x < scores.width(); ++x) {
      const TriState lbl = truth.labels.at(x, y);
      if (lbl == TriState::Unknown) continue;
      s.push_back(scores.at(x, y));
      t.push_back(lbl == TriState::Supports);
    }
}

}  // namespace

PRCurve pr_curve(const ImageF& scores, const AffordanceMap& truth) {
  std::vector<double> s;
  std::vector<bool> t;
  flatten(scores, truth, s, t);
  return pr_curve_from_pairs(s, t);
}

double jaccard_at_threshold(const std::vector<double>& scores,
                            const std::vector<bool>& truth,
                            double threshold) {
  size_t inter = 0, uni = 0;
  for (size_t i = 0; i < scores.size(); ++i) {
    const bool pred = scores[i] >= threshold;
    if (pred && truth[i]) ++inter;
    if (pred || truth[i]) ++uni;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

double select_threshold_jaccard(const std::vector<double>& scores,
                                const std::vector<bool>& truth) {
  size_t n_pos = 0;
  for (bool t : truth) n_pos += t;
  if (n_pos == 0) throw NoPositives("truth has no positive entries");

  std::vector<double> candidates = scores;
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());

  double best_j = -1.0, best_t = candidates.front();
  for (double t : candidates) {
    const double j = jaccard_at_threshold(scores, truth, t);
    if (j > best_j) {  // strict: ties keep the lowest threshold
      best_j = j;
      best_t = t;
    }
  }
  return best_t;
}

double select_threshold_jaccard(const ImageF& scores,
                                const AffordanceMap& truth) {
  std::vector<double> s;
  std::vector<bool> t;
  flatten(scores, truth, s, t);
  return select_threshold_jaccard(s, t);
}

void write_report_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, PRCurve>>& rows) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "affordance,ap,n_known,n_positive\n";
  char buf[64];
  for (const auto& [name, curve] : rows) {
    std::snprintf(buf, sizeof(buf), "%.6f", curve.ap);
    os << name << ',' << buf << ',' << curve.n_known << ','
       << curve.n_positive << '\n';
  }
}

void write_pr_csv(const std::string& path, const PRCurve& curve) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  os << "threshold,recall,precision\n";
  char buf[96];
  for (const auto& p : curve.points) {
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g,%.9g", p.threshold, p.recall,
                  p.precision);
    os << buf << '\n';
  }
}

void write_pr_svg(const std::string& path, const PRCurve& curve,
                  const std::string& title) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path);
  const int W = 420, H = 420, M = 40;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W
     << "' height='" << H << "'>\n";
  os << "<rect width='100%' height='100%' fill='white'/>\n";
  os << "<rect x='" << M << "' y='" << M << "' width='" << W - 2 * M
     << "' height='" << H - 2 * M
     << "' fill='none' stroke='black' stroke-width='1'/>\n";
  os << "<text x='" << W / 2 << "' y='24' text-anchor='middle'>" << title
     << " (AP=" << curve.ap << ")</text>\n";
  os << "<polyline fill='none' stroke='crimson' stroke-width='2' points='";
  char buf[64];
  for (const auto& p : curve.points) {
    const double px = M + p.recall * (W - 2 * M);
    const double py = H - M - p.precision * (H - 2 * M);
    std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", px, py);
    os << buf;
  }
  os << "'/>\n</svg>\n";
}

}  // namespace aff
