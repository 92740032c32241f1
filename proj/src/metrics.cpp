#include "tbw/metrics.hpp"

#include <algorithm>

#include "tbw/error.hpp"

namespace tbw {

namespace {

void require_nonempty(std::span<const double> pos, std::span<const double> neg) {
  if (pos.empty() || neg.empty()) {
    throw Error(ErrorCode::invalid_argument, "metrics need non-empty positive and negative sets");
  }
}

std::vector<double> sorted_desc(std::span<const double> scores) {
  std::vector<double> out(scores.begin(), scores.end());
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

}  // namespace

RocCurve roc(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  require_nonempty(pos_scores, neg_scores);
  const auto pos = sorted_desc(pos_scores);
  const auto neg = sorted_desc(neg_scores);
  const double np = static_cast<double>(pos.size());
  const double nn = static_cast<double>(neg.size());

  RocCurve curve;
  curve.points.push_back({0.0, 0.0});
  std::size_t ip = 0;
  std::size_t in = 0;
  while (ip < pos.size() || in < neg.size()) {
    double t;
    if (ip < pos.size() && in < neg.size()) {
      t = std::max(pos[ip], neg[in]);
    } else if (ip < pos.size()) {
      t = pos[ip];
    } else {
      t = neg[in];
    }
    while (ip < pos.size() && pos[ip] >= t) ++ip;
    while (in < neg.size() && neg[in] >= t) ++in;
    curve.points.push_back({static_cast<double>(in) / nn, static_cast<double>(ip) / np});
  }

  double auc = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

double tpr_at_fpr(const RocCurve& curve, double fpr_target) {
  if (!(fpr_target > 0.0 && fpr_target < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "fpr_target must lie in (0, 1)");
  }
  double best = 0.0;
  for (const auto& p : curve.points) {
    if (p.fpr <= fpr_target) best = std::max(best, p.tpr);
  }
  return best;
}

F1Result best_f1(std::span<const double> pos_scores, std::span<const double> neg_scores) {
  require_nonempty(pos_scores, neg_scores);
  std::vector<double> thresholds(pos_scores.begin(), pos_scores.end());
  thresholds.insert(thresholds.end(), neg_scores.begin(), neg_scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const auto pos = sorted_desc(pos_scores);
  const auto neg = sorted_desc(neg_scores);
  // Classify-nothing has F1 0; any threshold with a true positive beats it.
  F1Result best{0.0, thresholds.back()};
  bool found = false;
  for (double t : thresholds) {
    const auto tp = static_cast<double>(
        std::count_if(pos.begin(), pos.end(), [t](double s) { return s >= t; }));
    const auto fp = static_cast<double>(
        std::count_if(neg.begin(), neg.end(), [t](double s) { return s >= t; }));
    const double fn = static_cast<double>(pos.size()) - tp;
    const double denom = 2.0 * tp + fp + fn;
    const double f1 = denom > 0.0 ? 2.0 * tp / denom : 0.0;
    // Ascending sweep: strict '>' keeps the lowest threshold among equal maxima.
    if (!found || f1 > best.f1) {
      best = {f1, t};
      found = true;
    }
  }
  return best;
}

MetricsSummary summarize(std::span<const double> pos_scores, std::span<const double> neg_scores,
                         double decision_threshold) {
  const RocCurve curve = roc(pos_scores, neg_scores);
  MetricsSummary m;
  m.auc = curve.auc;
  m.best_f1 = best_f1(pos_scores, neg_scores).f1;
  m.tpr_at_1pct = tpr_at_fpr(curve, 0.01);
  m.tpr_at_10pct = tpr_at_fpr(curve, 0.10);
  m.n_pos = pos_scores.size();
  m.n_neg = neg_scores.size();
  const auto above = [decision_threshold](std::span<const double> s) {
    return static_cast<double>(std::count_if(s.begin(), s.end(),
                                             [&](double x) { return x > decision_threshold; })) /
           static_cast<double>(s.size());
  };
  m.accuracy_at_threshold = above(pos_scores);
  m.fpr_at_threshold = above(neg_scores);
  return m;
}

}  // namespace tbw
