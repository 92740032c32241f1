#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace tbw {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;

  bool operator==(const RocPoint&) const = default;
};

/// Points sorted by (fpr, tpr), running from (0,0) to (1,1).
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Threshold sweep over the distinct scores (score >= t counts as positive);
/// equal scores move as one step, so ties earn half credit under the
/// trapezoidal AUC. Throws ErrorCode::invalid_argument for an empty list.
RocCurve roc(std::span<const double> pos_scores, std::span<const double> neg_scores);

/// Largest TPR among points with FPR <= target; 0 when none qualify.
double tpr_at_fpr(const RocCurve& curve, double fpr_target);

struct F1Result {
  double f1 = 0.0;
  // Scores >= threshold are classified positive.
  double threshold = 0.0;
};

/// Exhaustive sweep over the distinct scores; lowest maximizing threshold wins.
F1Result best_f1(std::span<const double> pos_scores, std::span<const double> neg_scores);

struct MetricsSummary {
  double auc = 0.0;
  double best_f1 = 0.0;
  double tpr_at_1pct = 0.0;
  double tpr_at_10pct = 0.0;
  // Share of positives with score > decision_threshold.
  double accuracy_at_threshold = 0.0;
  // Share of negatives with score > decision_threshold.
  double fpr_at_threshold = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
};

MetricsSummary summarize(std::span<const double> pos_scores, std::span<const double> neg_scores,
                         double decision_threshold);

}  // namespace tbw
