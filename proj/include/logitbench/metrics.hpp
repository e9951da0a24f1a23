#pragma once

#include <span>

namespace logitbench {

/// Area under the ROC curve as the Mann-Whitney statistic: the probability
/// that a random positive outscores a random negative, ties counted 1/2.
/// Computed from mid-rank sums in O(n log n).
///
/// Throws DegenerateData unless both label classes are present and
/// InvalidInput for mismatched lengths, labels outside {0,1} or non-finite scores.
double auc(std::span<const double> scores, std::span<const double> labels);

/// Gini coefficient 2 * (AUC - 0.5). Not clamped: negative values mean the
/// scores rank negatives above positives.
double gini(std::span<const double> scores, std::span<const double> labels);

}  // namespace logitbench
