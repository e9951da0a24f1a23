#pragma once

#include "logitbench/lasso.hpp"
#include "logitbench/model.hpp"

#include <cstdint>
#include <vector>

namespace logitbench {

struct FoldAssignment {
    std::vector<int> fold;  // per row, in [0, k_used)
    int k_requested = 0;
    int k_used = 0;          // < k_requested when a class is too small
};

/// Stratified folds: within each class rows are shuffled with `seed` and dealt
/// round-robin, the dealing position carrying over from positives to
/// negatives. If a class has fewer than k rows, k drops to that class size.
/// Throws DegenerateData when a class has fewer than 2 rows.
FoldAssignment make_folds(const Dataset& data, int k, std::uint64_t seed);

struct CvResult {
    std::vector<double> lambdas;
    std::vector<double> mean_auc;
    /// k_used x L validation AUCs; NaN where a validation fold was single-class.
    Matrix fold_auc;
    double chosen_lambda = 0.0;
    std::size_t chosen_index = 0;
    FoldAssignment folds;
};

/// K-fold CV over a lambda grid anchored at the full-data lambda_max; picks
/// the lambda with the largest mean validation AUC (ties go to the larger
/// lambda). Fold AUCs are averaged with validation-fold sizes as weights.
CvResult choose_lambda_cv(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& config = {});

}  // namespace logitbench
