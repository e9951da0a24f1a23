#include "logitbench/tuning.hpp"

#include "logitbench/errors.hpp"
#include "logitbench/metrics.hpp"
#include "logitbench/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace logitbench {

FoldAssignment make_folds(const Dataset& data, int k, std::uint64_t seed) {
    if (k < 2) throw InvalidInput("number of folds must be >= 2");
    const Index smallest = std::min(data.positives(), data.negatives());
    if (smallest < 2) {
        throw DegenerateData("stratified folds need at least 2 rows per class (smallest class has " +
                             std::to_string(smallest) + ")");
    }
    FoldAssignment fa;
    fa.k_requested = k;
    fa.k_used = static_cast<int>(std::min<Index>(k, smallest));

    std::vector<Index> pos, neg;
    for (Index i = 0; i < data.n(); ++i) (data.y()[i] == 1.0 ? pos : neg).push_back(i);
    Rng rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    fa.fold.assign(static_cast<std::size_t>(data.n()), -1);
    std::size_t deal = 0;
    for (const auto* cls : {&pos, &neg}) {
        for (Index row : *cls) {
            fa.fold[static_cast<std::size_t>(row)] = static_cast<int>(deal % static_cast<std::size_t>(fa.k_used));
            ++deal;
        }
    }
    return fa;
}

CvResult choose_lambda_cv(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& config) {
    config.validate();
    if (!data.has_both_classes()) throw DegenerateData("cross-validation needs both outcome classes");

    CvResult res;
    res.folds = make_folds(data, k, seed);
    const int kk = res.folds.k_used;
    res.lambdas = lambda_grid(lambda_max(data), config.n_lambda, config.min_ratio_for(data.n(), data.p()));
    const auto L = static_cast<Index>(res.lambdas.size());
    res.fold_auc = Matrix::Constant(kk, L, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> fold_rows(static_cast<std::size_t>(kk), 0.0);

    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(kk));
#pragma omp parallel for schedule(dynamic, 1) if (!omp_in_parallel())
    for (int f = 0; f < kk; ++f) {
        try {
            std::vector<Index> train, valid;
            for (Index i = 0; i < data.n(); ++i) {
                (res.folds.fold[static_cast<std::size_t>(i)] == f ? valid : train).push_back(i);
            }
            fold_rows[static_cast<std::size_t>(f)] = static_cast<double>(valid.size());
            const Dataset dtrain = data.subset(train);
            const Dataset dvalid = data.subset(valid);
            if (!dvalid.has_both_classes() || !dtrain.has_both_classes()) continue;
            const LambdaPath path = fit_lasso_path(dtrain, res.lambdas, config);
            const std::span<const double> labels(dvalid.y().data(), static_cast<std::size_t>(dvalid.n()));
            for (Index l = 0; l < L; ++l) {
                const Vector mu = predict_mu(path.solutions[static_cast<std::size_t>(l)], dvalid.x());
                res.fold_auc(f, l) = auc(std::span<const double>(mu.data(), static_cast<std::size_t>(mu.size())), labels);
            }
        } catch (...) {
            errors[static_cast<std::size_t>(f)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    res.mean_auc.assign(static_cast<std::size_t>(L), std::numeric_limits<double>::quiet_NaN());
    for (Index l = 0; l < L; ++l) {
        double sum = 0.0, weight = 0.0;
        for (int f = 0; f < kk; ++f) {
            const double a = res.fold_auc(f, l);
            if (std::isnan(a)) continue;
            sum += fold_rows[static_cast<std::size_t>(f)] * a;
            weight += fold_rows[static_cast<std::size_t>(f)];
        }
        if (weight == 0.0) throw TuningFailed("every validation fold is single-class");
        res.mean_auc[static_cast<std::size_t>(l)] = sum / weight;
    }

    // lambdas run from largest to smallest, so a strict comparison keeps the larger lambda on ties
    std::size_t best = 0;
    for (std::size_t l = 1; l < res.mean_auc.size(); ++l) {
        if (res.mean_auc[l] > res.mean_auc[best]) best = l;
    }
    res.chosen_index = best;
    res.chosen_lambda = res.lambdas[best];
    return res;
}

}  // namespace logitbench
