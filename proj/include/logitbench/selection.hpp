#pragma once

#include "logitbench/lasso.hpp"
#include "logitbench/mle.hpp"
#include "logitbench/tuning.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace logitbench {

enum class Direction { Forward, Backward, Both };

std::string_view direction_name(Direction d);
std::optional<Direction> parse_direction(std::string_view s);

struct StepwiseConfig {
    Direction direction = Direction::Both;
    /// Largest model considered. Unset: min(p, n - 2).
    std::optional<Index> max_model_size;
    IrlsConfig irls;

    Index size_cap(Index n, Index p) const;
};

/// One evaluated move in a stepwise round.
struct StepCandidate {
    Index column = -1;
    bool add = true;
    double loglik = 0.0;
    double aic = 0.0;
    bool converged = false;
};

struct StepwiseTrace {
    /// AIC of the current model, starting with the initial model, after every adopted move.
    std::vector<double> aic;
    std::vector<std::vector<Index>> models;
    /// All candidates of the first round, best log-likelihood first, before
    /// non-converged fits are filtered out.
    std::vector<StepCandidate> first_round;
};

/// AIC = 2 (k + 1) - 2 loglik for a model with k covariates plus intercept.
inline double aic(double loglik, Index k) { return 2.0 * static_cast<double>(k + 1) - 2.0 * loglik; }

/// Stepwise selection by AIC followed by the ML fit of the chosen columns.
/// Forward and Both start from the intercept-only model, Backward from the
/// full model. A candidate whose ML fit does not converge is never adopted.
FittedModel fit_stepml(const Dataset& data, const StepwiseConfig& config = {}, StepwiseTrace* trace = nullptr);

/// Results of the CV-tuned lasso and its ML refit, sharing one CV run.
struct LassoFamilyFit {
    CvResult cv;
    LambdaPath path;  // full-data path on the CV grid
    FittedModel lasso;
    FittedModel lassoml;
};

LassoFamilyFit fit_lasso_family(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& lasso = {},
                                const IrlsConfig& irls = {});

/// Lasso at the CV-chosen lambda.
FittedModel fit_lasso_cv(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& lasso = {});

/// Lasso support at the CV-chosen lambda refit by maximum likelihood. When the
/// refit does not converge the lasso coefficients are returned with
/// refit_fallback set.
FittedModel fit_lassoml(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& lasso = {},
                        const IrlsConfig& irls = {});

/// ML refit of a lasso solution's support (the LassoML step on its own).
FittedModel refit_support(const Dataset& data, const FittedModel& lasso_solution, const IrlsConfig& irls = {});

}  // namespace logitbench
