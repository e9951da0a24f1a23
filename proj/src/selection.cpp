#include "logitbench/selection.hpp"

#include "logitbench/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

namespace logitbench {

std::string_view direction_name(Direction d) {
    switch (d) {
        case Direction::Forward: return "forward";
        case Direction::Backward: return "backward";
        case Direction::Both: return "both";
    }
    return "?";
}

std::optional<Direction> parse_direction(std::string_view s) {
    std::string lower(s);
    for (char& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    for (Direction d : {Direction::Forward, Direction::Backward, Direction::Both}) {
        if (lower == direction_name(d)) return d;
    }
    return std::nullopt;
}

Index StepwiseConfig::size_cap(Index n, Index p) const {
    if (max_model_size) {
        if (*max_model_size < 0) throw InvalidInput("max_model_size must be >= 0");
        return std::min(*max_model_size, p);
    }
    return std::max<Index>(0, std::min(p, n - 2));
}

namespace {

struct StepModel {
    std::vector<Index> columns;  // ascending
    Vector theta;                // intercept first, standardized scale
    double loglik = -std::numeric_limits<double>::infinity();
    double aic = std::numeric_limits<double>::infinity();
    bool converged = false;
    std::string status;
};

class StepwiseSearch {
public:
    StepwiseSearch(const Dataset& data, const StepwiseConfig& config)
        : data_(data), config_(config), st_(Standardization::of(data.x())), xs_(st_.apply(data.x())) {}

    StepModel fit(const std::vector<Index>& columns, const Vector& warm) const {
        const auto k = static_cast<Index>(columns.size());
        Matrix design(data_.n(), k + 1);
        design.col(0).setOnes();
        for (Index j = 0; j < k; ++j) design.col(j + 1) = xs_.col(columns[static_cast<std::size_t>(j)]);
        IrlsResult r = irls(design, data_.y(), config_.irls, warm);
        StepModel m;
        m.columns = columns;
        m.theta = std::move(r.theta);
        m.loglik = r.loglik;
        m.converged = r.converged;
        m.status = r.converged ? "ok" : r.status;
        m.aic = aic(m.loglik, k);
        return m;
    }

    /// Warm start for `next` built from the coefficients of `from`.
    static Vector warm_start(const StepModel& from, const std::vector<Index>& next) {
        Vector w = Vector::Zero(static_cast<Index>(next.size()) + 1);
        w[0] = from.theta.size() > 0 ? from.theta[0] : 0.0;
        for (std::size_t a = 0; a < next.size(); ++a) {
            auto it = std::lower_bound(from.columns.begin(), from.columns.end(), next[a]);
            if (it != from.columns.end() && *it == next[a]) {
                w[static_cast<Index>(a) + 1] = from.theta[static_cast<Index>(it - from.columns.begin()) + 1];
            }
        }
        return w;
    }

    FittedModel to_model(const StepModel& m) const {
        FittedModel out;
        out.method = Method::StepML;
        out.beta = Vector::Zero(data_.p());
        out.alpha = m.theta[0];
        for (std::size_t a = 0; a < m.columns.size(); ++a) {
            const Index col = m.columns[a];
            if (st_.constant[static_cast<std::size_t>(col)]) continue;
            out.beta[col] = m.theta[static_cast<Index>(a) + 1] / st_.scale[col];
            out.alpha -= out.beta[col] * st_.mean[col];
        }
        out.support = m.columns;
        out.converged = m.converged;
        out.status = m.status;
        return out;
    }

private:
    const Dataset& data_;
    const StepwiseConfig& config_;
    Standardization st_;
    Matrix xs_;
};

}  // namespace

FittedModel fit_stepml(const Dataset& data, const StepwiseConfig& config, StepwiseTrace* trace) {
    if (!data.has_both_classes()) {
        FittedModel m = fit_mle(data, {}, config.irls);
        m.method = Method::StepML;
        return m;
    }
    const Index p = data.p();
    const Index cap = config.size_cap(data.n(), p);
    StepwiseSearch search(data, config);

    std::vector<Index> start;
    if (config.direction == Direction::Backward) {
        for (Index j = 0; j < std::min(p, cap); ++j) start.push_back(j);
    }
    StepModel current = search.fit(start, Vector());
    if (!current.converged) current.aic = std::numeric_limits<double>::infinity();
    if (trace) {
        trace->aic.push_back(current.aic);
        trace->models.push_back(current.columns);
    }

    const Index max_rounds = 10 * p + 10;
    for (Index round = 0; round < max_rounds; ++round) {
        struct Move {
            Index column;
            bool add;
        };
        std::vector<Move> moves;
        const auto size = static_cast<Index>(current.columns.size());
        if (config.direction != Direction::Backward && size < cap) {
            for (Index j = 0; j < p; ++j) {
                if (!std::binary_search(current.columns.begin(), current.columns.end(), j)) moves.push_back({j, true});
            }
        }
        if (config.direction != Direction::Forward) {
            for (Index j : current.columns) moves.push_back({j, false});
        }
        if (moves.empty()) break;

        std::vector<StepModel> fits(moves.size());
#pragma omp parallel for schedule(dynamic, 1) if (!omp_in_parallel())
        for (std::size_t m = 0; m < moves.size(); ++m) {
            std::vector<Index> cols = current.columns;
            if (moves[m].add) {
                cols.insert(std::lower_bound(cols.begin(), cols.end(), moves[m].column), moves[m].column);
            } else {
                cols.erase(std::find(cols.begin(), cols.end(), moves[m].column));
            }
            fits[m] = search.fit(cols, StepwiseSearch::warm_start(current, cols));
        }

        if (round == 0 && trace) {
            for (std::size_t m = 0; m < moves.size(); ++m) {
                trace->first_round.push_back(
                    {moves[m].column, moves[m].add, fits[m].loglik, fits[m].aic, fits[m].converged});
            }
            std::stable_sort(trace->first_round.begin(), trace->first_round.end(),
                             [](const StepCandidate& a, const StepCandidate& b) { return a.loglik > b.loglik; });
        }

        // lowest AIC among converged fits; ties go to the lowest column index
        std::size_t best = moves.size();
        for (std::size_t m = 0; m < moves.size(); ++m) {
            if (!fits[m].converged) continue;
            if (best == moves.size() || fits[m].aic < fits[best].aic ||
                (fits[m].aic == fits[best].aic && moves[m].column < moves[best].column)) {
                best = m;
            }
        }
        if (best == moves.size()) break;
        if (!(fits[best].aic < current.aic - 1e-7)) break;
        current = std::move(fits[best]);
        if (trace) {
            trace->aic.push_back(current.aic);
            trace->models.push_back(current.columns);
        }
    }
    return search.to_model(current);
}

FittedModel refit_support(const Dataset& data, const FittedModel& lasso_solution, const IrlsConfig& irls) {
    const std::vector<Index> support = nonzero_support(lasso_solution.beta);
    FittedModel refit = fit_mle(data, support, irls);
    refit.method = Method::LassoML;
    if (refit.converged) return refit;

    FittedModel fallback = lasso_solution;
    fallback.method = Method::LassoML;
    fallback.support = support;
    fallback.refit_fallback = true;
    fallback.status = "fallback:" + refit.status;
    return fallback;
}

LassoFamilyFit fit_lasso_family(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& lasso,
                                const IrlsConfig& irls) {
    LassoFamilyFit out;
    out.cv = choose_lambda_cv(data, k, seed, lasso);
    out.path = fit_lasso_path(data, out.cv.lambdas, lasso);
    out.lasso = out.path.solutions[out.cv.chosen_index];
    out.lassoml = refit_support(data, out.lasso, irls);
    return out;
}

FittedModel fit_lasso_cv(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& lasso) {
    const CvResult cv = choose_lambda_cv(data, k, seed, lasso);
    const LambdaPath path = fit_lasso_path(data, cv.lambdas, lasso);
    return path.solutions[cv.chosen_index];
}

FittedModel fit_lassoml(const Dataset& data, int k, std::uint64_t seed, const LassoConfig& lasso,
                        const IrlsConfig& irls) {
    return fit_lasso_family(data, k, seed, lasso, irls).lassoml;
}

}  // namespace logitbench
