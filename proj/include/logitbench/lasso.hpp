#pragma once

#include "logitbench/mle.hpp"
#include "logitbench/model.hpp"

#include <optional>
#include <vector>

namespace logitbench {

/// Solver settings for the L1-penalized path.
///
/// The penalty is on the per-observation scale: at each lambda the solver
/// minimizes  -loglik(alpha, beta) / n + lambda * sum_j |beta_j|  over
/// standardized covariates, with an unpenalized intercept.
struct LassoConfig {
    int n_lambda = 100;
    /// Smallest lambda as a fraction of lambda_max. Unset: 0.01 when n > p, 0.05 otherwise.
    std::optional<double> lambda_min_ratio;
    /// IRLS (quadratic approximation) refreshes per lambda.
    int max_outer = 25;
    /// Coordinate descent converges when the max coefficient change in a sweep is below this.
    double inner_tol = 1e-7;
    /// Outer loop converges when the max coefficient change across a refresh is below this.
    double outer_tol = 1e-6;
    int max_sweeps = 100000;
    double weight_floor = 1e-10;

    void validate() const;
    double min_ratio_for(Index n, Index p) const;
};

struct LambdaPath {
    std::vector<double> lambdas;  // strictly decreasing
    std::vector<FittedModel> solutions;  // original covariate scale
    /// Standardized-scale solutions: intercept per lambda and p x L coefficients.
    std::vector<double> std_alpha;
    Matrix std_beta;
    Standardization standardization;
    std::vector<bool> converged;
    std::vector<int> outer_iterations;

    std::size_t size() const { return lambdas.size(); }
};

/// sign(z) * max(|z| - gamma, 0)
inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

/// Smallest penalty with an all-zero solution: max_j |sum_i xs_ij (y_i - ybar)| / n
/// over standardized columns. Throws DegenerateData for a single-class outcome.
double lambda_max(const Dataset& data);

/// Log-spaced grid from lmax down to lmax * min_ratio.
std::vector<double> lambda_grid(double lmax, int n_lambda, double min_ratio);

/// Full warm-started path on the default grid anchored at this data's lambda_max.
LambdaPath fit_lasso_path(const Dataset& data, const LassoConfig& config = {});

/// Path on a caller-supplied strictly decreasing grid (used to share one grid across CV folds).
LambdaPath fit_lasso_path(const Dataset& data, const std::vector<double>& lambdas,
                          const LassoConfig& config = {});

/// -loglik / n + lambda * ||beta||_1 evaluated on standardized covariates.
double penalized_objective(const Matrix& xs, const Vector& y, double alpha, const Vector& beta,
                           double lambda);

/// Optional diagnostics recorded by solve_lasso_at.
struct LassoTrace {
    std::vector<double> objective;   // true penalized objective after each refresh
    std::vector<double> surrogate;   // quadratic-approximation objective after each sweep
};

/// Single-lambda solve on standardized covariates `xs`, warm-started from
/// (alpha, beta). Returns true on convergence. `skip` marks columns held at 0.
bool solve_lasso_at(const Matrix& xs, const Vector& y, double lambda, const std::vector<bool>& skip,
                    const LassoConfig& config, double& alpha, Vector& beta, int* outer_iters = nullptr,
                    LassoTrace* trace = nullptr);

}  // namespace logitbench
