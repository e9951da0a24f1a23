#pragma once

#include "logitbench/model.hpp"

#include <string>
#include <vector>

namespace logitbench {

/// Settings for iteratively reweighted least squares.
struct IrlsConfig {
    int max_iter = 50;
    /// Convergence when |delta loglik| / (|loglik| + 0.1) falls below this.
    double tol = 1e-8;
    /// Divergence bound on max |coefficient| on the standardized scale.
    double coef_bound = 1e3;
    int max_halvings = 10;
    /// Condition estimate (ratio of extreme |R| diagonals of the pivoted QR of
    /// the weighted design) above which the system counts as singular.
    double max_condition = 1e12;
    double weight_floor = 1e-10;

    void validate() const;
};

/// Column standardization used by the solvers (population standard deviation).
struct Standardization {
    Vector mean;
    Vector scale;    // 1 for zero-variance columns
    std::vector<bool> constant;

    static Standardization of(const Matrix& x);
    Matrix apply(const Matrix& x) const;
};

/// Raw IRLS outcome on a given design whose first column is the intercept.
struct IrlsResult {
    Vector theta;
    double loglik = 0.0;
    bool converged = false;
    std::string status;
    int iterations = 0;
    std::vector<double> loglik_trace;
};

/// Newton/IRLS maximization of the logistic log-likelihood for `design`
/// (n x (k+1), intercept column first). `warm` may be empty.
IrlsResult irls(const Matrix& design, const Vector& y, const IrlsConfig& config,
                const Vector& warm = Vector());

/// Maximum-likelihood fit restricted to `columns` (empty = intercept only).
/// Excluded columns get coefficient exactly 0. Non-convergence (iteration
/// limit, singular weighted system, separation) is reported through
/// `converged == false` with the best iterate, never thrown.
FittedModel fit_mle(const Dataset& data, const std::vector<Index>& columns,
                    const IrlsConfig& config = {});

/// Same as fit_mle but also returns the log-likelihood trace.
FittedModel fit_mle(const Dataset& data, const std::vector<Index>& columns,
                    const IrlsConfig& config, std::vector<double>* loglik_trace);

}  // namespace logitbench
