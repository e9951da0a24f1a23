#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace logitbench {

using Matrix = Eigen::MatrixXd;  // column-major: column sweeps are contiguous
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Design matrix plus binary outcomes. Immutable after construction; the
/// constructor rejects non-finite covariates and outcomes outside {0,1}.
class Dataset {
public:
    Dataset(Matrix x, Vector y, std::vector<std::string> feature_names = {});

    Index n() const { return x_.rows(); }
    Index p() const { return x_.cols(); }
    const Matrix& x() const { return x_; }
    const Vector& y() const { return y_; }
    const std::vector<std::string>& feature_names() const { return names_; }

    Index positives() const { return positives_; }
    Index negatives() const { return n() - positives_; }
    bool has_both_classes() const { return positives_ > 0 && positives_ < n(); }
    double event_rate() const { return static_cast<double>(positives_) / static_cast<double>(n()); }

    /// Rows in the given order.
    Dataset subset(std::span<const Index> rows) const;

private:
    Matrix x_;
    Vector y_;
    std::vector<std::string> names_;
    Index positives_ = 0;
};

enum class Method { MLE, Lasso, StepML, LassoML };

std::string_view method_name(Method m);
std::optional<Method> parse_method(std::string_view s);

struct FittedModel {
    double alpha = 0.0;
    Vector beta;
    Method method = Method::MLE;
    bool converged = false;
    std::vector<Index> support;  // ascending column indices
    /// Set when LassoML had to fall back to the lasso coefficients.
    bool refit_fallback = false;
    /// Free-form reason for a non-converged fit ("max_iter", "singular", "separation", ...).
    std::string status;

    Index p() const { return beta.size(); }
    Index size() const { return static_cast<Index>(support.size()); }

    static FittedModel null_model(Index p, double alpha, Method method);
};

/// log(1 + e^eta) without overflow.
inline double log1pexp(double eta) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

/// Inverse logit, stable for any finite eta.
inline double inv_logit(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

inline double logit(double mu) { return std::log(mu / (1.0 - mu)); }

double predict_mu(const FittedModel& model, std::span<const double> x_row);

/// alpha + X beta for every row.
Vector linear_predictor(const FittedModel& model, const Matrix& x);

/// Fitted probabilities for every row of x.
Vector predict_mu(const FittedModel& model, const Matrix& x);

double log_likelihood(const FittedModel& model, const Dataset& data);

/// Log-likelihood written directly in terms of the linear predictor.
double log_likelihood_eta(const Vector& eta, const Vector& y);

/// Gradient of the log-likelihood with respect to (alpha, beta_1..beta_p).
Vector log_likelihood_gradient(const FittedModel& model, const Dataset& data);

/// Support of a coefficient vector: indices with nonzero entries.
std::vector<Index> nonzero_support(const Vector& beta);

}  // namespace logitbench
