#include "logitbench/model.hpp"

#include "logitbench/errors.hpp"
#include "logitbench/kernels.hpp"

#include <cctype>
#include <cmath>

namespace logitbench {

Dataset::Dataset(Matrix x, Vector y, std::vector<std::string> feature_names)
    : x_(std::move(x)), y_(std::move(y)), names_(std::move(feature_names)) {
    if (x_.rows() < 1 || x_.cols() < 1) {
        throw InvalidInput("dataset needs at least one row and one column");
    }
    if (y_.size() != x_.rows()) {
        throw InvalidInput("outcome length " + std::to_string(y_.size()) + " does not match " +
                           std::to_string(x_.rows()) + " rows");
    }
    if (!x_.allFinite()) throw InvalidInput("covariate matrix has non-finite entries");
    for (Index i = 0; i < y_.size(); ++i) {
        if (y_[i] == 1.0) {
            ++positives_;
        } else if (y_[i] != 0.0) {
            throw InvalidInput("outcome at row " + std::to_string(i) + " is not 0 or 1");
        }
    }
    if (names_.empty()) {
        names_.reserve(static_cast<std::size_t>(x_.cols()));
        for (Index j = 0; j < x_.cols(); ++j) names_.push_back("x" + std::to_string(j + 1));
    } else if (static_cast<Index>(names_.size()) != x_.cols()) {
        throw InvalidInput("feature name count does not match column count");
    }
}

Dataset Dataset::subset(std::span<const Index> rows) const {
    Matrix xs(static_cast<Index>(rows.size()), p());
    Vector ys(static_cast<Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        xs.row(static_cast<Index>(r)) = x_.row(rows[r]);
        ys[static_cast<Index>(r)] = y_[rows[r]];
    }
    return Dataset(std::move(xs), std::move(ys), names_);
}

std::string_view method_name(Method m) {
    switch (m) {
        case Method::MLE: return "MLE";
        case Method::Lasso: return "Lasso";
        case Method::StepML: return "StepML";
        case Method::LassoML: return "LassoML";
    }
    return "?";
}

std::optional<Method> parse_method(std::string_view s) {
    for (Method m : {Method::MLE, Method::Lasso, Method::StepML, Method::LassoML}) {
        std::string_view name = method_name(m);
        if (s.size() != name.size()) continue;
        bool same = true;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (std::tolower(static_cast<unsigned char>(s[i])) !=
                std::tolower(static_cast<unsigned char>(name[i]))) {
                same = false;
                break;
            }
        }
        if (same) return m;
    }
    return std::nullopt;
}

FittedModel FittedModel::null_model(Index p, double alpha, Method method) {
    FittedModel m;
    m.alpha = alpha;
    m.beta = Vector::Zero(p);
    m.method = method;
    m.converged = true;
    return m;
}

double predict_mu(const FittedModel& model, std::span<const double> x_row) {
    if (static_cast<Index>(x_row.size()) != model.p()) {
        throw InvalidInput("row has " + std::to_string(x_row.size()) + " values, model expects " +
                           std::to_string(model.p()));
    }
    double eta = model.alpha;
    for (std::size_t j = 0; j < x_row.size(); ++j) {
        if (!std::isfinite(x_row[j])) throw InvalidInput("non-finite covariate value");
        eta += x_row[j] * model.beta[static_cast<Index>(j)];
    }
    if (!std::isfinite(eta)) throw InvalidInput("non-finite linear predictor");
    return inv_logit(eta);
}

static void check_dims(const FittedModel& model, Index p) {
    if (model.p() != p) {
        throw InvalidInput("model has " + std::to_string(model.p()) + " coefficients, data has " +
                           std::to_string(p) + " columns");
    }
}

Vector linear_predictor(const FittedModel& model, const Matrix& x) {
    check_dims(model, x.cols());
    Vector eta(x.rows());
    kernels::linear_predictor(x, model.alpha, model.beta, eta);
    return eta;
}

Vector predict_mu(const FittedModel& model, const Matrix& x) {
    Vector mu = linear_predictor(model, x);
    for (Index i = 0; i < mu.size(); ++i) mu[i] = inv_logit(mu[i]);
    return mu;
}

double log_likelihood_eta(const Vector& eta, const Vector& y) {
    // y*log(mu) + (1-y)*log(1-mu) == y*eta - log(1+e^eta)
    double ll = 0.0;
    for (Index i = 0; i < eta.size(); ++i) ll += y[i] * eta[i] - log1pexp(eta[i]);
    return ll;
}

double log_likelihood(const FittedModel& model, const Dataset& data) {
    check_dims(model, data.p());
    return log_likelihood_eta(linear_predictor(model, data.x()), data.y());
}

Vector log_likelihood_gradient(const FittedModel& model, const Dataset& data) {
    check_dims(model, data.p());
    Vector resid = linear_predictor(model, data.x());
    for (Index i = 0; i < resid.size(); ++i) resid[i] = data.y()[i] - inv_logit(resid[i]);
    Vector g(data.p() + 1);
    g[0] = resid.sum();
    Vector xr(data.p());
    kernels::xt_vector(data.x(), resid, xr);
    g.tail(data.p()) = xr;
    return g;
}

std::vector<Index> nonzero_support(const Vector& beta) {
    std::vector<Index> s;
    for (Index j = 0; j < beta.size(); ++j) {
        if (beta[j] != 0.0) s.push_back(j);
    }
    return s;
}

}  // namespace logitbench
