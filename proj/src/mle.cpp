#include "logitbench/mle.hpp"

#include "logitbench/errors.hpp"
#include "logitbench/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace logitbench {

void IrlsConfig::validate() const {
    if (max_iter < 1) throw InvalidInput("IRLS max_iter must be >= 1");
    if (!(tol > 0.0)) throw InvalidInput("IRLS tol must be > 0");
    if (!(coef_bound > 0.0)) throw InvalidInput("IRLS coef_bound must be > 0");
    if (max_halvings < 0) throw InvalidInput("IRLS max_halvings must be >= 0");
    if (!(max_condition > 1.0)) throw InvalidInput("IRLS max_condition must be > 1");
    if (!(weight_floor > 0.0)) throw InvalidInput("IRLS weight_floor must be > 0");
}

Standardization Standardization::of(const Matrix& x) {
    Standardization s;
    const Index n = x.rows();
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    s.constant.assign(static_cast<std::size_t>(x.cols()), false);
    for (Index j = 0; j < x.cols(); ++j) {
        const double var = (x.col(j).array() - s.mean[j]).square().sum() / static_cast<double>(n);
        const double sd = std::sqrt(var);
        // relative test so that large constant columns still count as constant
        if (!(sd > 1e-12 * std::max(1.0, std::abs(s.mean[j])))) {
            s.scale[j] = 1.0;
            s.constant[static_cast<std::size_t>(j)] = true;
        } else {
            s.scale[j] = sd;
        }
    }
    return s;
}

Matrix Standardization::apply(const Matrix& x) const {
    Matrix out(x.rows(), x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        if (constant[static_cast<std::size_t>(j)]) {
            out.col(j).setZero();
        } else {
            out.col(j) = (x.col(j).array() - mean[j]) / scale[j];
        }
    }
    return out;
}

namespace {

struct Evaluation {
    Vector eta;
    double loglik = 0.0;
};

Evaluation evaluate(const Matrix& design, const Vector& theta, const Vector& y) {
    Evaluation e;
    kernels::linear_predictor(design.rightCols(design.cols() - 1), theta[0],
                              theta.tail(theta.size() - 1), e.eta);
    e.loglik = log_likelihood_eta(e.eta, y);
    return e;
}

double relative_change(double ll_new, double ll_old) {
    return std::abs(ll_new - ll_old) / (std::abs(ll_new) + 0.1);
}

// Near a finite maximum Newton converges quadratically, so the polishing step
// is tiny. Under (quasi-)separation the likelihood keeps rising along a ray
// and the Newton step stays of order one however flat the likelihood gets.
constexpr double kDivergingStep = 1e-3;

}  // namespace

IrlsResult irls(const Matrix& design, const Vector& y, const IrlsConfig& config, const Vector& warm) {
    config.validate();
    const Index n = design.rows();
    const Index k = design.cols();
    if (y.size() != n) throw InvalidInput("outcome length does not match design rows");

    IrlsResult res;
    res.theta = Vector::Zero(k);
    if (warm.size() == k) {
        res.theta = warm;
    } else {
        const double ybar = y.mean();
        if (ybar > 0.0 && ybar < 1.0) res.theta[0] = logit(ybar);
    }

    const bool single_class = (y.array() == y[0]).all();

    Evaluation cur = evaluate(design, res.theta, y);
    res.loglik = cur.loglik;
    res.loglik_trace.push_back(cur.loglik);

    Vector mu(n), sw(n), wresid(n);
    Matrix wdesign(n, k);
    bool polishing = false;

    for (int iter = 0; iter < config.max_iter; ++iter) {
        res.iterations = iter + 1;
        for (Index i = 0; i < n; ++i) {
            mu[i] = inv_logit(cur.eta[i]);
            const double w = std::max(mu[i] * (1.0 - mu[i]), config.weight_floor);
            sw[i] = std::sqrt(w);
            wresid[i] = (y[i] - mu[i]) / sw[i];
        }
        // Newton step = weighted least-squares solution of sqrt(W) D step ~ sqrt(W) W^-1 (y - mu)
        wdesign = sw.asDiagonal() * design;
        Eigen::ColPivHouseholderQR<Matrix> qr(wdesign);
        const auto rdiag = qr.matrixQR().diagonal().cwiseAbs();
        const double r_max = rdiag.maxCoeff();
        const double r_min = rdiag.minCoeff();
        if (!(r_min > 0.0) || r_max / r_min > config.max_condition) {
            res.converged = false;
            res.status = "singular";
            return res;
        }
        const Vector step = qr.solve(wresid);

        // step-halving keeps the log-likelihood non-decreasing
        double scale = 1.0;
        bool accepted = false;
        Vector trial;
        Evaluation next;
        for (int h = 0; h <= config.max_halvings; ++h) {
            trial = res.theta + scale * step;
            next = evaluate(design, trial, y);
            if (std::isfinite(next.loglik) && next.loglik >= cur.loglik) {
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if (!accepted) {
            // no ascent left along the Newton direction: numerically at the optimum
            res.converged = true;
            break;
        }

        const double change = relative_change(next.loglik, cur.loglik);
        res.theta = trial;
        cur = std::move(next);
        res.loglik = cur.loglik;
        res.loglik_trace.push_back(cur.loglik);

        if (res.theta.cwiseAbs().maxCoeff() > config.coef_bound) {
            res.converged = false;
            res.status = "coef_bound";
            return res;
        }
        if (polishing) {
            if (!single_class && (scale * step).cwiseAbs().maxCoeff() > kDivergingStep) {
                res.converged = false;
                res.status = "separation";
                return res;
            }
            res.converged = true;
            break;
        }
        // one extra Newton step after the criterion is met drives the gradient
        // to second order
        if (change < config.tol) polishing = true;
    }

    if (single_class) {
        // the intercept runs off to +-infinity; the likelihood only converges numerically
        res.converged = false;
        res.status = "degenerate_outcome";
        return res;
    }
    if (!res.converged) {
        if (polishing) {
            res.converged = true;
        } else {
            res.status = "max_iter";
            return res;
        }
    }
    return res;
}

FittedModel fit_mle(const Dataset& data, const std::vector<Index>& columns, const IrlsConfig& config) {
    return fit_mle(data, columns, config, nullptr);
}

FittedModel fit_mle(const Dataset& data, const std::vector<Index>& columns, const IrlsConfig& config,
                    std::vector<double>* loglik_trace) {
    std::vector<Index> cols = columns;
    std::sort(cols.begin(), cols.end());
    if (std::adjacent_find(cols.begin(), cols.end()) != cols.end()) {
        throw InvalidInput("duplicate column in MLE column set");
    }
    for (Index c : cols) {
        if (c < 0 || c >= data.p()) throw InvalidInput("column index " + std::to_string(c) + " out of range");
    }

    const Index k = static_cast<Index>(cols.size());
    Matrix sub(data.n(), k);
    for (Index j = 0; j < k; ++j) sub.col(j) = data.x().col(cols[static_cast<std::size_t>(j)]);
    const Standardization st = Standardization::of(sub);

    Matrix design(data.n(), k + 1);
    design.col(0).setOnes();
    for (Index j = 0; j < k; ++j) {
        // constant columns stay as-is so that collinearity with the intercept
        // shows up as a singular system
        if (st.constant[static_cast<std::size_t>(j)]) {
            design.col(j + 1) = sub.col(j);
        } else {
            design.col(j + 1) = (sub.col(j).array() - st.mean[j]) / st.scale[j];
        }
    }

    IrlsResult r = irls(design, data.y(), config);
    if (loglik_trace) *loglik_trace = r.loglik_trace;

    FittedModel m;
    m.method = Method::MLE;
    m.beta = Vector::Zero(data.p());
    m.alpha = r.theta[0];
    for (Index j = 0; j < k; ++j) {
        const Index col = cols[static_cast<std::size_t>(j)];
        if (st.constant[static_cast<std::size_t>(j)]) {
            m.beta[col] = r.theta[j + 1];
        } else {
            m.beta[col] = r.theta[j + 1] / st.scale[j];
            m.alpha -= m.beta[col] * st.mean[j];
        }
    }
    m.support = cols;
    m.converged = r.converged;
    m.status = r.converged ? "ok" : r.status;
    return m;
}

}  // namespace logitbench
