#include "logitbench/lasso.hpp"

#include "logitbench/errors.hpp"
#include "logitbench/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace logitbench {

void LassoConfig::validate() const {
    if (n_lambda < 2) throw InvalidInput("n_lambda must be >= 2");
    if (lambda_min_ratio && !(*lambda_min_ratio > 0.0 && *lambda_min_ratio < 1.0)) {
        throw InvalidInput("lambda_min_ratio must lie in (0, 1)");
    }
    if (max_outer < 1) throw InvalidInput("max_outer must be >= 1");
    if (!(inner_tol > 0.0) || !(outer_tol > 0.0)) throw InvalidInput("lasso tolerances must be > 0");
    if (max_sweeps < 1) throw InvalidInput("max_sweeps must be >= 1");
    if (!(weight_floor > 0.0)) throw InvalidInput("weight_floor must be > 0");
}

double LassoConfig::min_ratio_for(Index n, Index p) const {
    if (lambda_min_ratio) return *lambda_min_ratio;
    return n > p ? 0.01 : 0.05;
}

static void require_both_classes(const Dataset& data) {
    if (!data.has_both_classes()) {
        throw DegenerateData("lasso needs both outcome classes (got " + std::to_string(data.positives()) +
                             " positives out of " + std::to_string(data.n()) + ")");
    }
}

static double lambda_max_std(const Matrix& xs, const Vector& y) {
    const double ybar = y.mean();
    Vector r = (y.array() - ybar).matrix();
    Vector score;
    kernels::xt_vector(xs, r, score);
    return score.cwiseAbs().maxCoeff() / static_cast<double>(xs.rows());
}

double lambda_max(const Dataset& data) {
    require_both_classes(data);
    const Standardization st = Standardization::of(data.x());
    return lambda_max_std(st.apply(data.x()), data.y());
}

std::vector<double> lambda_grid(double lmax, int n_lambda, double min_ratio) {
    if (!(lmax > 0.0) || !std::isfinite(lmax)) throw InvalidInput("lambda_max must be positive and finite");
    if (n_lambda < 2) throw InvalidInput("n_lambda must be >= 2");
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) throw InvalidInput("lambda_min_ratio must lie in (0, 1)");
    std::vector<double> grid(static_cast<std::size_t>(n_lambda));
    const double step = std::log(min_ratio) / static_cast<double>(n_lambda - 1);
    for (int k = 0; k < n_lambda; ++k) grid[static_cast<std::size_t>(k)] = lmax * std::exp(step * k);
    return grid;
}

double penalized_objective(const Matrix& xs, const Vector& y, double alpha, const Vector& beta,
                           double lambda) {
    Vector eta;
    kernels::linear_predictor(xs, alpha, beta, eta);
    return -log_likelihood_eta(eta, y) / static_cast<double>(xs.rows()) + lambda * beta.lpNorm<1>();
}

namespace {

double surrogate_value(const Vector& w, const Vector& r, const Vector& beta, double lambda) {
    // r holds z - eta for the current iterate
    return 0.5 * (w.array() * r.array().square()).sum() / static_cast<double>(w.size()) +
           lambda * beta.lpNorm<1>();
}

}  // namespace

bool solve_lasso_at(const Matrix& xs, const Vector& y, double lambda, const std::vector<bool>& skip,
                    const LassoConfig& config, double& alpha, Vector& beta, int* outer_iters,
                    LassoTrace* trace) {
    const Index n = xs.rows();
    const Index p = xs.cols();
    const double inv_n = 1.0 / static_cast<double>(n);

    Vector eta, mu(n), w(n), r(n), v(p);
    std::vector<bool> active(static_cast<std::size_t>(p));
    kernels::linear_predictor(xs, alpha, beta, eta);
    double objective = -log_likelihood_eta(eta, y) * inv_n + lambda * beta.lpNorm<1>();
    if (trace) trace->objective.push_back(objective);

    bool converged = false;
    int outer = 0;
    for (; outer < config.max_outer && !converged; ++outer) {
        for (Index i = 0; i < n; ++i) {
            mu[i] = inv_logit(eta[i]);
            w[i] = std::max(mu[i] * (1.0 - mu[i]), config.weight_floor);
            r[i] = (y[i] - mu[i]) / w[i];
        }
        const double wsum = w.sum();
        kernels::weighted_sq_norms(xs, w, v);
        v *= inv_n;

        const double alpha0 = alpha;
        const Vector beta0 = beta;

        auto update = [&](Index j) -> double {
            const double* col = xs.col(j).data();
            double g = 0.0;
            for (Index i = 0; i < n; ++i) g += w[i] * col[i] * r[i];
            g = g * inv_n + v[j] * beta[j];
            const double next = soft_threshold(g, lambda) / v[j];
            const double d = next - beta[j];
            if (d != 0.0) {
                for (Index i = 0; i < n; ++i) r[i] -= d * col[i];
                beta[j] = next;
            }
            return std::abs(d);
        };
        auto update_intercept = [&]() -> double {
            const double d = (w.array() * r.array()).sum() / wsum;
            r.array() -= d;
            alpha += d;
            return std::abs(d);
        };

        // Active-set cycling: a full sweep, then sweeps over the nonzero
        // coordinates until they settle, then a full sweep to confirm.
        int sweeps = 0;
        while (sweeps < config.max_sweeps) {
            double dmax = update_intercept();
            for (Index j = 0; j < p; ++j) {
                if (skip[static_cast<std::size_t>(j)]) continue;
                dmax = std::max(dmax, update(j));
                active[static_cast<std::size_t>(j)] = beta[j] != 0.0;
            }
            ++sweeps;
            if (trace) trace->surrogate.push_back(surrogate_value(w, r, beta, lambda));
            if (dmax < config.inner_tol) break;

            while (sweeps < config.max_sweeps) {
                double amax = update_intercept();
                for (Index j = 0; j < p; ++j) {
                    if (active[static_cast<std::size_t>(j)]) amax = std::max(amax, update(j));
                }
                ++sweeps;
                if (trace) trace->surrogate.push_back(surrogate_value(w, r, beta, lambda));
                if (amax < config.inner_tol) break;
            }
        }

        // Backtrack along the proximal Newton direction if the true objective went up.
        const Vector dir_beta = beta - beta0;
        const double dir_alpha = alpha - alpha0;
        double t = 1.0;
        double next_objective = 0.0;
        for (int h = 0; h < 30; ++h) {
            alpha = alpha0 + t * dir_alpha;
            beta = beta0 + t * dir_beta;
            kernels::linear_predictor(xs, alpha, beta, eta);
            next_objective = -log_likelihood_eta(eta, y) * inv_n + lambda * beta.lpNorm<1>();
            if (next_objective <= objective) break;
            t *= 0.5;
        }
        if (next_objective > objective) {
            alpha = alpha0;
            beta = beta0;
            kernels::linear_predictor(xs, alpha, beta, eta);
            converged = true;  // no descent available
            break;
        }
        objective = next_objective;
        if (trace) trace->objective.push_back(objective);

        const double change = std::max(std::abs(alpha - alpha0), (beta - beta0).cwiseAbs().maxCoeff());
        if (change < config.outer_tol) converged = true;
    }
    if (outer_iters) *outer_iters = outer;
    return converged;
}

static LambdaPath fit_path_impl(const Dataset& data, const std::vector<double>& lambdas,
                                const LassoConfig& config, const Matrix& xs, const Standardization& st,
                                double lmax) {
    const Index p = data.p();
    LambdaPath path;
    path.lambdas = lambdas;
    path.standardization = st;
    path.std_beta = Matrix::Zero(p, static_cast<Index>(lambdas.size()));

    double alpha = logit(data.event_rate());
    Vector beta = Vector::Zero(p);
    const double null_alpha = alpha;

    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        const double lambda = lambdas[k];
        bool ok = true;
        int outer = 0;
        if (lambda >= lmax) {
            alpha = null_alpha;
            beta.setZero();
        } else {
            ok = solve_lasso_at(xs, data.y(), lambda, st.constant, config, alpha, beta, &outer);
        }
        path.std_alpha.push_back(alpha);
        path.std_beta.col(static_cast<Index>(k)) = beta;
        path.converged.push_back(ok);
        path.outer_iterations.push_back(outer);

        FittedModel m;
        m.method = Method::Lasso;
        m.beta = Vector::Zero(p);
        m.alpha = alpha;
        for (Index j = 0; j < p; ++j) {
            if (beta[j] == 0.0) continue;
            m.beta[j] = beta[j] / st.scale[j];
            m.alpha -= m.beta[j] * st.mean[j];
        }
        m.support = nonzero_support(beta);
        m.converged = ok;
        m.status = ok ? "ok" : "max_outer";
        path.solutions.push_back(std::move(m));
    }
    return path;
}

LambdaPath fit_lasso_path(const Dataset& data, const LassoConfig& config) {
    config.validate();
    require_both_classes(data);
    const Standardization st = Standardization::of(data.x());
    const Matrix xs = st.apply(data.x());
    const double lmax = lambda_max_std(xs, data.y());
    const auto grid = lambda_grid(lmax, config.n_lambda, config.min_ratio_for(data.n(), data.p()));
    return fit_path_impl(data, grid, config, xs, st, lmax);
}

LambdaPath fit_lasso_path(const Dataset& data, const std::vector<double>& lambdas, const LassoConfig& config) {
    config.validate();
    require_both_classes(data);
    if (lambdas.empty()) throw InvalidInput("empty lambda grid");
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (!(lambdas[k] > 0.0) || !std::isfinite(lambdas[k])) throw InvalidInput("lambdas must be positive");
        if (k > 0 && !(lambdas[k] < lambdas[k - 1])) throw InvalidInput("lambdas must be strictly decreasing");
    }
    const Standardization st = Standardization::of(data.x());
    const Matrix xs = st.apply(data.x());
    const double lmax = lambda_max_std(xs, data.y());
    return fit_path_impl(data, lambdas, config, xs, st, lmax);
}

}  // namespace logitbench
