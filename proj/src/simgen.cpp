#include "logitbench/simgen.hpp"

#include "logitbench/errors.hpp"
#include "logitbench/rng.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <tuple>

namespace logitbench {

void ScenarioConfig::validate() const {
    if (p < 1) throw InvalidInput("scenario p must be >= 1");
    if (n < 10) throw InvalidInput("scenario n must be >= 10");
    if (!(ore > 0.0 && ore < 1.0)) throw InvalidInput("scenario ore must lie in (0, 1)");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidInput("scenario rho must lie in [0, 1)");
    if (n_reps < 1) throw InvalidInput("scenario n_reps must be >= 1");
}

std::string ScenarioConfig::id() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "p%ld_n%ld_ore%g_rho%g", static_cast<long>(p), static_cast<long>(n), ore, rho);
    return buf;
}

Matrix correlation_matrix(Index p, double rho) {
    if (p < 1) throw InvalidInput("correlation matrix needs p >= 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw InvalidInput("rho must lie in [0, 1)");
    Matrix c(p, p);
    for (Index i = 0; i < p; ++i) {
        for (Index j = 0; j < p; ++j) {
            const auto d = static_cast<int>(std::abs(i - j));
            c(i, j) = d == 0 ? 1.0 : std::pow(-rho, d);
        }
    }
    return c;
}

static Matrix cholesky_lower(Index p, double rho) {
    Eigen::LLT<Matrix> llt(correlation_matrix(p, rho));
    if (llt.info() != Eigen::Success) throw Error("Cholesky factorization of the correlation matrix failed");
    return llt.matrixL();
}

Matrix gen_covariates(Index n, Index p, double rho, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("gen_covariates needs n >= 1");
    const Matrix lower = cholesky_lower(p, rho);
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Matrix z(n, p);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < p; ++j) z(i, j) = normal(rng);
    }
    return z * lower.transpose();
}

Vector signal_coefficients(Index p) {
    if (p < 1) throw InvalidInput("p must be >= 1");
    const auto noise = static_cast<Index>(std::floor(0.8 * static_cast<double>(p)));
    Vector beta = Vector::Zero(p);
    for (Index i = 1; noise + i <= p; ++i) beta[noise + i - 1] = (i % 2 == 1) ? 0.5 : -0.5;
    return beta;
}

/// Linear predictors x^T beta over a seeded sample of the covariate law,
/// generated row by row so the sample never has to be held as a matrix.
static Vector sample_linear_predictor(const Vector& beta, double rho, Index draws, std::uint64_t seed) {
    const Index p = beta.size();
    const Vector c = cholesky_lower(p, rho).transpose() * beta;  // x = L z  =>  x'beta = z'(L'beta)
    Rng rng(seed);
    std::normal_distribution<double> normal;
    Vector eta(draws);
    for (Index i = 0; i < draws; ++i) {
        double s = 0.0;
        for (Index j = 0; j < p; ++j) s += c[j] * normal(rng);
        eta[i] = s;
    }
    return eta;
}

static double mean_probability(const Vector& eta, double alpha) {
    double s = 0.0;
    for (Index i = 0; i < eta.size(); ++i) s += inv_logit(alpha + eta[i]);
    return s / static_cast<double>(eta.size());
}

double calibrate_intercept(const Vector& beta, double rho, double ore, double precision,
                           std::uint64_t calibration_seed, Index draws) {
    if (!(ore > 0.0 && ore < 1.0)) throw InvalidInput("ore must lie in (0, 1)");
    if (!(precision > 0.0)) throw InvalidInput("precision must be > 0");
    if (draws < 1) throw InvalidInput("calibration needs at least one draw");
    if (beta.isZero(0.0)) return logit(ore);

    const Vector eta = sample_linear_predictor(beta, rho, draws, calibration_seed);
    double lo = -20.0, hi = 20.0;
    if (!(mean_probability(eta, lo) < ore && mean_probability(eta, hi) > ore)) {
        throw CalibrationError("event rate " + std::to_string(ore) + " is not bracketed by intercepts in [-20, 20]");
    }
    while (hi - lo > precision) {
        const double mid = 0.5 * (lo + hi);
        (mean_probability(eta, mid) < ore ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

TruthSpec make_truth(Index p, double rho, double ore) {
    static std::mutex mutex;
    static std::map<std::tuple<Index, double, double>, double> cache;

    TruthSpec t;
    t.beta_true = signal_coefficients(p);
    t.noise_count = static_cast<Index>(std::floor(0.8 * static_cast<double>(p)));
    const auto key = std::make_tuple(p, rho, ore);
    {
        std::lock_guard lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) {
            t.alpha_true = it->second;
            return t;
        }
    }
    const double alpha = calibrate_intercept(t.beta_true, rho, ore);
    std::lock_guard lock(mutex);
    cache.emplace(key, alpha);
    t.alpha_true = alpha;
    return t;
}

std::uint64_t replication_seed(const ScenarioConfig& config, int rep) {
    return derive_seed(config.master_seed, fnv1a(config.id()), static_cast<std::uint64_t>(rep));
}

Dataset gen_dataset(const ScenarioConfig& config, const TruthSpec& truth, int rep) {
    config.validate();
    if (truth.beta_true.size() != config.p) throw InvalidInput("truth dimension does not match scenario p");
    const std::uint64_t seed = replication_seed(config, rep);
    Matrix x = gen_covariates(config.n, config.p, config.rho, derive_seed(seed, stream::data, 0));

    Rng rng(derive_seed(seed, stream::data, 1));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Vector eta = (x * truth.beta_true).array() + truth.alpha_true;
    Vector y(config.n);
    for (Index i = 0; i < config.n; ++i) y[i] = unif(rng) < inv_logit(eta[i]) ? 1.0 : 0.0;
    return Dataset(std::move(x), std::move(y));
}

double realized_event_rate(const TruthSpec& truth, double rho, Index draws, std::uint64_t seed) {
    const Vector eta = sample_linear_predictor(truth.beta_true, rho, draws, derive_seed(seed, stream::data, 0));
    Rng rng(derive_seed(seed, stream::data, 1));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Index events = 0;
    for (Index i = 0; i < draws; ++i) events += unif(rng) < inv_logit(truth.alpha_true + eta[i]) ? 1 : 0;
    return static_cast<double>(events) / static_cast<double>(draws);
}

}  // namespace logitbench
