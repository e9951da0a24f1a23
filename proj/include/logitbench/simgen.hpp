#pragma once

#include "logitbench/model.hpp"

#include <cstdint>
#include <string>

namespace logitbench {

/// One cell of the factorial simulation design.
struct ScenarioConfig {
    Index p = 10;
    Index n = 100;
    double ore = 0.5;   // target event rate
    double rho = 0.5;   // covariate correlation (-rho)^|i-j|
    int n_reps = 500;
    std::uint64_t master_seed = 1;

    void validate() const;
    double p_over_n() const { return static_cast<double>(p) / static_cast<double>(n); }
    /// Stable textual id, e.g. "p50_n100_ore0.5_rho0.5"; doubles as the seed fingerprint.
    std::string id() const;
};

struct TruthSpec {
    double alpha_true = 0.0;
    Vector beta_true;
    Index noise_count = 0;
};

/// p x p matrix with entries (-rho)^|i-j|.
Matrix correlation_matrix(Index p, double rho);

/// n draws from N(0, correlation_matrix(p, rho)) via its Cholesky factor.
Matrix gen_covariates(Index n, Index p, double rho, std::uint64_t seed);

/// floor(0.8 p) zeros followed by +0.5, -0.5, +0.5, ...
Vector signal_coefficients(Index p);

inline constexpr std::uint64_t kCalibrationSeed = 20240611;
inline constexpr Index kCalibrationDraws = 200000;

/// Intercept whose expected event rate under the covariate law equals `ore`,
/// by bisection on [-20, 20] against a fixed seeded Monte Carlo sample.
double calibrate_intercept(const Vector& beta, double rho, double ore, double precision = 1e-7,
                           std::uint64_t calibration_seed = kCalibrationSeed,
                           Index draws = kCalibrationDraws);

/// Truth for a scenario; the calibrated intercept is cached per (p, rho, ore).
TruthSpec make_truth(Index p, double rho, double ore);

/// Seed of replication `rep` of a scenario: derived from the master seed, the
/// scenario id and the replication index only.
std::uint64_t replication_seed(const ScenarioConfig& config, int rep);

Dataset gen_dataset(const ScenarioConfig& config, const TruthSpec& truth, int rep);

/// Fraction of Bernoulli outcomes equal to 1 over `draws` fresh draws of the scenario law.
double realized_event_rate(const TruthSpec& truth, double rho, Index draws, std::uint64_t seed);

}  // namespace logitbench
