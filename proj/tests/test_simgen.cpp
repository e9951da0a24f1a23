#include "logitbench/errors.hpp"
#include "logitbench/simgen.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace logitbench;

namespace {

Matrix empirical_correlation(const Matrix& x) {
    const Matrix c = x.rowwise() - x.colwise().mean();
    const Matrix cov = c.transpose() * c / static_cast<double>(x.rows() - 1);
    const Vector sd = cov.diagonal().cwiseSqrt();
    return cov.array() / (sd * sd.transpose()).array();
}

}  // namespace

TEST_CASE("correlation matrix") {
    CHECK(correlation_matrix(4, 0.0).isIdentity(0.0));
    Matrix expected(3, 3);
    expected << 1, -0.5, 0.25, -0.5, 1, -0.5, 0.25, -0.5, 1;
    CHECK(correlation_matrix(3, 0.5) == expected);
    Eigen::LLT<Matrix> llt(correlation_matrix(50, 0.9));
    CHECK(llt.info() == Eigen::Success);
    CHECK_THROWS_AS(correlation_matrix(3, 1.0), InvalidInput);
}

TEST_CASE("covariates reproduce the target correlation") {
    const Matrix a = empirical_correlation(gen_covariates(10000, 5, 0.0, 1));
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 5; ++j)
            if (i != j) CHECK(std::abs(a(i, j)) < 0.05);

    const Matrix target = correlation_matrix(10, 0.5);
    const Matrix b = empirical_correlation(gen_covariates(20000, 10, 0.5, 2));
    CHECK((b - target).cwiseAbs().maxCoeff() < 0.03);
}

TEST_CASE("covariate draws are deterministic") {
    CHECK(gen_covariates(50, 4, 0.9, 7) == gen_covariates(50, 4, 0.9, 7));
    CHECK(gen_covariates(50, 4, 0.9, 7) != gen_covariates(50, 4, 0.9, 8));
}

TEST_CASE("signal coefficients") {
    const Vector b10 = signal_coefficients(10);
    CHECK(b10.head(8).isZero(0.0));
    CHECK(b10[8] == 0.5);
    CHECK(b10[9] == -0.5);
    const Vector b30 = signal_coefficients(30);
    CHECK(b30.head(24).isZero(0.0));
    for (Index i = 0; i < 6; ++i) CHECK(b30[24 + i] == (i % 2 == 0 ? 0.5 : -0.5));
    CHECK(nonzero_support(signal_coefficients(50)).size() == 10);
}

TEST_CASE("intercept calibration") {
    CHECK(calibrate_intercept(Vector::Zero(4), 0.5, 0.2) == std::log(0.25));
    CHECK(std::abs(make_truth(10, 0.5, 0.5).alpha_true) < 0.02);
    CHECK(std::abs(make_truth(50, 0.9, 0.5).alpha_true) < 0.02);
    const TruthSpec t = make_truth(10, 0.5, 0.2);
    CHECK(t.alpha_true < 0.0);
    CHECK(t.noise_count == 8);
    CHECK(std::abs(realized_event_rate(t, 0.5, 200000, 99) - 0.2) < 0.01);
}

TEST_CASE("calibration reports an unbracketed rate") {
    CHECK_THROWS_AS(calibrate_intercept(Vector::Constant(3, 0.5), 0.0, 1e-12), CalibrationError);
}

TEST_CASE("replication data are seeded by master seed, scenario and rep") {
    const ScenarioConfig sc{10, 100, 0.2, 0.9, 20, 5};
    const TruthSpec t = make_truth(10, 0.9, 0.2);
    const Dataset a = gen_dataset(sc, t, 3);
    const Dataset b = gen_dataset(sc, t, 3);
    CHECK(a.x() == b.x());
    CHECK(a.y() == b.y());
    CHECK(gen_dataset(sc, t, 4).x() != a.x());
    ScenarioConfig other = sc;
    other.master_seed = 6;
    CHECK(gen_dataset(other, t, 3).x() != a.x());
    CHECK(replication_seed(sc, 3) != replication_seed(sc, 4));
}

TEST_CASE("event rate over replications tracks the target") {
    const ScenarioConfig sc{10, 500, 0.2, 0.5, 100, 1};
    const TruthSpec t = make_truth(10, 0.5, 0.2);
    double total = 0.0;
    for (int r = 0; r < 100; ++r) total += gen_dataset(sc, t, r).event_rate();
    CHECK(std::abs(total / 100.0 - 0.2) < 0.02);
}

TEST_CASE("scenario ids and validation") {
    const ScenarioConfig sc{50, 100, 0.5, 0.5, 1, 1};
    CHECK(sc.id() == "p50_n100_ore0.5_rho0.5");
    CHECK(sc.p_over_n() == 0.5);
    ScenarioConfig bad = sc;
    bad.ore = 1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
}
