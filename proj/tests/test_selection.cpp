#include "logitbench/metrics.hpp"
#include "logitbench/selection.hpp"
#include "logitbench/simgen.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace logitbench;

TEST_CASE("AIC is non-increasing across adopted moves") {
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Dataset d = testsupport::random_logistic(120, 8, 50 + s, 0.0, {1.0, -1.0, 0.5});
        StepwiseTrace trace;
        const FittedModel m = fit_stepml(d, StepwiseConfig{}, &trace);
        CHECK(m.method == Method::StepML);
        REQUIRE(!trace.aic.empty());
        CHECK(trace.models.front().empty());
        for (std::size_t i = 1; i < trace.aic.size(); ++i) CHECK(trace.aic[i] < trace.aic[i - 1]);
        CHECK(m.support == trace.models.back());
    }
}

TEST_CASE("stepwise final model is the ML fit of its columns") {
    const Dataset d = testsupport::random_logistic(200, 6, 3, 0.2, {1.2, 0.0, -0.9});
    const FittedModel m = fit_stepml(d);
    REQUIRE(m.converged);
    const FittedModel direct = fit_mle(d, m.support, IrlsConfig{});
    CHECK(std::abs(m.alpha - direct.alpha) < 1e-6);
    CHECK((m.beta - direct.beta).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(std::find(m.support.begin(), m.support.end(), 0) != m.support.end());
    CHECK(std::find(m.support.begin(), m.support.end(), 2) != m.support.end());
}

TEST_CASE("the separating covariate ranks first in round one") {
    Rng rng(4);
    std::normal_distribution<double> z;
    Matrix x(40, 5);
    Vector y(40);
    for (Index i = 0; i < 40; ++i) {
        y[i] = i % 2;
        for (Index j = 0; j < 5; ++j) x(i, j) = z(rng);
        x(i, 3) = (y[i] == 1.0 ? 1.0 : -1.0) * (1.0 + std::abs(z(rng)));
    }
    StepwiseTrace trace;
    const FittedModel m = fit_stepml(Dataset(x, y), StepwiseConfig{}, &trace);
    REQUIRE(!trace.first_round.empty());
    CHECK(trace.first_round.front().column == 3);
    CHECK_FALSE(trace.first_round.front().converged);
    // the separated candidate is ineligible, so column 3 never enters
    CHECK(std::find(m.support.begin(), m.support.end(), 3) == m.support.end());
}

TEST_CASE("model size respects the cap") {
    const ScenarioConfig sc{50, 100, 0.5, 0.5, 1, 3};
    const TruthSpec truth = make_truth(50, 0.5, 0.5);
    const Dataset full = gen_dataset(sc, truth, 0);
    std::vector<Index> rows(70);
    for (Index i = 0; i < 70; ++i) rows[static_cast<std::size_t>(i)] = i;
    const Dataset train = full.subset(rows);
    CHECK(StepwiseConfig{}.size_cap(70, 50) == 50);
    CHECK(StepwiseConfig{}.size_cap(40, 50) == 38);
    CHECK(fit_stepml(train).size() <= 68);
    StepwiseConfig capped;
    capped.max_model_size = 2;
    CHECK(fit_stepml(train, capped).size() <= 2);
}

TEST_CASE("directions") {
    const Dataset d = testsupport::random_logistic(150, 5, 9, 0.0, {1.0, 0.0, 0.0, -1.0});
    StepwiseConfig fwd;
    fwd.direction = Direction::Forward;
    StepwiseTrace t;
    fit_stepml(d, fwd, &t);
    for (std::size_t i = 1; i < t.models.size(); ++i) CHECK(t.models[i].size() == t.models[i - 1].size() + 1);
    StepwiseConfig back;
    back.direction = Direction::Backward;
    StepwiseTrace tb;
    fit_stepml(d, back, &tb);
    CHECK(tb.models.front().size() == 5);
    for (std::size_t i = 1; i < tb.models.size(); ++i) CHECK(tb.models[i].size() + 1 == tb.models[i - 1].size());
    CHECK(parse_direction("BOTH") == Direction::Both);
    CHECK_FALSE(parse_direction("sideways").has_value());
}

TEST_CASE("stepwise on pure noise gives near-zero test Gini") {
    double total = 0.0;
    const int reps = 100;
    for (int r = 0; r < reps; ++r) {
        const Dataset train = testsupport::random_logistic(500, 10, 5000 + static_cast<std::uint64_t>(r));
        const Dataset test = testsupport::random_logistic(500, 10, 9000 + static_cast<std::uint64_t>(r));
        const FittedModel m = fit_stepml(train);
        const Vector mu = predict_mu(m, test.x());
        total += gini(testsupport::as_span(mu), testsupport::as_span(test.y()));
    }
    CHECK(std::abs(total / reps) < 0.1);
}

TEST_CASE("empty lasso support refits to the null model") {
    const Dataset d = testsupport::random_logistic(50, 3, 2);
    const FittedModel lasso = FittedModel::null_model(3, 0.0, Method::Lasso);
    const FittedModel m = refit_support(d, lasso);
    CHECK(m.method == Method::LassoML);
    CHECK(m.beta.isZero(0.0));
    CHECK(m.alpha == doctest::Approx(logit(d.event_rate())).epsilon(1e-8));
}

TEST_CASE("a failed refit falls back to the lasso coefficients") {
    Matrix x(10, 1);
    x << -5, -4, -3, -2, -1, 1, 2, 3, 4, 5;
    const Dataset d(x, Vector{{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}});
    FittedModel lasso = FittedModel::null_model(1, 0.0, Method::Lasso);
    lasso.beta[0] = 0.4;
    lasso.support = {0};
    const FittedModel m = refit_support(d, lasso);
    CHECK(m.refit_fallback);
    CHECK(m.method == Method::LassoML);
    CHECK(m.beta[0] == 0.4);
    CHECK(m.status.rfind("fallback:", 0) == 0);
}

TEST_CASE("LassoML recovers both signal covariates at n=1000") {
    int both = 0;
    const TruthSpec truth = make_truth(10, 0.5, 0.5);
    for (int r = 0; r < 100; ++r) {
        const ScenarioConfig sc{10, 1000, 0.5, 0.5, 100, 17};
        const Dataset d = gen_dataset(sc, truth, r);
        LassoConfig cfg;
        cfg.n_lambda = 40;
        const FittedModel m = fit_lassoml(d, 5, static_cast<std::uint64_t>(r), cfg);
        const bool has8 = std::find(m.support.begin(), m.support.end(), 8) != m.support.end();
        const bool has9 = std::find(m.support.begin(), m.support.end(), 9) != m.support.end();
        if (has8 && has9) ++both;
    }
    CHECK(both >= 95);
}

TEST_CASE("refitting removes shrinkage on average") {
    double lasso_mag = 0.0, refit_mag = 0.0;
    const TruthSpec truth = make_truth(10, 0.5, 0.5);
    for (int r = 0; r < 100; ++r) {
        const ScenarioConfig sc{10, 500, 0.5, 0.5, 100, 23};
        const Dataset d = gen_dataset(sc, truth, r);
        LassoConfig cfg;
        cfg.n_lambda = 40;
        const LassoFamilyFit fit = fit_lasso_family(d, 5, static_cast<std::uint64_t>(r), cfg);
        if (fit.lassoml.refit_fallback) continue;
        for (Index j : fit.lassoml.support) {
            lasso_mag += std::abs(fit.lasso.beta[j]);
            refit_mag += std::abs(fit.lassoml.beta[j]);
        }
    }
    CHECK(refit_mag > lasso_mag);
}
