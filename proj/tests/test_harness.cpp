#include "logitbench/errors.hpp"
#include "logitbench/harness.hpp"
#include "support.hpp"

#include <doctest.h>

#include <omp.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

using namespace logitbench;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

HarnessConfig quick_config() {
    HarnessConfig c;
    c.folds = 5;
    c.lasso.n_lambda = 30;
    return c;
}

}  // namespace

TEST_CASE("stratified split counts") {
    Matrix x(100, 1);
    Vector y = Vector::Zero(100);
    for (Index i = 0; i < 100; ++i) x(i, 0) = static_cast<double>(i);
    for (Index i = 0; i < 20; ++i) y[i * 5] = 1.0;
    const Dataset d(x, y);
    const auto [train, test] = split_train_test(d, 0.7, 3);
    CHECK(train.positives() == 14);
    CHECK(train.negatives() == 56);
    CHECK(test.positives() == 6);
    CHECK(test.negatives() == 24);
}

TEST_CASE("split is a deterministic partition") {
    const Dataset d = testsupport::random_logistic(77, 2, 4);
    const TrainTestSplit a = split_indices(d, 0.7, 11);
    const TrainTestSplit b = split_indices(d, 0.7, 11);
    CHECK(a.train == b.train);
    CHECK(a.test == b.test);
    std::set<Index> all(a.train.begin(), a.train.end());
    for (Index i : a.test) CHECK(all.insert(i).second);
    CHECK(static_cast<Index>(all.size()) == d.n());
}

TEST_CASE("split errors") {
    Matrix x(5, 1);
    x << 1, 2, 3, 4, 5;
    const Dataset d(x, Vector{{1, 0, 0, 0, 0}});
    CHECK_THROWS_AS(split_indices(d, 0.7, 1), DegenerateData);
    const Dataset ok(x, Vector{{1, 1, 0, 0, 0}});
    CHECK_THROWS_AS(split_indices(ok, 1.0, 1), InvalidInput);
    // small classes keep a test row
    const TrainTestSplit s = split_indices(ok, 0.9, 1);
    CHECK(s.test.size() == 2);
}

TEST_CASE("replication is deterministic and complete") {
    const ScenarioConfig sc{10, 200, 0.5, 0.5, 2, 9};
    const TruthSpec truth = make_truth(10, 0.5, 0.5);
    const HarnessConfig cfg = quick_config();
    const ReplicationResult a = run_replication(sc, truth, 1, cfg);
    const ReplicationResult b = run_replication(sc, truth, 1, cfg);
    REQUIRE(a.outcomes.size() == 4);
    for (std::size_t i = 0; i < a.outcomes.size(); ++i) {
        CHECK(a.outcomes[i].label == b.outcomes[i].label);
        CHECK(a.outcomes[i].gini == b.outcomes[i].gini);
        CHECK(a.outcomes[i].model_size == b.outcomes[i].model_size);
    }
    CHECK(a.find("Oracle") != nullptr);
    CHECK(a.find("Oracle")->gini > 0.0);
}

TEST_CASE("a null model scores Gini 0") {
    const Dataset train = testsupport::random_logistic(60, 3, 1);
    const Dataset test = testsupport::random_logistic(40, 3, 2);
    // a zero-size stepwise model has tied scores
    HarnessConfig cfg = quick_config();
    cfg.methods = {Method::StepML};
    cfg.stepwise.max_model_size = 0;
    std::vector<FittedModel> models;
    const ReplicationResult r = evaluate_split(train, test, 1, cfg, nullptr, &models);
    REQUIRE(models.size() == 1);
    CHECK(models[0].support.empty());
    CHECK(r.outcomes[0].gini == 0.0);
}

TEST_CASE("single-class test sets invalidate the replication") {
    const Dataset train = testsupport::random_logistic(80, 3, 1, 0.0, {1.0});
    Matrix x(10, 3);
    x.setRandom();
    const Dataset test(x, Vector::Ones(10));
    const ReplicationResult r = evaluate_split(train, test, 1, quick_config());
    CHECK_FALSE(r.test_valid);
    for (const auto& o : r.outcomes) {
        CHECK_FALSE(o.valid());
        CHECK(o.status == "invalid_test");
    }
    const AggregateResult agg = aggregate("x", {r}, quick_config().labels(false));
    CHECK(agg.methods[0].valid == 0);
    CHECK(agg.methods[0].total == 1);
    CHECK(std::isnan(agg.methods[0].mean));
}

TEST_CASE("aggregate uses the sample SD in rep order") {
    std::vector<ReplicationResult> reps;
    for (int r : {2, 0, 1}) {
        ReplicationResult rr;
        rr.scenario_id = "s";
        rr.rep = r;
        MethodOutcome o;
        o.label = "Lasso";
        o.gini = 0.1 * (r + 1);
        rr.outcomes.push_back(o);
        reps.push_back(rr);
    }
    const AggregateResult agg = aggregate("s", reps, {"Lasso"});
    CHECK(agg.methods[0].mean == doctest::Approx(0.2));
    CHECK(agg.methods[0].sd == doctest::Approx(0.1));
    CHECK(agg.methods[0].valid == 3);

    const AggregateResult one = aggregate("s", {reps[0]}, {"Lasso"});
    CHECK(one.methods[0].mean == reps[0].outcomes[0].gini);
    CHECK(one.methods[0].sd == 0.0);
}

TEST_CASE("full design grid has 48 scenarios") {
    const auto grid = full_design_grid(500, 1);
    CHECK(grid.size() == 48);
    std::set<std::string> ids;
    for (const auto& s : grid) ids.insert(s.id());
    CHECK(ids.size() == 48);
    CHECK(grid.front().p_over_n() == 0.1);
}

TEST_CASE("grid results do not depend on parallelism") {
    std::vector<ScenarioConfig> scenarios{{10, 100, 0.5, 0.5, 4, 3}, {10, 100, 0.2, 0.9, 4, 3}};
    HarnessConfig cfg = quick_config();
    cfg.parallelism = 1;
    const auto d1 = testsupport::scratch_dir("par1");
    run_grid(scenarios, cfg, GridOptions{d1, std::nullopt});
    cfg.parallelism = 3;
    const auto d3 = testsupport::scratch_dir("par3");
    run_grid(scenarios, cfg, GridOptions{d3, std::nullopt});
    CHECK(slurp(d1 / kAggregateFile) == slurp(d3 / kAggregateFile));
    CHECK(!slurp(d1 / kAggregateFile).empty());
}

TEST_CASE("interrupted grids resume without recomputing") {
    std::vector<ScenarioConfig> scenarios{{10, 100, 0.5, 0.5, 5, 4}};
    const HarnessConfig cfg = quick_config();
    const auto dir = testsupport::scratch_dir("resume");
    const GridOutcome first = run_grid(scenarios, cfg, GridOptions{dir, 2});
    CHECK_FALSE(first.complete);
    CHECK(first.executed == 2);
    const GridOutcome second = run_grid(scenarios, cfg, GridOptions{dir, std::nullopt});
    CHECK(second.complete);
    CHECK(second.reused == 2);
    CHECK(second.executed == 3);

    const auto fresh = testsupport::scratch_dir("resume_fresh");
    run_grid(scenarios, cfg, GridOptions{fresh, std::nullopt});
    CHECK(slurp(dir / kAggregateFile) == slurp(fresh / kAggregateFile));
    CHECK(slurp(dir / kReplicationFile).size() > 0);
}

TEST_CASE("a torn trailing group is dropped on resume") {
    std::vector<ScenarioConfig> scenarios{{10, 100, 0.5, 0.5, 3, 4}};
    const HarnessConfig cfg = quick_config();
    const auto dir = testsupport::scratch_dir("torn");
    run_grid(scenarios, cfg, GridOptions{dir, 2});
    {
        std::ofstream app(dir / kReplicationFile, std::ios::app);
        app << scenarios[0].id() << ",2,Lasso,0.5,3,ok,0.1\n" << scenarios[0].id() << ",2,Lass";
    }
    const auto reps = read_replications_csv(dir / kReplicationFile, cfg.labels(true));
    CHECK(reps.size() == 2);
    const GridOutcome out = run_grid(scenarios, cfg, GridOptions{dir, std::nullopt});
    CHECK(out.complete);
    CHECK(out.executed == 1);
}

TEST_CASE("replication CSV round-trips") {
    ReplicationResult r;
    r.scenario_id = "p10_n100_ore0.5_rho0.5";
    r.rep = 7;
    MethodOutcome a;
    a.label = "Lasso";
    a.gini = 0.123456789012345678;
    a.model_size = 3;
    a.status = "ok";
    MethodOutcome b;
    b.label = "StepML";
    b.gini = std::nan("");
    b.status = "error:bad, value";
    r.outcomes = {a, b};
    const auto dir = testsupport::scratch_dir("csv");
    write_replications_csv(dir / "r.csv", {r});
    const auto back = read_replications_csv(dir / "r.csv", {"Lasso", "StepML"});
    REQUIRE(back.size() == 1);
    CHECK(back[0].rep == 7);
    CHECK(back[0].outcomes[0].gini == a.gini);
    CHECK(std::isnan(back[0].outcomes[1].gini));
    CHECK(back[0].outcomes[1].status == "error:bad; value");
}

TEST_CASE("oracle Gini bounds the methods at n=1000") {
    const ScenarioConfig sc{10, 1000, 0.5, 0.5, 10, 2};
    HarnessConfig cfg = quick_config();
    const GridOutcome out = run_grid({sc}, cfg);
    const AggregateResult& agg = out.aggregates.front();
    const MethodSummary* oracle = agg.find("Oracle");
    REQUIRE(oracle != nullptr);
    for (const char* label : {"Lasso", "LassoML", "StepML"}) {
        const MethodSummary* m = agg.find(label);
        REQUIRE(m != nullptr);
        CHECK(oracle->mean >= m->mean - 2.0 * oracle->sd);
    }
}

TEST_CASE("application run with a perfectly predictive covariate") {
    Rng rng(3);
    std::normal_distribution<double> z;
    Matrix x(120, 3);
    Vector y(120);
    for (Index i = 0; i < 120; ++i) {
        y[i] = i % 3 == 0;
        x(i, 0) = (y[i] == 1.0 ? 2.0 : -2.0) + 0.3 * z(rng);
        x(i, 1) = z(rng);
        x(i, 2) = z(rng);
    }
    HarnessConfig cfg = quick_config();
    const ApplicationOutcome a = run_application(Dataset(x, y), 10, 5, cfg, "sep");
    const ApplicationOutcome b = run_application(Dataset(x, y), 10, 5, cfg, "sep");
    CHECK(a.aggregate.find("Lasso")->mean >= 0.99);
    CHECK(a.aggregate.methods.size() == 3);
    CHECK(a.aggregate.find("Oracle") == nullptr);
    for (std::size_t i = 0; i < a.aggregate.methods.size(); ++i) {
        CHECK(a.aggregate.methods[i].mean == b.aggregate.methods[i].mean);
        CHECK(a.aggregate.methods[i].sd == b.aggregate.methods[i].sd);
    }
}

TEST_CASE("permuting test rows leaves every fit unchanged") {
    const ScenarioConfig sc{30, 200, 0.5, 0.5, 1, 8};
    const TruthSpec truth = make_truth(30, 0.5, 0.5);
    const auto [train, test] = split_train_test(gen_dataset(sc, truth, 0), 0.7, 1);
    std::vector<Index> perm(static_cast<std::size_t>(test.n()));
    for (Index i = 0; i < test.n(); ++i) perm[static_cast<std::size_t>(i)] = test.n() - 1 - i;
    const Dataset shuffled = test.subset(perm);
    std::vector<FittedModel> m1, m2;
    const HarnessConfig cfg = quick_config();
    const ReplicationResult r1 = evaluate_split(train, test, 4, cfg, nullptr, &m1);
    const ReplicationResult r2 = evaluate_split(train, shuffled, 4, cfg, nullptr, &m2);
    REQUIRE(m1.size() == m2.size());
    for (std::size_t k = 0; k < m1.size(); ++k) {
        CHECK(m1[k].alpha == m2[k].alpha);
        CHECK(m1[k].beta == m2[k].beta);
        CHECK(r1.outcomes[k].gini == doctest::Approx(r2.outcomes[k].gini).epsilon(1e-15));
    }
}

TEST_CASE("config validation") {
    HarnessConfig c;
    c.train_frac = 1.0;
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    c = HarnessConfig{};
    c.methods.clear();
    CHECK_THROWS_AS(c.validate(), InvalidInput);
    CHECK(HarnessConfig{}.labels(true) == std::vector<std::string>{"Lasso", "LassoML", "StepML", "Oracle"});
}
