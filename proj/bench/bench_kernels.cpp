// Serial reference vs OpenMP kernels, and one full replication per method mix.
#include "logitbench/harness.hpp"
#include "logitbench/kernels.hpp"
#include "logitbench/simgen.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace logitbench;

namespace {

Matrix random_matrix(Index n, Index k) { return gen_covariates(n, k, 0.5, 7); }

void BM_SqNormsSerial(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), state.range(1));
    const Vector w = Vector::Constant(x.rows(), 0.25);
    Vector out;
    for (auto _ : state) {
        kernels::serial::weighted_sq_norms(x, w, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_SqNormsParallel(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), state.range(1));
    const Vector w = Vector::Constant(x.rows(), 0.25);
    Vector out;
    for (auto _ : state) {
        kernels::weighted_sq_norms(x, w, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_XtSerial(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), state.range(1));
    const Vector r = Vector::Ones(x.rows());
    Vector out;
    for (auto _ : state) {
        kernels::serial::xt_vector(x, r, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_XtParallel(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), state.range(1));
    const Vector r = Vector::Ones(x.rows());
    Vector out;
    for (auto _ : state) {
        kernels::xt_vector(x, r, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_EtaSerial(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), state.range(1));
    const Vector b = Vector::Constant(x.cols(), 0.1);
    Vector out;
    for (auto _ : state) {
        kernels::serial::linear_predictor(x, 0.3, b, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_EtaParallel(benchmark::State& state) {
    const Matrix x = random_matrix(state.range(0), state.range(1));
    const Vector b = Vector::Constant(x.cols(), 0.1);
    Vector out;
    for (auto _ : state) {
        kernels::linear_predictor(x, 0.3, b, out);
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_Replication(benchmark::State& state) {
    ScenarioConfig s;
    s.p = state.range(0);
    s.n = state.range(1);
    s.n_reps = 1;
    const TruthSpec truth = make_truth(s.p, s.rho, s.ore);
    HarnessConfig cfg;
    int rep = 0;
    for (auto _ : state) {
        auto r = run_replication(s, truth, rep++, cfg);
        benchmark::DoNotOptimize(r.outcomes.data());
    }
}

void BM_GridThreads(benchmark::State& state) {
    ScenarioConfig s;
    s.p = 10;
    s.n = 200;
    s.n_reps = 8;
    HarnessConfig cfg;
    cfg.parallelism = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto g = run_grid({s}, cfg);
        benchmark::DoNotOptimize(g.aggregates.data());
    }
}

}  // namespace

BENCHMARK(BM_SqNormsSerial)->Args({1000, 50})->Args({30000, 50});
BENCHMARK(BM_SqNormsParallel)->Args({1000, 50})->Args({30000, 50});
BENCHMARK(BM_XtSerial)->Args({1000, 50})->Args({30000, 50});
BENCHMARK(BM_XtParallel)->Args({1000, 50})->Args({30000, 50});
BENCHMARK(BM_EtaSerial)->Args({1000, 50})->Args({30000, 50});
BENCHMARK(BM_EtaParallel)->Args({1000, 50})->Args({30000, 50});
BENCHMARK(BM_Replication)->Args({10, 100})->Args({50, 100})->Args({50, 1000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GridThreads)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
