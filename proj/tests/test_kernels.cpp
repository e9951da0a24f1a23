#include "logitbench/kernels.hpp"
#include "logitbench/rng.hpp"

#include <doctest.h>

#include <omp.h>

#include <random>

using namespace logitbench;

namespace {

Matrix random_matrix(Index n, Index p, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> z;
    Matrix x(n, p);
    for (Index j = 0; j < p; ++j)
        for (Index i = 0; i < n; ++i) x(i, j) = z(rng);
    return x;
}

Vector random_vector(Index n, std::uint64_t seed) { return random_matrix(n, 1, seed).col(0); }

}  // namespace

TEST_CASE("parallel kernels are bitwise identical to the serial reference") {
    // sizes straddle the parallel threshold
    for (auto [n, p] : {std::pair<Index, Index>{50, 3}, {4000, 9}, {20000, 7}}) {
        const Matrix x = random_matrix(n, p, 1);
        const Vector beta = random_vector(p, 2);
        const Vector v = random_vector(n, 3);
        const Vector w = v.cwiseAbs();
        for (int threads : {1, 2, 4}) {
            omp_set_num_threads(threads);
            Vector a, b;
            kernels::linear_predictor(x, 0.3, beta, a);
            kernels::serial::linear_predictor(x, 0.3, beta, b);
            CHECK(a == b);
            kernels::xt_vector(x, v, a);
            kernels::serial::xt_vector(x, v, b);
            CHECK(a == b);
            kernels::weighted_sq_norms(x, w, a);
            kernels::serial::weighted_sq_norms(x, w, b);
            CHECK(a == b);
        }
    }
    omp_set_num_threads(1);
}

TEST_CASE("serial kernels agree with Eigen expressions") {
    const Matrix x = random_matrix(300, 5, 7);
    const Vector beta = random_vector(5, 8);
    const Vector w = random_vector(300, 9).cwiseAbs();
    Vector out;
    kernels::serial::linear_predictor(x, -1.0, beta, out);
    CHECK((out - ((x * beta).array() - 1.0).matrix()).cwiseAbs().maxCoeff() < 1e-12);
    kernels::serial::xt_vector(x, w, out);
    CHECK((out - x.transpose() * w).cwiseAbs().maxCoeff() < 1e-12);
    kernels::serial::weighted_sq_norms(x, w, out);
    for (Index j = 0; j < 5; ++j) {
        CHECK(out[j] == doctest::Approx((w.array() * x.col(j).array().square()).sum()).epsilon(1e-12));
    }
}
