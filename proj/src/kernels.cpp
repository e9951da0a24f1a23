#include "logitbench/kernels.hpp"

#include <omp.h>

namespace logitbench::kernels {

namespace {

bool go_parallel(Index work) { return work >= kParallelThreshold && !omp_in_parallel(); }

constexpr Index kRowBlock = 512;

}  // namespace

namespace serial {

void linear_predictor(MatrixCRef x, double alpha, VectorCRef beta, Vector& out) {
    const Index n = x.rows();
    out.resize(n);
    out.setConstant(alpha);
    for (Index j = 0; j < x.cols(); ++j) {
        const double b = beta[j];
        if (b == 0.0) continue;
        const double* col = x.col(j).data();
        for (Index i = 0; i < n; ++i) out[i] += col[i] * b;
    }
}

void xt_vector(MatrixCRef x, VectorCRef r, Vector& out) {
    const Index n = x.rows();
    out.resize(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        const double* col = x.col(j).data();
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += col[i] * r[i];
        out[j] = s;
    }
}

void weighted_sq_norms(MatrixCRef x, VectorCRef w, Vector& out) {
    const Index n = x.rows();
    out.resize(x.cols());
    for (Index j = 0; j < x.cols(); ++j) {
        const double* col = x.col(j).data();
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += w[i] * col[i] * col[i];
        out[j] = s;
    }
}

}  // namespace serial

void linear_predictor(MatrixCRef x, double alpha, VectorCRef beta, Vector& out) {
    const Index n = x.rows();
    if (!go_parallel(n * x.cols())) {
        serial::linear_predictor(x, alpha, beta, out);
        return;
    }
    out.resize(n);
    const Index blocks = (n + kRowBlock - 1) / kRowBlock;
#pragma omp parallel for schedule(static)
    for (Index blk = 0; blk < blocks; ++blk) {
        const Index lo = blk * kRowBlock;
        const Index hi = std::min(n, lo + kRowBlock);
        for (Index i = lo; i < hi; ++i) out[i] = alpha;
        for (Index j = 0; j < x.cols(); ++j) {
            const double b = beta[j];
            if (b == 0.0) continue;
            const double* col = x.col(j).data();
            for (Index i = lo; i < hi; ++i) out[i] += col[i] * b;
        }
    }
}

void xt_vector(MatrixCRef x, VectorCRef r, Vector& out) {
    const Index n = x.rows();
    const Index k = x.cols();
    if (!go_parallel(n * k)) {
        serial::xt_vector(x, r, out);
        return;
    }
    out.resize(k);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < k; ++j) {
        const double* col = x.col(j).data();
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += col[i] * r[i];
        out[j] = s;
    }
}

void weighted_sq_norms(MatrixCRef x, VectorCRef w, Vector& out) {
    const Index n = x.rows();
    const Index k = x.cols();
    if (!go_parallel(n * k)) {
        serial::weighted_sq_norms(x, w, out);
        return;
    }
    out.resize(k);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < k; ++j) {
        const double* col = x.col(j).data();
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += w[i] * col[i] * col[i];
        out[j] = s;
    }
}

}  // namespace logitbench::kernels
