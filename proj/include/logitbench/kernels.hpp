#pragma once

// Dense inner loops shared by the solvers. The default versions are OpenMP
// parallel over independent outputs (row blocks or columns), so each output
// is accumulated in the same order as the serial reference and results are
// bitwise identical for any thread count. The serial versions are kept as the
// reference implementation for tests and benchmarks.

#include "logitbench/model.hpp"

namespace logitbench::kernels {

// Blocks and segments bind without a copy.
using MatrixCRef = Eigen::Ref<const Matrix>;
using VectorCRef = Eigen::Ref<const Vector>;

/// out = alpha + x * beta
void linear_predictor(MatrixCRef x, double alpha, VectorCRef beta, Vector& out);

/// out = x^T r
void xt_vector(MatrixCRef x, VectorCRef r, Vector& out);

/// out_j = sum_i w_i x_ij^2
void weighted_sq_norms(MatrixCRef x, VectorCRef w, Vector& out);

/// Work size (rows * columns) below which the parallel versions stay serial.
inline constexpr Index kParallelThreshold = 1 << 15;

namespace serial {
void linear_predictor(MatrixCRef x, double alpha, VectorCRef beta, Vector& out);
void xt_vector(MatrixCRef x, VectorCRef r, Vector& out);
void weighted_sq_norms(MatrixCRef x, VectorCRef w, Vector& out);
}  // namespace serial

}  // namespace logitbench::kernels
