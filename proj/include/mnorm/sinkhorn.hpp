// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// SR-Sinkhorn (alternating row/column l2 normalization) and the classic
// Sinkhorn scaling of A = grad^{(.)2} it reparameterizes:
//
//   u_{k+1} = n 1_m / (A v_k),   v_{k+1} = m 1_n / (A^T u_{k+1})
//
// After L iterations SR-Sinkhorn returns Diag(u_L^{1/2}) grad Diag(v_L^{1/2}).

#pragma once

#include <span>
#include <vector>

#include "mnorm/matrix.hpp"
#include "mnorm/norms.hpp"

namespace mnorm {

struct SinkhornScaling {
    Vector u;
    Vector v;
    int iterations = 0;
};

/// L rounds of X <- sqrt(n) Q(X)^{-1} X then X <- sqrt(m) X R(X)^{-1}.
DenseMatrix sr_sinkhorn(const DenseMatrix& grad, int iterations, Mode mode = Mode::kStrict);

/// Strict mode demands entrywise positive A; guarded mode accepts zeros
/// (denominators floored). Negative entries are always a DomainError.
SinkhornScaling classic_sinkhorn(const DenseMatrix& a, int iterations, Mode mode = Mode::kStrict);

/// Relative Frobenius distance between sr_sinkhorn(grad, L) and the scaling
/// reconstructed from classic_sinkhorn(grad^2, L).
double sr_equivalence_check(const DenseMatrix& grad, int iterations);

/// Hilbert projective metric log(max a/b) - log(min a/b).
double hilbert_metric(const Vector& a, const Vector& b);

/// e_k = d_H(u_k, u*) for k = 1..L, with u* the scaling after 4L iterations.
std::vector<double> convergence_rate_estimate(const DenseMatrix& grad, int iterations);

/// Coefficient of variation of the successive ratios e_{k+1}/e_k over the last
/// half of the sequence. Returns 0 when every error is zero (immediate
/// convergence) and NaN when the tail holds fewer than two usable ratios.
double tail_ratio_variation(std::span<const double> errors);

struct SinkhornTraceRow {
    int k = 0;
    double row_residual = 0.0;  // max_i | ||X_i,:|| - sqrt(n) | / sqrt(n)
    double col_residual = 0.0;  // max_j | ||X_:,j|| - sqrt(m) | / sqrt(m)
    double hilbert_error = 0.0; // d_H(u_k, u*); NaN when grad has zero entries
};

struct SinkhornTrace {
    DenseMatrix x;
    std::vector<SinkhornTraceRow> rows;
};

SinkhornTrace sinkhorn_trace(const DenseMatrix& grad, int iterations, Mode mode = Mode::kStrict);

}  // namespace mnorm
