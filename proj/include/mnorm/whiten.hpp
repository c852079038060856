// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Whitening W -> (W W^T)^{-1/2} W for wide matrices (rows <= cols).

#pragma once

#include "mnorm/matrix.hpp"

namespace mnorm {

/// Smallest admissible eigenvalue of W W^T, relative to ||W W^T||_F.
inline constexpr double kRankTolerance = 1e-12;
inline constexpr int kDefaultNewtonSchulzIters = 8;

struct SymmetricEigen {
    Vector values;        // ascending
    DenseMatrix vectors;  // column k is the eigenvector for values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
SymmetricEigen symmetric_eigen(const DenseMatrix& s, double tol = 1e-15, int max_sweeps = 100);

/// (W W^T)^{-1/2} W through the eigendecomposition of W W^T.
/// Throws SingularInputError when an eigenvalue falls below the rank tolerance.
DenseMatrix eig_whiten_oracle(const DenseMatrix& w);

/// Same quantity with eigenvalues below the rank tolerance treated as zero
/// (pseudo-inverse square root); never throws on rank deficiency.
DenseMatrix eig_whiten_pseudo(const DenseMatrix& w);

struct NewtonSchulzResult {
    DenseMatrix whitened;
    int iterations = 0;
    /// ||I - Z_k Y_k||_F after each iteration.
    std::vector<double> residuals;
};

/// Coupled Newton-Schulz iteration for S^{-1/2} with S = W W^T, pre-scaled by
/// 1/||S||_F. Runs `iters` iterations, or stops early once the residual drops
/// below `tol` (tol = 0 disables the early exit). Throws SingularInputError
/// on a rank-deficient S or a diverging iteration.
NewtonSchulzResult newton_schulz_whiten_traced(const DenseMatrix& w, int iters, double tol = 0.0);

DenseMatrix newton_schulz_whiten(const DenseMatrix& w, int iters = kDefaultNewtonSchulzIters);

}  // namespace mnorm
