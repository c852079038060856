// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Independent reference computations and random-input generators used by the
// verification suite and the tests. Each oracle avoids the code path it is
// meant to check: grid searches instead of the dual solver, eigendecompositions
// instead of Newton-Schulz, central differences instead of backpropagation.

#pragma once

#include <cstdint>
#include <vector>

#include "mnorm/dualproj.hpp"
#include "mnorm/matrix.hpp"
#include "mnorm/optimizers.hpp"
#include "mnorm/problems.hpp"
#include "mnorm/rng.hpp"

namespace mnorm {

/// Entries with magnitude uniform in [lo, hi] and random signs.
DenseMatrix random_sign_mixed(Rng& rng, std::size_t rows, std::size_t cols, double lo = 0.1, double hi = 1.0);
/// Entries uniform in [lo, hi] (strictly positive for lo > 0).
DenseMatrix random_positive(Rng& rng, std::size_t rows, std::size_t cols, double lo = 0.1, double hi = 1.0);
DenseMatrix random_gaussian(Rng& rng, std::size_t rows, std::size_t cols);
/// rows x cols (rows <= cols) with singular values spaced geometrically from
/// 1 down to 1/condition.
DenseMatrix random_with_condition(Rng& rng, std::size_t rows, std::size_t cols, double condition);

struct GridOptimum {
    Vector point;
    double value = 0.0;
};

/// max <grad, z> over lattice points of [-R, R]^2 (R = the smallest ball
/// extent) lying in every ball. d = 2 only.
GridOptimum grid_max_linear(const Vector& grad, const std::vector<BallSpec>& balls, double resolution = 1e-3);

/// min of the block objective eps1 g1^*(beta - lambda) + epsk gk^*(lambda)
/// over lattice points of [-R, R]^2. d = 2 only.
GridOptimum grid_min_block_objective(const Vector& beta, const BallSpec& ball1, const BallSpec& ballk, double radius,
                                     double resolution = 1e-3);

/// sup_z <z, x> - ||z||_p over a lattice in [-R, R]^2.
double grid_fenchel_sup(const Vector& x, double p, double radius, double resolution);

/// Direct composition of the whitening preprocessing using the
/// eigendecomposition oracle: G = sqrt(n) Q(grad)^{-1} grad, then
/// sqrt(n) (G G^T)^{-1/2} G. Requires rows <= cols.
DenseMatrix swan_reference(const DenseMatrix& grad);

/// Bias-corrected Adam on a single coordinate in long double, returning the
/// parameter after each step.
std::vector<long double> scalar_adam_reference(long double param, long double grad, int steps, long double lr,
                                               const AdamHyper& hyper);

/// Central differences of loss_value with step h in every coordinate.
std::vector<DenseMatrix> finite_difference_grad(const Problem& problem, const std::vector<DenseMatrix>& params,
                                                double h = 1e-5);

/// max over groups of ||a - b||_F / max(||b||_F, floor).
double max_group_relative_error(const std::vector<DenseMatrix>& a, const std::vector<DenseMatrix>& b,
                                double floor = 1e-12);

}  // namespace mnorm
