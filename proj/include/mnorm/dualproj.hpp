// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Convex relaxation of multi-normalization for vectors:
//
//   max <grad, z>  s.t.  g_i(z) <= eps_i,  i = 1..K
//
// solved through its Fenchel dual
//
//   min sum_i eps_i g_i^*(lambda_i)  s.t.  sum_i lambda_i = grad
//
// by coordinate descent over lambda_2..lambda_K (lambda_1 absorbs the
// constraint), each block handled by a Chambolle-Pock primal-dual loop.
// Only vector l1, l2 and l-infinity balls are supported.

#pragma once

#include <vector>

#include "mnorm/matrix.hpp"
#include "mnorm/norms.hpp"

namespace mnorm {

struct BallSpec {
    NormSpec norm = NormSpec::vector_lp(2.0);
    double radius = 1.0;
};

/// Throws ConfigError unless the norm is a vector l1/l2/l-inf norm and the
/// radius is positive.
void validate_ball(const BallSpec& ball);

struct Subgradient {
    Vector g;
    /// Set for x = 0, where the subdifferential is the whole dual ball and
    /// g is returned as zero.
    bool zero_input = false;
};

/// Canonical element of the subdifferential of ||x||_p.
Subgradient lp_subdifferential(const Vector& x, double p);

/// Euclidean projection onto {z : g(z) <= radius}.
Vector project_ball(const Vector& x, const BallSpec& ball);

/// prox of step * radius * g^* at x, computed as x - proj onto the g-ball of
/// radius step * radius (Moreau).
Vector prox_scaled_dual_norm(const Vector& x, double step, const BallSpec& ball);

struct ChambollePockOptions {
    double eta1 = 0.9;
    double eta2 = 0.9;
    int iterations = 500;
};

struct ChambollePockState {
    Vector lambda;
    /// Dual iterate; lives in the ball of g_1.
    Vector z;
    double objective = 0.0;
};

/// eps_1 g_1^*(beta - lambda) + eps_k g_k^*(lambda).
double block_objective(const Vector& beta, const Vector& lambda, const BallSpec& ball1, const BallSpec& ballk);

/// Minimizes block_objective over lambda. Starts from `warm` when given
/// (otherwise from zero) and returns the best iterate seen, never worse than
/// lambda = 0 or lambda = beta.
ChambollePockState chambolle_pock(const Vector& beta, const BallSpec& ball1, const BallSpec& ballk,
                                  const ChambollePockOptions& options = {}, const ChambollePockState* warm = nullptr);

struct DualSolverOptions {
    int sweeps = 50;
    ChambollePockOptions inner;
    /// Stop once the dual objective moves less than this between sweeps.
    double tolerance = 1e-9;
};

struct DualSolution {
    /// lambda_1 .. lambda_K; they sum to the gradient.
    std::vector<Vector> lambdas;
    double objective = 0.0;
    /// Dual objective after each sweep.
    std::vector<double> history;
    int sweeps = 0;
    Vector primal;
    double primal_value = 0.0;
    /// objective - primal_value (non-negative by weak duality).
    double gap = 0.0;
};

double dual_objective(const std::vector<Vector>& lambdas, const std::vector<BallSpec>& balls);

DualSolution coordinate_dual_descent(const Vector& grad, const std::vector<BallSpec>& balls,
                                     const DualSolverOptions& options = {});

/// eps_k * P_{g_k}(lambda_k); throws DegenerateInputError for lambda_k = 0.
Vector recover_primal(const Vector& lambda_k, const BallSpec& ball);

/// max_i g_i(z) / eps_i; z is feasible iff this is <= 1.
double max_constraint_ratio(const Vector& z, const std::vector<BallSpec>& balls);

/// Full solve including the primal point and duality gap. K = 1 is answered
/// in closed form.
DualSolution convex_multiproj_solve(const Vector& grad, const std::vector<BallSpec>& balls,
                                    const DualSolverOptions& options = {});

Vector convex_multiproj(const Vector& grad, const std::vector<BallSpec>& balls, const DualSolverOptions& options = {});

}  // namespace mnorm
