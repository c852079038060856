// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Alternating multi-normalization: apply P_{g_1}, ..., P_{g_K} cyclically L
// times. The returned iterate is exact for the last norm in the list and
// approximate (up to the fixed-point residual) for the others.

#pragma once

#include <span>
#include <vector>

#include "mnorm/matrix.hpp"
#include "mnorm/norms.hpp"

namespace mnorm {

struct MultiNormOptions {
    Mode mode = Mode::kStrict;
    /// Keep every projected matrix x_1 .. x_{LK} in the report.
    bool keep_iterates = false;
    /// Compute the fixed-point residual after each of the L cycles.
    bool track_residuals = false;
    /// Record inner products, norms and the final residual. Optimizers turn
    /// this off; the projected iterate is unaffected.
    bool diagnostics = true;
};

struct MultiNormReport {
    std::vector<DenseMatrix> iterates;
    /// <x_j, x_{j+1}> for consecutive projections j >= 1 (LK - 1 entries).
    std::vector<double> inner_products;
    /// ||x_j||_F for j = 0 .. LK; entry 0 is the raw input.
    std::vector<double> l2_norms;
    /// Fixed-point residual after each cycle (only with track_residuals).
    std::vector<double> cycle_residuals;
    double final_residual = 0.0;
    int iterations = 0;
};

struct MultiNormResult {
    DenseMatrix x;
    MultiNormReport report;
};

MultiNormResult multi_normalize(const DenseMatrix& grad, std::span<const NormSpec> norms, int iterations,
                                const MultiNormOptions& options = {});

/// max_g ||P_g(x) - x||_F; zero exactly on the common fixed-point set.
double fixed_point_residual(const DenseMatrix& x, std::span<const NormSpec> norms, Mode mode = Mode::kStrict);

struct SphereMembership {
    /// |g_i(x) - 1| per norm.
    std::vector<double> norm_deviations;
    /// | ||x||_F - c | / c.
    double l2_deviation = 0.0;
    double c = 0.0;

    [[nodiscard]] double max_deviation() const;
};

/// Distances of x from the unit spheres of every norm and from the sphere of
/// radius c. Throws ConfigError when the norms do not share one projection
/// constant or do not apply to x.
SphereMembership sphere_membership_check(const DenseMatrix& x, std::span<const NormSpec> norms);

/// (row_l2_max, spectral_max) with default scales.
std::vector<NormSpec> swan_norms();
/// (row_l2_max, col_l2_max) with default scales.
std::vector<NormSpec> sinkhorn_norms();

}  // namespace mnorm
