// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/multinorm.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "mnorm/error.hpp"
#include "mnorm/oracles.hpp"
#include "mnorm/rng.hpp"
#include "test_util.hpp"

namespace mnorm {
namespace {

using testing::MatrixNear;

TEST(MultiNormalizeTest, SwanPairMatchesDirectComposition) {
    const DenseMatrix g = DenseMatrix::from_rows({{1.0, -2.0, 0.5, 3.0}, {0.2, 1.0, -1.0, 0.5}});
    // Reference: row normalization then whitening, both via a LAPACK
    // symmetric eigensolver.
    const DenseMatrix expected = testing::Rows(
        2, 4,
        {0.5525053502487974, -0.9738363867126533, 0.1731871428648017, 1.6481464569046107, 0.3038602044516515,
         1.256377698210925, -1.312718410506782, 0.7784307485610811});
    const std::vector<NormSpec> norms = swan_norms();
    EXPECT_TRUE(MatrixNear(multi_normalize(g, norms, 1).x, expected, 1e-12));
    EXPECT_LE(relative_error(multi_normalize(g, norms, 1).x, swan_reference(g)), 1e-12);
}

TEST(MultiNormalizeTest, SquareSwanReachesFixedPointInOneCycle) {
    Rng rng(1);
    const std::vector<NormSpec> norms = swan_norms();
    for (int i = 0; i < 10; ++i) {
        const MultiNormResult r = multi_normalize(random_gaussian(rng, 3, 3), norms, 1);
        EXPECT_LE(r.report.final_residual, 1e-8);
    }
}

TEST(MultiNormalizeTest, DoublyNormalizedInputUnchanged) {
    const DenseMatrix ones(2, 3, 1.0);
    const std::vector<NormSpec> norms = sinkhorn_norms();
    const MultiNormResult r = multi_normalize(ones, norms, 5);
    EXPECT_TRUE(MatrixNear(r.x, ones, 1e-15));
    EXPECT_EQ(r.report.final_residual, 0.0);
}

TEST(MultiNormalizeTest, ReportShapes) {
    Rng rng(2);
    MultiNormOptions opts;
    opts.keep_iterates = true;
    opts.track_residuals = true;
    const std::vector<NormSpec> norms = sinkhorn_norms();
    const MultiNormResult r = multi_normalize(random_gaussian(rng, 4, 6), norms, 3, opts);
    EXPECT_EQ(r.report.iterates.size(), 6u);
    EXPECT_EQ(r.report.inner_products.size(), 5u);
    EXPECT_EQ(r.report.l2_norms.size(), 7u);
    EXPECT_EQ(r.report.cycle_residuals.size(), 3u);
    EXPECT_EQ(r.report.iterations, 3);
    EXPECT_EQ(r.report.iterates.back(), r.x);
}

TEST(MultiNormalizeTest, DiagnosticsDoNotChangeTheIterate) {
    Rng rng(3);
    const DenseMatrix g = random_gaussian(rng, 5, 7);
    MultiNormOptions quiet;
    quiet.diagnostics = false;
    const std::vector<NormSpec> norms = sinkhorn_norms();
    EXPECT_EQ(multi_normalize(g, norms, 4, quiet).x, multi_normalize(g, norms, 4).x);
}

TEST(MultiNormalizeTest, Preconditions) {
    const std::vector<NormSpec> none;
    const std::vector<NormSpec> norms = sinkhorn_norms();
    EXPECT_THROW(multi_normalize(DenseMatrix(2, 2, 1.0), none, 1), ConfigError);
    EXPECT_THROW(multi_normalize(DenseMatrix(2, 2, 1.0), norms, 0), ConfigError);
    EXPECT_THROW(multi_normalize(DenseMatrix(2, 2), norms, 1), DegenerateInputError);
}

// Consecutive inner products never decrease and approach c^2 = n m.
TEST(MultiNormalizeTest, InnerProductsAreMonotoneProperty) {
    Rng rng(4);
    const std::vector<NormSpec> norms = sinkhorn_norms();
    for (int i = 0; i < 20; ++i) {
        const std::size_t m = 2 + rng.below(8);
        const std::size_t n = 2 + rng.below(12);
        const MultiNormResult r = multi_normalize(random_sign_mixed(rng, m, n), norms, 30);
        const std::vector<double>& ip = r.report.inner_products;
        for (std::size_t k = 1; k < ip.size(); ++k) {
            EXPECT_GE(ip[k], ip[k - 1] - 1e-9);
        }
        EXPECT_LE(ip.back(), static_cast<double>(m * n) * (1.0 + 1e-12));
    }
}

// Each projected iterate has Frobenius norm c.
TEST(MultiNormalizeTest, IteratesLieOnTheCommonSphereProperty) {
    Rng rng(5);
    MultiNormOptions opts;
    opts.keep_iterates = true;
    const std::vector<NormSpec> norms = swan_norms();
    const DenseMatrix g = random_gaussian(rng, 3, 7);
    const MultiNormResult r = multi_normalize(g, norms, 4, opts);
    for (const DenseMatrix& x : r.report.iterates) {
        EXPECT_NEAR(frobenius_norm(x), std::sqrt(21.0), 1e-9);
    }
}

TEST(FixedPointResidualTest, Examples) {
    const std::vector<NormSpec> norms = sinkhorn_norms();
    EXPECT_EQ(fixed_point_residual(DenseMatrix(2, 3, 1.0), norms), 0.0);
    EXPECT_NEAR(fixed_point_residual(std::sqrt(2.0) * DenseMatrix::identity(2), norms), 0.0, 1e-15);
    Rng rng(6);
    const MultiNormResult r = multi_normalize(random_sign_mixed(rng, 8, 32), norms, 100);
    EXPECT_LE(fixed_point_residual(r.x, norms), 1e-8);
}

TEST(SphereMembershipTest, ConvergedIterateIsOnEverySphere) {
    Rng rng(7);
    const std::vector<NormSpec> norms = sinkhorn_norms();
    const MultiNormResult r = multi_normalize(random_sign_mixed(rng, 6, 9), norms, 200);
    const SphereMembership s = sphere_membership_check(r.x, norms);
    EXPECT_LE(s.max_deviation(), 1e-7);
    EXPECT_NEAR(sphere_membership_check(DenseMatrix(2, 3, 1.0), norms).max_deviation(), 0.0, 1e-15);
}

TEST(SphereMembershipTest, MismatchedConstantsRejected) {
    const std::vector<NormSpec> mixed = {NormSpec::row_l2_max(), NormSpec::vector_lp(2.0)};
    EXPECT_THROW(sphere_membership_check(DenseMatrix(1, 4, 1.0), mixed), ConfigError);
}

}  // namespace
}  // namespace mnorm
