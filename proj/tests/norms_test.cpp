// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/norms.hpp"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "mnorm/error.hpp"
#include "mnorm/oracles.hpp"
#include "mnorm/rng.hpp"
#include "test_util.hpp"

namespace mnorm {
namespace {

using testing::MatrixNear;
using testing::VectorNear;

constexpr double kInf = std::numeric_limits<double>::infinity();

DenseMatrix wide_identity() {
    return DenseMatrix::from_rows({{1, 0, 0}, {0, 1, 0}});
}

TEST(NormEvalTest, CatalogExamples) {
    EXPECT_DOUBLE_EQ(norm_eval(NormSpec::row_l2_max(), DenseMatrix::identity(2)), 1.0 / std::sqrt(2.0));
    EXPECT_DOUBLE_EQ(norm_eval(NormSpec::col_l2_max(), DenseMatrix(2, 3, 1.0)), 1.0);
    EXPECT_NEAR(norm_eval(NormSpec::spectral_max(), wide_identity()), 1.0 / std::sqrt(3.0), 1e-14);
    EXPECT_DOUBLE_EQ(norm_eval(NormSpec::vector_lp(1.0), Vector{2, -3}), 5.0);
}

TEST(NormEvalTest, ArityIsChecked) {
    EXPECT_THROW(norm_eval(NormSpec::row_l2_max(), Vector{1, 2}), TypeError);
    EXPECT_THROW(norm_eval(NormSpec::vector_lp(2.0), DenseMatrix(2, 2, 1.0)), TypeError);
    EXPECT_NO_THROW(norm_eval(NormSpec::vector_lp(2.0), DenseMatrix(1, 3, 1.0)));
}

TEST(NormEvalTest, InvalidSpecsRejected) {
    EXPECT_THROW(NormSpec::vector_lp(0.5), ConfigError);
    EXPECT_THROW(norm_eval(NormSpec::row_l2_max(-1.0), DenseMatrix(2, 2, 1.0)), ConfigError);
}

TEST(ProjectionTest, CatalogExamples) {
    EXPECT_TRUE(MatrixNear(normalized_projection(NormSpec::row_l2_max(), DenseMatrix::identity(2)),
                           std::sqrt(2.0) * DenseMatrix::identity(2), 1e-15));
    EXPECT_TRUE(MatrixNear(normalized_projection(NormSpec::col_l2_max(), DenseMatrix(2, 3, 1.0)),
                           DenseMatrix(2, 3, 1.0), 1e-15));
    const double r = std::sqrt(2.0);
    EXPECT_TRUE(MatrixNear(normalized_projection(NormSpec::row_l2_max(), DenseMatrix::from_rows({{3, 4}, {0, 2}})),
                           DenseMatrix::from_rows({{3 * r / 5, 4 * r / 5}, {0, r}}), 1e-15));
    EXPECT_TRUE(VectorNear(normalized_projection(NormSpec::vector_lp(kInf), Vector{2, -3}), {1, -1}, 0.0));
    EXPECT_TRUE(VectorNear(normalized_projection(NormSpec::vector_lp(2.0), Vector{3, 4}), {0.6, 0.8}, 1e-15));
    EXPECT_TRUE(VectorNear(normalized_projection(NormSpec::vector_lp(1.0), Vector{1, -3, 3}), {0, -1, 0}, 0.0));
}

TEST(ProjectionTest, SpectralProjectionOfOrthonormalRows) {
    EXPECT_TRUE(MatrixNear(normalized_projection(NormSpec::spectral_max(), wide_identity()),
                           std::sqrt(3.0) * wide_identity(), 1e-12));
}

TEST(ProjectionTest, ZeroInputStrictVersusGuarded) {
    EXPECT_THROW(normalized_projection(NormSpec::row_l2_max(), DenseMatrix(2, 2)), DegenerateInputError);
    EXPECT_EQ(normalized_projection(NormSpec::row_l2_max(), DenseMatrix(2, 2), Mode::kGuarded), DenseMatrix(2, 2));
    EXPECT_THROW(normalized_projection(NormSpec::vector_lp(2.0), Vector{0, 0}), DegenerateInputError);
}

TEST(ProjectionTest, RankDeficientSpectralInput) {
    const DenseMatrix rank_one = DenseMatrix::from_rows({{1, 2, 3}, {2, 4, 6}});
    EXPECT_THROW(normalized_projection(NormSpec::spectral_max(), rank_one), DegenerateInputError);
    const DenseMatrix guarded = normalized_projection(NormSpec::spectral_max(), rank_one, Mode::kGuarded);
    EXPECT_TRUE(guarded.all_finite());
}

TEST(ProjectionTest, SingularValuesMatchReference) {
    // Reference from an LAPACK SVD.
    EXPECT_TRUE(VectorNear(singular_values(DenseMatrix::from_rows({{3, 1, 0}, {1, 2, 1}})),
                           {3.658574149465131, 1.617045204335827}, 1e-12));
}

TEST(DualNormTest, Examples) {
    EXPECT_DOUBLE_EQ(dual_norm_eval(NormSpec::vector_lp(1.0), Vector{2, -3}), 3.0);
    EXPECT_NEAR(dual_norm_eval(NormSpec::row_l2_max(), DenseMatrix::identity(2)), 2.0 * std::sqrt(2.0), 1e-14);
    EXPECT_EQ(dual_norm_eval(NormSpec::spectral_max(), DenseMatrix(2, 3)), 0.0);
    EXPECT_EQ(dual_norm_eval(NormSpec::vector_lp(kInf), Vector{0, 0}), 0.0);
    EXPECT_DOUBLE_EQ(dual_exponent(1.0), kInf);
    EXPECT_DOUBLE_EQ(dual_exponent(kInf), 1.0);
    EXPECT_DOUBLE_EQ(dual_exponent(3.0), 1.5);
}

// <x, P(x)> = g*(x) and g(P(x)) = 1, for every matrix kind on random inputs.
TEST(DualNormTest, PairingIdentityProperty) {
    Rng rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 2 + rng.below(5);
        const std::size_t n = m + rng.below(5);
        const DenseMatrix x = random_gaussian(rng, m, n);
        for (const NormSpec& spec : {NormSpec::row_l2_max(), NormSpec::col_l2_max(), NormSpec::spectral_max()}) {
            const DenseMatrix p = normalized_projection(spec, x);
            EXPECT_NEAR(frobenius_inner(x, p), dual_norm_eval(spec, x), 1e-9 * dual_norm_eval(spec, x));
            EXPECT_NEAR(norm_eval(spec, p), 1.0, 1e-9);
        }
    }
}

// A projection maximizes <x, z> on the unit sphere: random unit-norm
// competitors never do better.
TEST(DualNormTest, ProjectionBeatsRandomSpherePoints) {
    Rng rng(202);
    const DenseMatrix x = random_gaussian(rng, 3, 5);
    for (const NormSpec& spec : {NormSpec::row_l2_max(), NormSpec::col_l2_max(), NormSpec::spectral_max()}) {
        const double best = frobenius_inner(x, normalized_projection(spec, x));
        for (int i = 0; i < 200; ++i) {
            DenseMatrix z = random_gaussian(rng, 3, 5);
            z *= 1.0 / norm_eval(spec, z);
            EXPECT_LE(frobenius_inner(x, z), best + 1e-12);
        }
    }
}

TEST(ProjectionConstantTest, Examples) {
    EXPECT_DOUBLE_EQ(projection_l2_constant(NormSpec::row_l2_max(std::sqrt(3.0)), 2, 3).c, std::sqrt(6.0));
    EXPECT_DOUBLE_EQ(projection_l2_constant(NormSpec::spectral_max(2.0), 4, 4).c, 4.0);
    EXPECT_DOUBLE_EQ(projection_l2_constant(NormSpec::vector_lp(kInf), 1, 5).c, std::sqrt(5.0));
    EXPECT_THROW(projection_l2_constant(NormSpec::vector_lp(1.0), 1, 5), AssumptionViolatedError);
}

// Every projection has Frobenius length c regardless of the input.
TEST(ProjectionConstantTest, LengthIsInputIndependent) {
    Rng rng(303);
    for (const NormSpec& spec : {NormSpec::row_l2_max(), NormSpec::col_l2_max(), NormSpec::spectral_max(),
                                 NormSpec::row_l2_max(0.7)}) {
        const double c = projection_l2_constant(spec, 3, 6).c;
        for (int i = 0; i < 10; ++i) {
            EXPECT_NEAR(frobenius_norm(normalized_projection(spec, random_gaussian(rng, 3, 6))), c, 1e-10 * c);
        }
    }
}

TEST(RescaleTest, Examples) {
    const NormSpec row = NormSpec::row_l2_max(std::sqrt(3.0));
    EXPECT_EQ(rescale_norm(row, std::sqrt(6.0), 2, 3), row);
    EXPECT_THROW(rescale_norm(row, 0.0, 2, 3), ConfigError);
    const NormSpec unit = rescale_norm(NormSpec::row_l2_max(), 1.0, 2, 3);
    Rng rng(404);
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(frobenius_norm(normalized_projection(unit, random_gaussian(rng, 2, 3))), 1.0, 1e-14);
    }
}

TEST(NormSpecTest, TextRoundTrip) {
    for (const NormSpec& spec : {NormSpec::row_l2_max(), NormSpec::col_l2_max(2.5), NormSpec::spectral_max(),
                                 NormSpec::vector_lp(kInf), NormSpec::vector_lp(1.0, 0.5)}) {
        EXPECT_EQ(NormSpec::parse(spec.to_string()), spec) << spec.to_string();
    }
    EXPECT_THROW(NormSpec::parse("frobenius"), ConfigError);
    EXPECT_THROW(NormSpec::parse("vector_lp"), ConfigError);
    EXPECT_THROW(NormSpec::parse("row_l2_max:p=2"), ConfigError);
}

}  // namespace
}  // namespace mnorm
