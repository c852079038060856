// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/matrix.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "mnorm/error.hpp"
#include "mnorm/oracles.hpp"
#include "mnorm/rng.hpp"
#include "test_util.hpp"

namespace mnorm {
namespace {

using testing::MatrixNear;
using testing::VectorNear;

TEST(MatrixTest, IdentityProductIsNoOp) {
    const DenseMatrix b = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    EXPECT_EQ(matmul(DenseMatrix::identity(2), b), b);
}

TEST(MatrixTest, RowNormsOfPythagoreanRows) {
    EXPECT_TRUE(VectorNear(row_norms(DenseMatrix::from_rows({{3, 4}, {0, 2}})), {5.0, 2.0}, 0.0));
}

TEST(MatrixTest, FrobeniusOfOnes) {
    EXPECT_DOUBLE_EQ(frobenius_norm(DenseMatrix(2, 3, 1.0)), std::sqrt(6.0));
}

TEST(MatrixTest, HadamardSquare) {
    EXPECT_EQ(hadamard_square(DenseMatrix::from_rows({{1, -2}})), DenseMatrix::from_rows({{1, 4}}));
    EXPECT_EQ(hadamard_square(DenseMatrix(2, 2)), DenseMatrix(2, 2));
}

TEST(MatrixTest, HadamardSquareMatchesScalarLoop) {
    Rng rng(7);
    const DenseMatrix a = random_gaussian(rng, 3, 4);
    const DenseMatrix sq = hadamard_square(a);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 4; ++j) {
            EXPECT_EQ(sq(i, j), a(i, j) * a(i, j));
        }
    }
}

TEST(MatrixTest, TransposedProductsAgreeWithExplicitTranspose) {
    Rng rng(11);
    const DenseMatrix a = random_gaussian(rng, 3, 5);
    const DenseMatrix b = random_gaussian(rng, 4, 5);
    const DenseMatrix c = random_gaussian(rng, 3, 2);
    EXPECT_TRUE(MatrixNear(matmul_nt(a, b), matmul(a, transpose(b)), 1e-14));
    EXPECT_TRUE(MatrixNear(matmul_tn(a, c), matmul(transpose(a), c), 1e-14));
}

TEST(MatrixTest, ShapeMismatchThrows) {
    EXPECT_THROW(matmul(DenseMatrix(2, 3), DenseMatrix(2, 3)), DimensionError);
    EXPECT_THROW(DenseMatrix(2, 2, std::vector<double>{1, 2, 3}), DimensionError);
    EXPECT_THROW(DenseMatrix(2, 3) + DenseMatrix(3, 2), DimensionError);
}

TEST(MatrixTest, NonFiniteEntriesRejected) {
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_THROW(DenseMatrix(1, 2, std::vector<double>{1.0, inf}), DomainError);
    EXPECT_THROW(Vector(std::vector<double>{std::nan("")}), DomainError);
}

TEST(MatrixTest, DiagScale) {
    const DenseMatrix a(2, 2, 1.0);
    EXPECT_EQ(diag_scale(Vector{2, 3}, a, Vector{5, 7}), DenseMatrix::from_rows({{10, 14}, {15, 21}}));
}

TEST(MatrixTest, LpNorms) {
    const Vector x{2, -3};
    EXPECT_DOUBLE_EQ(lp_norm(x, 1.0), 5.0);
    EXPECT_DOUBLE_EQ(lp_norm(x, 2.0), std::sqrt(13.0));
    EXPECT_DOUBLE_EQ(lp_norm(x, std::numeric_limits<double>::infinity()), 3.0);
}

TEST(MatrixTest, RelativeErrorFallsBackToAbsoluteForZeroReference) {
    EXPECT_DOUBLE_EQ(relative_error(DenseMatrix(1, 1, 3.0), DenseMatrix(1, 1)), 3.0);
    EXPECT_DOUBLE_EQ(relative_error(DenseMatrix(1, 1, 3.0), DenseMatrix(1, 1, 2.0)), 0.5);
}

TEST(MatrixTest, TextRoundTripIsExact) {
    Rng rng(3);
    const DenseMatrix a = random_gaussian(rng, 4, 3);
    std::stringstream ss;
    write_matrix(ss, a);
    EXPECT_EQ(read_matrix(ss), a);
}

TEST(MatrixTest, MalformedTextRejected) {
    std::stringstream missing("2 2\n1 2\n3\n");
    EXPECT_THROW(read_matrix(missing), ParseError);
    std::stringstream garbage("1 2\n1 x\n");
    EXPECT_THROW(read_matrix(garbage), ParseError);
}

TEST(MatrixTest, FormatDoubleRoundTrips) {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) {
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
}

TEST(RngTest, DeterministicAndSeedSensitive) {
    Rng a(42);
    Rng b(42);
    Rng c(43);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const std::uint64_t x = a.next_u64();
        EXPECT_EQ(x, b.next_u64());
        differs = differs || x != c.next_u64();
    }
    EXPECT_TRUE(differs);
}

TEST(RngTest, UniformAndBelowStayInRange) {
    Rng rng(5);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        ASSERT_LT(rng.below(7), 7u);
        sum += rng.normal();
    }
    EXPECT_LT(std::abs(sum / 10000.0), 0.05);
}

}  // namespace
}  // namespace mnorm
