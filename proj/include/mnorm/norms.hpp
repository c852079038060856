// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Norm catalog: evaluation, dual norms and closed-form normalized
// projections P_g(x) = argmax_{g(z) = 1} <x, z>.
//
// Every norm carries a positive divisor `scale`: g(x) = base(x) / scale. When
// no explicit scale is given the dimension-dependent default is used:
//   row_l2_max    sqrt(cols)        max_i ||X_i,:||_2 / scale
//   col_l2_max    sqrt(rows)        max_j ||X_:,j||_2 / scale
//   spectral_max  sqrt(max(m, n))   sigma_max(X) / scale
//   vector_lp     1                 ||x||_p / scale
// With the defaults all three matrix kinds project onto matrices of
// Frobenius norm sqrt(m n).

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "mnorm/matrix.hpp"

namespace mnorm {

enum class NormKind { kRowL2Max, kColL2Max, kSpectralMax, kVectorLp };

/// Strict mode rejects zero rows/columns/vectors and rank-deficient input.
/// Guarded mode floors denominators at kGuardFloor so degenerate parts map
/// to zero, and uses a pseudo-inverse square root for whitening.
enum class Mode { kStrict, kGuarded };

inline constexpr double kGuardFloor = 1e-30;

struct NormSpec {
    NormKind kind = NormKind::kRowL2Max;
    double p = 2.0;
    std::optional<double> scale;

    static NormSpec row_l2_max(std::optional<double> scale = std::nullopt);
    static NormSpec col_l2_max(std::optional<double> scale = std::nullopt);
    static NormSpec spectral_max(std::optional<double> scale = std::nullopt);
    static NormSpec vector_lp(double p, std::optional<double> scale = std::nullopt);

    [[nodiscard]] bool is_matrix_kind() const noexcept { return kind != NormKind::kVectorLp; }
    /// The divisor in effect for an m x n input (for vectors: m*n entries).
    [[nodiscard]] double resolved_scale(std::size_t rows, std::size_t cols) const;

    /// Text form used in configs, e.g. "row_l2_max", "vector_lp:p=inf",
    /// "col_l2_max:scale=2".
    [[nodiscard]] std::string to_string() const;
    static NormSpec parse(std::string_view text);

    bool operator==(const NormSpec&) const = default;
};

/// Dual exponent q with 1/p + 1/q = 1.
double dual_exponent(double p);

// Matrix arity. vector_lp is accepted only for vector-shaped matrices (one
// row or one column); matrix kinds on a Vector raise TypeError.

double norm_eval(const NormSpec& spec, const DenseMatrix& x);
double norm_eval(const NormSpec& spec, const Vector& x);

double dual_norm_eval(const NormSpec& spec, const DenseMatrix& x);
double dual_norm_eval(const NormSpec& spec, const Vector& x);

DenseMatrix normalized_projection(const NormSpec& spec, const DenseMatrix& x, Mode mode = Mode::kStrict);
Vector normalized_projection(const NormSpec& spec, const Vector& x, Mode mode = Mode::kStrict);

/// Common Euclidean length of every projection (the Assumption-1 constant).
struct ProjectionConstant {
    double c = 0.0;
};

ProjectionConstant projection_l2_constant(const NormSpec& spec, std::size_t rows, std::size_t cols);

/// Returns the spec with its divisor adjusted so that the projection constant
/// equals `target`.
NormSpec rescale_norm(const NormSpec& spec, double target, std::size_t rows, std::size_t cols);

// Row/column normalization kernels shared with SR-Sinkhorn, so that the
// alternating engine and the dedicated Sinkhorn path agree bitwise.
void normalize_rows_inplace(DenseMatrix& x, double target, Mode mode);
void normalize_cols_inplace(DenseMatrix& x, double target, Mode mode);

/// Singular values of x, descending (computed from the smaller Gram matrix).
Vector singular_values(const DenseMatrix& x);

}  // namespace mnorm
