// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small deterministic training problems with analytic gradients.
//
//   matrix_factorization  L = 1/2 ||U V - Y||_F^2, Y = U* V* of rank r
//   logistic_regression   mean log(1 + exp(-y (<w, x> + b))), separable data
//   mlp2                  1/(2N) sum ||W2 tanh(W1 x + b1) + b2 - y||^2 with a
//                         teacher network of the same shape providing y

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mnorm/matrix.hpp"
#include "mnorm/optimizers.hpp"

namespace mnorm {

enum class ProblemKind { kMatrixFactorization, kLogisticRegression, kMlp2 };

std::string to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view text);

/// Each kind reads only the fields it needs.
struct ProblemDims {
    // matrix_factorization
    std::size_t rows = 64;
    std::size_t cols = 64;
    std::size_t rank = 4;
    // logistic_regression and mlp2
    std::size_t features = 20;
    std::size_t samples = 200;
    double margin = 0.1;
    // mlp2
    std::size_t hidden = 16;
    std::size_t outputs = 4;
};

struct Problem {
    ProblemKind kind = ProblemKind::kMatrixFactorization;
    ProblemDims dims;
    std::uint64_t seed = 0;

    /// matrix_factorization: empty. Otherwise samples x features.
    DenseMatrix inputs;
    /// matrix_factorization: Y. logistic: samples x 1 labels in {-1, +1}.
    /// mlp2: samples x outputs.
    DenseMatrix targets;
    /// Generating parameters (U*, V* or the teacher network); empty for
    /// logistic regression, whose generator is a unit direction only.
    std::vector<DenseMatrix> planted;

    std::vector<ParamGroup> groups;
    std::vector<DenseMatrix> init;

    [[nodiscard]] std::size_t sample_count() const noexcept;
    /// "<kind>:<dims>:seed=<seed>", equal for equal problems.
    [[nodiscard]] std::string id() const;
};

/// Deterministic in (kind, dims, seed). Throws ConfigError on invalid dims.
Problem gen_problem(ProblemKind kind, const ProblemDims& dims, std::uint64_t seed);

struct LossGrad {
    double loss = 0.0;
    std::vector<DenseMatrix> grads;
};

/// Full-batch loss and gradient. Throws DimensionError on shape mismatch.
LossGrad loss_and_grad(const Problem& problem, const std::vector<DenseMatrix>& params);

/// Loss and gradient over a subset of samples (mean over the subset).
/// Matrix factorization has no samples and rejects a subset.
LossGrad loss_and_grad(const Problem& problem, const std::vector<DenseMatrix>& params,
                       std::span<const std::size_t> subset);

double loss_value(const Problem& problem, const std::vector<DenseMatrix>& params);

/// Random parameters shaped like the problem's groups (N(0, scale^2)).
std::vector<DenseMatrix> random_params(const Problem& problem, std::uint64_t seed, double scale = 1.0);

}  // namespace mnorm
