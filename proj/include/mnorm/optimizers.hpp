// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Optimizer suite. Every parameter (matrix or vector) is held as a
// DenseMatrix; vectors are 1 x n rows.
//
// Step-length conventions differ on purpose:
//   steepest_descent_step:   theta -= (||g||_* / lambda) P(g)
//   swan / sinkgd / mngd:    theta -= eta P_multi(g)
// The second form leaves the step length to the schedule, so a SinkGD update
// always has Frobenius norm eta * sqrt(m n).

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mnorm/matrix.hpp"
#include "mnorm/norms.hpp"

namespace mnorm {

enum class GroupRole { kLinear2d, kOther };

struct ParamGroup {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    GroupRole role = GroupRole::kOther;
    double group_scale = 1.0;

    [[nodiscard]] std::size_t elements() const noexcept { return rows * cols; }
};

/// Throws ConfigError for linear_2d groups smaller than 2x2 or a
/// non-positive group scale.
void validate_group(const ParamGroup& group);

/// alpha * eta for linear_2d groups, eta otherwise.
double effective_lr(const ParamGroup& group, double eta);

struct AdamHyper {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    DenseMatrix m;
    DenseMatrix s;
    long t = 0;

    static AdamState zeros(std::size_t rows, std::size_t cols);
};

/// Bias-corrected Adam; returns the applied update (params_new - params_old).
DenseMatrix adam_step(AdamState& state, DenseMatrix& params, const DenseMatrix& grad, double lr,
                      const AdamHyper& hyper = {});

DenseMatrix sgd_step(DenseMatrix& params, const DenseMatrix& grad, double lr);

/// -lr * sign(g), with sign(0) = 0.
DenseMatrix signgd_step(DenseMatrix& params, const DenseMatrix& grad, double lr);

/// A zero gradient leaves params untouched (the projection is undefined there).
DenseMatrix steepest_descent_step(DenseMatrix& params, const DenseMatrix& grad, const NormSpec& spec,
                                  double sharpness, Mode mode = Mode::kStrict);

/// Preprocessed gradients. Tall inputs are transposed whenever the norm list
/// involves whitening, so that the spectral step always sees m <= n.
DenseMatrix mngd_direction(const DenseMatrix& grad, std::span<const NormSpec> norms, int iterations,
                           Mode mode = Mode::kStrict);
DenseMatrix swan_direction(const DenseMatrix& grad, int iterations = 1, Mode mode = Mode::kStrict);
DenseMatrix sinkgd_direction(const DenseMatrix& grad, int iterations, Mode mode = Mode::kStrict);

DenseMatrix mngd_step(DenseMatrix& params, const DenseMatrix& grad, std::span<const NormSpec> norms, int iterations,
                      double lr, Mode mode = Mode::kStrict);
DenseMatrix swan_step(DenseMatrix& params, const DenseMatrix& grad, double lr, int iterations = 1,
                      Mode mode = Mode::kStrict);
DenseMatrix sinkgd_step(DenseMatrix& params, const DenseMatrix& grad, double lr, int iterations,
                        Mode mode = Mode::kStrict);

enum class OptimizerKind { kAdam, kSgd, kSignGd, kSteepestDescent, kSwan, kMngd, kSinkGd };

/// Rule used for `other` groups under the matrix-only kinds.
enum class FallbackKind { kSignGd, kSgd, kAdam };

std::string to_string(OptimizerKind kind);
std::string to_string(FallbackKind kind);
OptimizerKind parse_optimizer_kind(std::string_view text);
FallbackKind parse_fallback_kind(std::string_view text);

/// True for kinds that apply only to linear_2d groups. Steepest descent joins
/// them when its norm is a matrix norm; with a vector norm it flattens every
/// group.
bool is_matrix_only(OptimizerKind kind);

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::kSinkGd;
    int iterations = 5;
    /// Norm list for MNGD.
    std::vector<NormSpec> norms = {NormSpec::row_l2_max(), NormSpec::col_l2_max()};
    /// Norm for steepest descent; its sharpness is 1/lr, so l2 gives plain
    /// gradient descent at rate lr.
    NormSpec steepest_norm = NormSpec::vector_lp(2.0);
    AdamHyper adam;
    FallbackKind fallback = FallbackKind::kSignGd;
    Mode mode = Mode::kGuarded;
};

class Optimizer {
public:
    Optimizer(OptimizerConfig config, std::vector<ParamGroup> groups);

    /// Applies one update to every group at schedule rate eta and returns the
    /// Frobenius norm of each group's update.
    std::vector<double> step(std::vector<DenseMatrix>& params, const std::vector<DenseMatrix>& grads, double eta);

    /// Number of stored state scalars.
    [[nodiscard]] std::size_t state_entries() const noexcept;
    /// state_entries() * width.
    [[nodiscard]] std::size_t state_memory_bytes(std::size_t width = 8) const noexcept;

    [[nodiscard]] const OptimizerConfig& config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<ParamGroup>& groups() const noexcept { return groups_; }

private:
    enum class Rule { kAdam, kSgd, kSignGd, kSteepest, kSwan, kMngd, kSinkGd };

    DenseMatrix apply(std::size_t g, DenseMatrix& params, const DenseMatrix& grad, double lr);

    OptimizerConfig config_;
    std::vector<ParamGroup> groups_;
    std::vector<Rule> rules_;
    std::vector<std::optional<AdamState>> adam_;
};

/// Exact optimizer-state size for a configuration, without constructing it.
std::size_t state_memory_bytes(const OptimizerConfig& config, std::span<const ParamGroup> groups,
                               std::size_t width = 8);

}  // namespace mnorm
