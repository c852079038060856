// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Run configuration. Grammar (one statement per line):
//
//   # comment                 (also allowed after a value)
//   key = value               (top-level keys precede any section)
//   [section]
//   key = value
//
// Lists of norms or balls are separated by ';', lists of numbers or names by
// ','. A ball is "<norm>@<radius>", e.g. "vector_lp:p=inf@1". Unknown
// sections or keys and malformed values raise ParseError with the line.
// echo_config() writes every field, defaults included, and parses back to
// the same configuration.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mnorm/dualproj.hpp"
#include "mnorm/norms.hpp"
#include "mnorm/optimizers.hpp"
#include "mnorm/problems.hpp"
#include "mnorm/schedule.hpp"
#include "mnorm/training.hpp"

namespace mnorm {

inline constexpr double kDefaultGroupScale = 0.05;
inline constexpr int kDefaultIterations = 5;

/// Default base learning rate per optimizer kind.
double default_base_lr(OptimizerKind kind);

struct OptimizerBlock {
    OptimizerKind kind = OptimizerKind::kSinkGd;
    int iterations = kDefaultIterations;
    /// Group scale for linear_2d groups under swan/mngd/sinkgd.
    double alpha = kDefaultGroupScale;
    /// Unset means default_base_lr(kind); resolved by parse_config.
    std::optional<double> base_lr;
    AdamHyper adam;
    std::vector<NormSpec> norms = {NormSpec::row_l2_max(), NormSpec::col_l2_max()};
    NormSpec steepest_norm = NormSpec::vector_lp(2.0);
    FallbackKind fallback = FallbackKind::kSignGd;
    Mode mode = Mode::kGuarded;
};

struct TrainBlock {
    /// Unset means schedule.total_steps.
    std::optional<int> steps;
    bool minibatch = false;
    std::size_t batch_size = 32;
    double divergence_factor = 1e6;
};

struct NormalizeBlock {
    std::string input;
    std::vector<NormSpec> norms = {NormSpec::row_l2_max(), NormSpec::col_l2_max()};
    int iterations = kDefaultIterations;
    Mode mode = Mode::kStrict;
};

struct SinkhornBlock {
    std::string input;
    int iterations = 10;
    Mode mode = Mode::kStrict;
};

struct ConvexBlock {
    std::vector<double> grad;
    std::vector<BallSpec> balls;
    DualSolverOptions solver;
};

struct BenchBlock {
    std::vector<OptimizerKind> kinds = {OptimizerKind::kAdam,  OptimizerKind::kSgd,  OptimizerKind::kSignGd,
                                        OptimizerKind::kSteepestDescent, OptimizerKind::kSwan,
                                        OptimizerKind::kMngd, OptimizerKind::kSinkGd};
    double threshold = 0.1;
};

struct RunConfig {
    std::string command;
    std::uint64_t seed = 0;
    int verbosity = 1;
    std::string out = ".";

    ProblemKind problem = ProblemKind::kMatrixFactorization;
    ProblemDims dims;
    OptimizerBlock optimizer;
    int total_steps = 1000;
    double warmup_frac = 0.10;
    TrainBlock train;
    NormalizeBlock normalize;
    SinkhornBlock sinkhorn;
    ConvexBlock convexproj;
    BenchBlock bench;
};

RunConfig parse_config(std::string_view text);

/// parse_config with "section.key=value" overrides applied before defaults
/// are resolved, so that e.g. a changed total_steps also moves train.steps.
RunConfig load_config(std::string_view text, const std::vector<std::string>& overrides);

/// Sets one field, addressed as "section.key" (or "key" at top level).
/// Used for command-line overrides; defaults are re-resolved afterwards by
/// resolve_defaults().
void apply_setting(RunConfig& config, std::string_view dotted_key, std::string_view value);

/// Fills base_lr and train.steps from the other fields when unset, then
/// validates cross-field constraints.
void resolve_defaults(RunConfig& config);

std::string echo_config(const RunConfig& config);

Schedule make_schedule(const RunConfig& config, double base_lr);
OptimizerConfig make_optimizer_config(const OptimizerBlock& block);
/// Problem groups with alpha applied to linear_2d groups for the MNGD family.
std::vector<ParamGroup> make_groups(const OptimizerBlock& block, const Problem& problem);
TrainOptions make_train_options(const RunConfig& config, double base_lr);

}  // namespace mnorm
