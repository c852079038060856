// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "mnorm/optimizers.hpp"
#include "mnorm/problems.hpp"
#include "mnorm/schedule.hpp"

namespace mnorm {

struct TrainOptions {
    int steps = 0;
    Schedule schedule;
    /// Cycle through a seeded fixed permutation in batches instead of using
    /// the full batch. Not available for matrix factorization.
    bool minibatch = false;
    std::size_t batch_size = 32;
    std::uint64_t batch_seed = 0;
    /// Abort once loss exceeds this multiple of the initial loss.
    double divergence_factor = 1e6;
};

struct StepRecord {
    int step = 0;
    double lr = 0.0;
    /// Loss after applying this step's update.
    double loss = 0.0;
    /// ||update||_F per group, measured before it is applied.
    std::vector<double> update_norms;
};

struct RunRecord {
    std::string label;
    std::string problem_id;
    std::string config_echo;
    std::vector<std::string> group_names;
    double initial_loss = 0.0;
    std::vector<StepRecord> steps;
    double wall_seconds = 0.0;
    std::size_t state_bytes = 0;

    [[nodiscard]] double final_loss() const noexcept;
};

/// Runs opt on problem from problem.init. Throws DivergenceError naming the
/// step on a non-finite or exploding loss.
RunRecord run_training(const Problem& problem, Optimizer& opt, const TrainOptions& options);

/// Header `step,lr,loss,update_fro_<group>...`; row 0 holds the initial loss.
void write_csv(std::ostream& out, const RunRecord& record);
std::string to_csv(const RunRecord& record);

struct ComparisonRow {
    std::string label;
    double initial_loss = 0.0;
    double final_loss = 0.0;
    /// Sum of per-step losses (unit step width).
    double loss_area = 0.0;
    /// First step with loss <= threshold * initial, or -1.
    int steps_to_threshold = -1;
    std::size_t state_bytes = 0;
    double wall_seconds = 0.0;
};

/// Throws ComparisonError unless all records share problem and length.
std::vector<ComparisonRow> compare_runs(const std::vector<RunRecord>& records, double threshold = 0.1);

/// Fixed-width text table of compare_runs output.
std::string format_comparison(const std::vector<ComparisonRow>& rows);

}  // namespace mnorm
