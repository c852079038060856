// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "mnorm/error.hpp"
#include "mnorm/rng.hpp"

namespace mnorm {

namespace {

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::swap(idx[i - 1], idx[rng.below(i)]);
    }
    return idx;
}

}  // namespace

double RunRecord::final_loss() const noexcept {
    return steps.empty() ? initial_loss : steps.back().loss;
}

RunRecord run_training(const Problem& problem, Optimizer& opt, const TrainOptions& options) {
    if (options.steps < 0 || options.steps > options.schedule.total_steps) {
        throw ConfigError(fmt::format("run_training: steps = {} outside [0, {}]", options.steps,
                                      options.schedule.total_steps));
    }
    if (opt.groups().size() != problem.groups.size()) {
        throw ConfigError("run_training: optimizer groups do not match the problem");
    }
    std::vector<std::size_t> order;
    std::size_t batch = 0;
    if (options.minibatch) {
        if (problem.kind == ProblemKind::kMatrixFactorization) {
            throw ConfigError("run_training: minibatch mode needs a sample-based problem");
        }
        if (options.batch_size == 0) {
            throw ConfigError("run_training: batch_size must be positive");
        }
        order = permutation(problem.sample_count(), options.batch_seed);
        batch = std::min(options.batch_size, order.size());
    }

    const auto start = std::chrono::steady_clock::now();
    RunRecord record;
    record.problem_id = problem.id();
    for (const ParamGroup& g : opt.groups()) {
        record.group_names.push_back(g.name);
    }

    std::vector<DenseMatrix> params = problem.init;
    auto evaluate = [&](int step) {
        if (!options.minibatch) {
            return loss_and_grad(problem, params);
        }
        // Batches walk the permutation cyclically; the reported loss is the
        // batch loss.
        std::vector<std::size_t> idx(batch);
        const std::size_t offset = static_cast<std::size_t>(step) * batch;
        for (std::size_t i = 0; i < batch; ++i) {
            idx[i] = order[(offset + i) % order.size()];
        }
        return loss_and_grad(problem, params, idx);
    };

    LossGrad current = evaluate(0);
    if (!std::isfinite(current.loss)) {
        throw DivergenceError("run_training: initial loss is not finite", 0);
    }
    record.initial_loss = current.loss;
    for (int t = 1; t <= options.steps; ++t) {
        const double eta = cosine_schedule(t, options.schedule);
        StepRecord step;
        step.step = t;
        step.lr = eta;
        step.update_norms = opt.step(params, current.grads, eta);
        current = evaluate(t);
        step.loss = current.loss;
        if (!std::isfinite(step.loss) || step.loss > options.divergence_factor * record.initial_loss) {
            throw DivergenceError(fmt::format("run_training: diverged at step {} (loss {})", t, step.loss), t);
        }
        record.steps.push_back(std::move(step));
    }
    record.state_bytes = opt.state_memory_bytes();
    record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return record;
}

void write_csv(std::ostream& out, const RunRecord& record) {
    out << "step,lr,loss";
    for (const std::string& name : record.group_names) {
        out << ",update_fro_" << name;
    }
    out << '\n';
    out << "0,0," << format_double(record.initial_loss);
    for (std::size_t g = 0; g < record.group_names.size(); ++g) {
        out << ",0";
    }
    out << '\n';
    for (const StepRecord& s : record.steps) {
        out << s.step << ',' << format_double(s.lr) << ',' << format_double(s.loss);
        for (double u : s.update_norms) {
            out << ',' << format_double(u);
        }
        out << '\n';
    }
}

std::string to_csv(const RunRecord& record) {
    std::ostringstream out;
    write_csv(out, record);
    return out.str();
}

std::vector<ComparisonRow> compare_runs(const std::vector<RunRecord>& records, double threshold) {
    std::vector<ComparisonRow> rows;
    if (records.empty()) {
        return rows;
    }
    for (const RunRecord& r : records) {
        if (r.problem_id != records.front().problem_id) {
            throw ComparisonError(fmt::format("compare_runs: problem {} differs from {}", r.problem_id,
                                              records.front().problem_id));
        }
        if (r.steps.size() != records.front().steps.size()) {
            throw ComparisonError(fmt::format("compare_runs: {} has {} steps, expected {}", r.label, r.steps.size(),
                                              records.front().steps.size()));
        }
        ComparisonRow row;
        row.label = r.label;
        row.initial_loss = r.initial_loss;
        row.final_loss = r.final_loss();
        row.state_bytes = r.state_bytes;
        row.wall_seconds = r.wall_seconds;
        for (const StepRecord& s : r.steps) {
            row.loss_area += s.loss;
            if (row.steps_to_threshold < 0 && s.loss <= threshold * r.initial_loss) {
                row.steps_to_threshold = s.step;
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::string format_comparison(const std::vector<ComparisonRow>& rows) {
    std::string out = fmt::format("{:<16} {:>14} {:>14} {:>14} {:>10} {:>12}\n", "label", "initial_loss",
                                  "final_loss", "loss_area", "to_thresh", "state_bytes");
    for (const ComparisonRow& r : rows) {
        out += fmt::format("{:<16} {:>14.6e} {:>14.6e} {:>14.6e} {:>10} {:>12}\n", r.label, r.initial_loss,
                           r.final_loss, r.loss_area, r.steps_to_threshold, r.state_bytes);
    }
    return out;
}

}  // namespace mnorm
