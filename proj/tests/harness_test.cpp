// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "mnorm/config.hpp"
#include "mnorm/error.hpp"
#include "mnorm/oracles.hpp"
#include "mnorm/problems.hpp"
#include "mnorm/training.hpp"

namespace mnorm {
namespace {

ProblemDims small_factorization() {
    ProblemDims d;
    d.rows = 10;
    d.cols = 8;
    d.rank = 2;
    return d;
}

ProblemDims small_mlp() {
    ProblemDims d;
    d.features = 6;
    d.samples = 40;
    d.hidden = 5;
    d.outputs = 3;
    return d;
}

TEST(ProblemTest, GenerationIsDeterministic) {
    for (ProblemKind kind :
         {ProblemKind::kMatrixFactorization, ProblemKind::kLogisticRegression, ProblemKind::kMlp2}) {
        const Problem a = gen_problem(kind, ProblemDims{}, 9);
        const Problem b = gen_problem(kind, ProblemDims{}, 9);
        const Problem c = gen_problem(kind, ProblemDims{}, 10);
        EXPECT_EQ(a.inputs, b.inputs);
        EXPECT_EQ(a.targets, b.targets);
        EXPECT_EQ(a.init, b.init);
        EXPECT_EQ(a.id(), b.id());
        EXPECT_NE(a.targets, c.targets);
        EXPECT_NE(a.id(), c.id());
        EXPECT_TRUE(std::isfinite(loss_value(a, a.init)));
    }
}

TEST(ProblemTest, InvalidDimsRejected) {
    ProblemDims d = small_factorization();
    d.rank = 9;
    EXPECT_THROW(gen_problem(ProblemKind::kMatrixFactorization, d, 1), ConfigError);
    ProblemDims e;
    e.samples = 0;
    EXPECT_THROW(gen_problem(ProblemKind::kLogisticRegression, e, 1), ConfigError);
    EXPECT_THROW(parse_problem_kind("cifar"), ConfigError);
}

TEST(ProblemTest, PlantedFactorsAreAGlobalMinimum) {
    const Problem p = gen_problem(ProblemKind::kMatrixFactorization, small_factorization(), 3);
    const LossGrad lg = loss_and_grad(p, p.planted);
    EXPECT_NEAR(lg.loss, 0.0, 1e-20);
    for (const DenseMatrix& g : lg.grads) {
        EXPECT_LE(max_abs(g), 1e-12);
    }
}

TEST(ProblemTest, FullRankPlantingIsAttainable) {
    ProblemDims d = small_factorization();
    d.rank = 8;
    const Problem p = gen_problem(ProblemKind::kMatrixFactorization, d, 4);
    EXPECT_NEAR(loss_value(p, p.planted), 0.0, 1e-18);
}

TEST(ProblemTest, LogisticLossAtZeroIsLn2) {
    const Problem p = gen_problem(ProblemKind::kLogisticRegression, ProblemDims{}, 5);
    std::vector<DenseMatrix> zeros;
    for (const ParamGroup& g : p.groups) {
        zeros.emplace_back(g.rows, g.cols);
    }
    EXPECT_NEAR(loss_value(p, zeros), std::log(2.0), 1e-14);
}

TEST(ProblemTest, LogisticDataHasMargin) {
    const Problem p = gen_problem(ProblemKind::kLogisticRegression, ProblemDims{}, 6);
    // Labels are +-1 and the sample count is honoured.
    EXPECT_EQ(p.sample_count(), 200u);
    for (double y : p.targets.values()) {
        EXPECT_TRUE(y == 1.0 || y == -1.0);
    }
}

TEST(ProblemTest, ShapeMismatchRejected) {
    const Problem p = gen_problem(ProblemKind::kMatrixFactorization, small_factorization(), 7);
    EXPECT_THROW(loss_and_grad(p, {DenseMatrix(2, 2), DenseMatrix(2, 2)}), DimensionError);
    const std::vector<std::size_t> first = {0};
    EXPECT_THROW(loss_and_grad(p, p.init, first), ConfigError);
}

// Analytic gradients agree with central differences at random points.
TEST(GradientTest, FiniteDifferenceProperty) {
    for (ProblemKind kind :
         {ProblemKind::kMatrixFactorization, ProblemKind::kLogisticRegression, ProblemKind::kMlp2}) {
        const ProblemDims dims = kind == ProblemKind::kMatrixFactorization ? small_factorization() : small_mlp();
        const Problem p = gen_problem(kind, dims, 8);
        for (std::uint64_t s = 0; s < 5; ++s) {
            const std::vector<DenseMatrix> params = random_params(p, 100 + s, 0.7);
            EXPECT_LE(max_group_relative_error(finite_difference_grad(p, params), loss_and_grad(p, params).grads),
                      1e-5)
                << to_string(kind);
        }
    }
}

TEST(GradientTest, SubsetGradientMatchesFiniteDifferenceOnTheSubset) {
    const Problem p = gen_problem(ProblemKind::kMlp2, small_mlp(), 9);
    const std::vector<std::size_t> subset = {0, 3, 7, 11};
    Problem sub = p;
    DenseMatrix inputs(subset.size(), p.inputs.cols());
    DenseMatrix targets(subset.size(), p.targets.cols());
    for (std::size_t k = 0; k < subset.size(); ++k) {
        for (std::size_t j = 0; j < inputs.cols(); ++j) {
            inputs(k, j) = p.inputs(subset[k], j);
        }
        for (std::size_t j = 0; j < targets.cols(); ++j) {
            targets(k, j) = p.targets(subset[k], j);
        }
    }
    sub.inputs = inputs;
    sub.targets = targets;
    const LossGrad a = loss_and_grad(p, p.init, subset);
    const LossGrad b = loss_and_grad(sub, p.init);
    EXPECT_NEAR(a.loss, b.loss, 1e-14);
    EXPECT_LE(max_group_relative_error(a.grads, b.grads), 1e-13);
}

RunRecord train(ProblemKind kind, const ProblemDims& dims, OptimizerKind opt_kind, int steps,
                std::optional<double> lr = std::nullopt) {
    RunConfig cfg;
    cfg.problem = kind;
    cfg.dims = dims;
    cfg.seed = 12;
    cfg.optimizer.kind = opt_kind;
    cfg.optimizer.base_lr = lr;
    cfg.total_steps = steps;
    resolve_defaults(cfg);
    const Problem p = gen_problem(kind, dims, cfg.seed);
    Optimizer opt(make_optimizer_config(cfg.optimizer), make_groups(cfg.optimizer, p));
    RunRecord r = run_training(p, opt, make_train_options(cfg, *cfg.optimizer.base_lr));
    r.label = to_string(opt_kind);
    return r;
}

TEST(TrainingTest, ZeroStepsRecordsOnlyTheInitialLoss) {
    RunConfig cfg;
    cfg.total_steps = 10;
    cfg.train.steps = 0;
    resolve_defaults(cfg);
    const Problem p = gen_problem(ProblemKind::kMatrixFactorization, small_factorization(), 1);
    Optimizer opt(make_optimizer_config(cfg.optimizer), make_groups(cfg.optimizer, p));
    const RunRecord r = run_training(p, opt, make_train_options(cfg, 0.02));
    EXPECT_TRUE(r.steps.empty());
    EXPECT_EQ(r.final_loss(), r.initial_loss);
    EXPECT_EQ(to_csv(r), "step,lr,loss,update_fro_U,update_fro_V\n0,0," + format_double(r.initial_loss) + ",0,0\n");
}

TEST(TrainingTest, SmallStepSgdDecreasesConvexLossMonotonically) {
    const RunRecord r = train(ProblemKind::kLogisticRegression, ProblemDims{}, OptimizerKind::kSgd, 300, 0.01);
    double prev = r.initial_loss;
    for (const StepRecord& s : r.steps) {
        // The schedule reaches exactly zero at the final step.
        if (s.lr > 0.0) {
            EXPECT_LT(s.loss, prev) << "step " << s.step;
        } else {
            EXPECT_EQ(s.loss, prev);
        }
        prev = s.loss;
    }
}

TEST(TrainingTest, RunsAreByteReproducible) {
    const RunRecord a = train(ProblemKind::kMlp2, small_mlp(), OptimizerKind::kSinkGd, 50);
    const RunRecord b = train(ProblemKind::kMlp2, small_mlp(), OptimizerKind::kSinkGd, 50);
    EXPECT_EQ(to_csv(a), to_csv(b));
    EXPECT_EQ(a.steps.size(), 50u);
}

TEST(TrainingTest, DivergenceNamesTheStep) {
    try {
        train(ProblemKind::kMlp2, small_mlp(), OptimizerKind::kSgd, 20, 1e3);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_GE(e.step(), 1);
        EXPECT_NE(std::string(e.what()).find("step " + std::to_string(e.step())), std::string::npos);
    }
}

TEST(TrainingTest, MinibatchModeIsDeterministic) {
    RunConfig cfg;
    cfg.problem = ProblemKind::kLogisticRegression;
    cfg.total_steps = 30;
    cfg.train.minibatch = true;
    cfg.train.batch_size = 16;
    cfg.optimizer.kind = OptimizerKind::kAdam;
    resolve_defaults(cfg);
    const Problem p = gen_problem(cfg.problem, cfg.dims, cfg.seed);
    auto run = [&] {
        Optimizer opt(make_optimizer_config(cfg.optimizer), make_groups(cfg.optimizer, p));
        return to_csv(run_training(p, opt, make_train_options(cfg, *cfg.optimizer.base_lr)));
    };
    EXPECT_EQ(run(), run());
    RunConfig mf = cfg;
    mf.problem = ProblemKind::kMatrixFactorization;
    const Problem q = gen_problem(mf.problem, small_factorization(), 0);
    Optimizer opt(make_optimizer_config(mf.optimizer), make_groups(mf.optimizer, q));
    EXPECT_THROW(run_training(q, opt, make_train_options(mf, 0.02)), ConfigError);
}

// Interleaving two SinkGD runs on one optimizer object reproduces the
// separate trajectories.
TEST(TrainingTest, InterleavedRunsMatchSeparateRuns) {
    const Problem a = gen_problem(ProblemKind::kMatrixFactorization, small_factorization(), 20);
    const Problem b = gen_problem(ProblemKind::kMatrixFactorization, small_factorization(), 21);
    OptimizerBlock block;
    Optimizer shared(make_optimizer_config(block), make_groups(block, a));
    Optimizer alone(make_optimizer_config(block), make_groups(block, a));
    std::vector<DenseMatrix> pa = a.init;
    std::vector<DenseMatrix> pb = b.init;
    std::vector<DenseMatrix> qa = a.init;
    std::vector<DenseMatrix> qb = b.init;
    for (int t = 0; t < 10; ++t) {
        shared.step(pa, loss_and_grad(a, pa).grads, 0.05);
        shared.step(pb, loss_and_grad(b, pb).grads, 0.05);
    }
    for (int t = 0; t < 10; ++t) {
        alone.step(qa, loss_and_grad(a, qa).grads, 0.05);
    }
    for (int t = 0; t < 10; ++t) {
        alone.step(qb, loss_and_grad(b, qb).grads, 0.05);
    }
    EXPECT_EQ(pa, qa);
    EXPECT_EQ(pb, qb);
}

TEST(CompareTest, TablesAndErrors) {
    const RunRecord adam = train(ProblemKind::kMatrixFactorization, small_factorization(), OptimizerKind::kAdam, 40);
    const RunRecord sink =
        train(ProblemKind::kMatrixFactorization, small_factorization(), OptimizerKind::kSinkGd, 40);
    const std::vector<ComparisonRow> one = compare_runs({adam});
    ASSERT_EQ(one.size(), 1u);
    const std::vector<ComparisonRow> rows = compare_runs({adam, sink});
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].state_bytes, 2u * (10u * 2u + 2u * 8u) * 8u);
    EXPECT_EQ(rows[1].state_bytes, 0u);
    const std::vector<ComparisonRow> twice = compare_runs({sink, sink});
    EXPECT_EQ(twice[0].final_loss, twice[1].final_loss);
    EXPECT_EQ(twice[0].loss_area, twice[1].loss_area);
    EXPECT_TRUE(compare_runs({}).empty());
    EXPECT_NE(format_comparison(rows).find("sinkgd"), std::string::npos);

    const RunRecord other = train(ProblemKind::kMlp2, small_mlp(), OptimizerKind::kAdam, 40);
    EXPECT_THROW(compare_runs({adam, other}), ComparisonError);
    const RunRecord shorter =
        train(ProblemKind::kMatrixFactorization, small_factorization(), OptimizerKind::kAdam, 20);
    EXPECT_THROW(compare_runs({adam, shorter}), ComparisonError);
}

}  // namespace
}  // namespace mnorm
