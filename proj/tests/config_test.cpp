// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/config.hpp"

#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "mnorm/error.hpp"

namespace mnorm {
namespace {

TEST(ConfigTest, MinimalTrainConfigFillsDefaults) {
    const RunConfig c = parse_config(
        "command = train\n"
        "[problem]\n"
        "kind = matrix_factorization\n"
        "[optimizer]\n"
        "kind = sinkgd\n");
    EXPECT_EQ(c.optimizer.iterations, 5);
    EXPECT_DOUBLE_EQ(c.optimizer.alpha, 0.05);
    EXPECT_DOUBLE_EQ(c.warmup_frac, 0.10);
    ASSERT_TRUE(c.optimizer.base_lr.has_value());
    EXPECT_DOUBLE_EQ(*c.optimizer.base_lr, 0.02);
    ASSERT_TRUE(c.train.steps.has_value());
    EXPECT_EQ(*c.train.steps, c.total_steps);
}

TEST(ConfigTest, EchoIsAFixedPoint) {
    const RunConfig c = parse_config("command = train\n[optimizer]\nkind = sinkgd\n");
    const std::string echo = echo_config(c);
    EXPECT_EQ(echo_config(parse_config(echo)), echo);
    EXPECT_NE(echo.find("L = 5"), std::string::npos);
    EXPECT_NE(echo.find("base_lr = 0.02"), std::string::npos);
}

TEST(ConfigTest, RichConfigRoundTrips) {
    const RunConfig c = parse_config(
        "command = convexproj  # trailing comment\n"
        "seed = 77\n"
        "verbosity = 0\n"
        "out = results/run1\n"
        "[problem]\n"
        "kind = mlp2\n"
        "features = 7\n"
        "hidden = 9\n"
        "[optimizer]\n"
        "kind = mngd\n"
        "norms = row_l2_max; spectral_max:scale=2; col_l2_max\n"
        "L = 3\n"
        "alpha = 0.1\n"
        "base_lr = 0.003\n"
        "fallback = adam\n"
        "[schedule]\n"
        "total_steps = 40\n"
        "warmup_frac = 0.25\n"
        "[train]\n"
        "steps = 30\n"
        "[convexproj]\n"
        "grad = 1, -2.5\n"
        "balls = vector_lp:p=inf@1; vector_lp:p=2@0.5\n"
        "sweeps = 12\n"
        "[bench]\n"
        "kinds = adam, sinkgd\n");
    EXPECT_EQ(c.seed, 77u);
    EXPECT_EQ(c.dims.hidden, 9u);
    EXPECT_EQ(c.optimizer.norms.size(), 3u);
    EXPECT_EQ(c.optimizer.norms[1], NormSpec::spectral_max(2.0));
    EXPECT_EQ(c.optimizer.iterations, 3);
    EXPECT_EQ(c.optimizer.fallback, FallbackKind::kAdam);
    EXPECT_EQ(c.convexproj.balls.size(), 2u);
    EXPECT_DOUBLE_EQ(c.convexproj.balls[1].radius, 0.5);
    EXPECT_TRUE(std::isinf(c.convexproj.balls[0].norm.p));
    EXPECT_EQ(c.convexproj.solver.sweeps, 12);
    EXPECT_EQ(c.bench.kinds.size(), 2u);
    const std::string echo = echo_config(c);
    EXPECT_EQ(echo_config(parse_config(echo)), echo);
}

TEST(ConfigTest, MisspelledKeyNamesKeyAndLine) {
    try {
        parse_config("command = train\n[optimizer]\nkind = adam\nbeta_1 = 0.8\n");
        FAIL() << "expected a parse error";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 4);
        EXPECT_NE(std::string(e.what()).find("beta_1"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
    }
}

TEST(ConfigTest, ExplicitIterationCountOverridesDefault) {
    EXPECT_EQ(parse_config("[optimizer]\nL = 1\n").optimizer.iterations, 1);
}

TEST(ConfigTest, MalformedInputsRejected) {
    EXPECT_THROW(parse_config("[nope]\n"), ParseError);
    EXPECT_THROW(parse_config("[optimizer\n"), ParseError);
    EXPECT_THROW(parse_config("seed\n"), ParseError);
    EXPECT_THROW(parse_config("seed = -3\n"), ParseError);
    EXPECT_THROW(parse_config("[optimizer]\nL = five\n"), ParseError);
    EXPECT_THROW(parse_config("[optimizer]\nkind = lion\n"), ParseError);
    EXPECT_THROW(parse_config("[schedule]\nwarmup_frac = 1.5\n"), ParseError);
    EXPECT_THROW(parse_config("command = dance\n"), ParseError);
    EXPECT_THROW(parse_config("command = normalize\n"), ParseError);
    EXPECT_THROW(parse_config("command = convexproj\n[convexproj]\ngrad = 1, 2\n"), ParseError);
    EXPECT_THROW(parse_config("[schedule]\ntotal_steps = 10\n[train]\nsteps = 11\n"), ParseError);
}

TEST(ConfigTest, OverridesApplyBeforeDefaults) {
    const RunConfig c = load_config("[optimizer]\nkind = adam\n", {"schedule.total_steps=50", "optimizer.kind=sgd"});
    EXPECT_EQ(*c.train.steps, 50);
    EXPECT_DOUBLE_EQ(*c.optimizer.base_lr, default_base_lr(OptimizerKind::kSgd));
    EXPECT_THROW(load_config("", {"optimizer.kind"}), ConfigError);
    EXPECT_THROW(load_config("", {"optimizer.nope=1"}), ConfigError);
}

TEST(ConfigTest, KindChangeKeepsExplicitLearningRate) {
    RunConfig c = parse_config("[optimizer]\nkind = adam\nbase_lr = 0.3\n");
    apply_setting(c, "optimizer.kind", "sinkgd");
    resolve_defaults(c);
    EXPECT_DOUBLE_EQ(*c.optimizer.base_lr, 0.3);
}

TEST(ConfigTest, BuildersApplyGroupScale) {
    const RunConfig c = parse_config("[optimizer]\nkind = sinkgd\nalpha = 0.2\n");
    const Problem p = gen_problem(ProblemKind::kMatrixFactorization, ProblemDims{}, 0);
    for (const ParamGroup& g : make_groups(c.optimizer, p)) {
        EXPECT_DOUBLE_EQ(g.group_scale, 0.2);
    }
    OptimizerBlock adam = c.optimizer;
    adam.kind = OptimizerKind::kAdam;
    for (const ParamGroup& g : make_groups(adam, p)) {
        EXPECT_DOUBLE_EQ(g.group_scale, 1.0);
    }
    const Schedule s = make_schedule(c, 0.02);
    EXPECT_EQ(s.total_steps, c.total_steps);
    const TrainOptions t = make_train_options(c, 0.02);
    EXPECT_EQ(t.steps, c.total_steps);
    EXPECT_EQ(t.batch_seed, c.seed);
}

}  // namespace
}  // namespace mnorm
