// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>

#include <fmt/format.h>

#include "mnorm/config.hpp"
#include "mnorm/dualproj.hpp"
#include "mnorm/error.hpp"
#include "mnorm/multinorm.hpp"
#include "mnorm/oracles.hpp"
#include "mnorm/optimizers.hpp"
#include "mnorm/problems.hpp"
#include "mnorm/sinkhorn.hpp"
#include "mnorm/training.hpp"
#include "mnorm/whiten.hpp"

namespace mnorm {

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

CheckResult timed(std::string id, std::string name, const std::function<Outcome()>& body) {
    CheckResult out{std::move(id), std::move(name), false, {}, 0.0};
    const auto start = std::chrono::steady_clock::now();
    try {
        const Outcome o = body();
        out.passed = o.passed;
        out.detail = o.detail;
    } catch (const std::exception& e) {
        out.passed = false;
        out.detail = fmt::format("threw: {}", e.what());
    }
    out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::size_t between(Rng& rng, std::size_t lo, std::size_t hi) {
    return lo + static_cast<std::size_t>(rng.below(hi - lo + 1));
}

double max_relative_deviation(const Vector& values, double target) {
    double worst = 0.0;
    for (double v : values) {
        worst = std::max(worst, std::abs(v - target) / target);
    }
    return worst;
}

RunRecord train_with_defaults(ProblemKind kind, const ProblemDims& dims, OptimizerKind opt_kind, int steps,
                              std::uint64_t seed) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.problem = kind;
    cfg.dims = dims;
    cfg.optimizer.kind = opt_kind;
    cfg.total_steps = steps;
    resolve_defaults(cfg);
    const Problem problem = gen_problem(kind, dims, seed);
    Optimizer opt(make_optimizer_config(cfg.optimizer), make_groups(cfg.optimizer, problem));
    RunRecord record = run_training(problem, opt, make_train_options(cfg, *cfg.optimizer.base_lr));
    record.label = to_string(opt_kind);
    return record;
}

const std::vector<OptimizerKind>& all_kinds() {
    static const std::vector<OptimizerKind> kinds = {
        OptimizerKind::kAdam, OptimizerKind::kSgd,  OptimizerKind::kSignGd, OptimizerKind::kSteepestDescent,
        OptimizerKind::kSwan, OptimizerKind::kMngd, OptimizerKind::kSinkGd};
    return kinds;
}

BallSpec random_ball(Rng& rng) {
    static const double kPs[] = {1.0, 2.0, std::numeric_limits<double>::infinity()};
    return BallSpec{NormSpec::vector_lp(kPs[rng.below(3)]), rng.uniform(0.5, 2.0)};
}

// ---------------------------------------------------------------------------

Outcome sinkhorn_equivalence(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < 100; ++i) {
        const std::size_t m = between(rng, 2, 64);
        const std::size_t n = between(rng, 2, 256);
        const DenseMatrix g = random_sign_mixed(rng, m, n);
        for (int l : {1, 5, 50}) {
            worst = std::max(worst, sr_equivalence_check(g, l));
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {worst <= 1e-10 && secs < 10.0, fmt::format("max rel err {:.3e} over 300 runs in {:.2f} s", worst, secs)};
}

Outcome fixed_point_norms(std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t m = 64;
    const std::size_t n = 256;
    double row_dev = 0.0;
    double col_dev = 0.0;
    double fro_dev = 0.0;
    for (int i = 0; i < 5; ++i) {
        const DenseMatrix x = sr_sinkhorn(random_sign_mixed(rng, m, n), 200);
        row_dev = std::max(row_dev, max_relative_deviation(row_norms(x), std::sqrt(static_cast<double>(n))));
        col_dev = std::max(col_dev, max_relative_deviation(col_norms(x), std::sqrt(static_cast<double>(m))));
        const double c = std::sqrt(static_cast<double>(n * m));
        fro_dev = std::max(fro_dev, std::abs(frobenius_norm(x) - c) / c);
    }
    return {row_dev <= 1e-8 && col_dev <= 1e-8 && fro_dev <= 1e-10,
            fmt::format("row {:.2e}, col {:.2e}, fro {:.2e}", row_dev, col_dev, fro_dev)};
}

Outcome swan_recovery(std::uint64_t seed) {
    Rng rng(seed);
    const std::vector<NormSpec> norms = swan_norms();
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const DenseMatrix g = random_gaussian(rng, 8, 32);
        worst = std::max(worst, relative_error(multi_normalize(g, norms, 1).x, swan_reference(g)));
    }
    double residual = 0.0;
    for (int i = 0; i < 20; ++i) {
        const DenseMatrix g = random_gaussian(rng, 16, 16);
        residual = std::max(residual, multi_normalize(g, norms, 1).report.final_residual);
    }
    return {worst <= 1e-10 && residual <= 1e-6,
            fmt::format("8x32 max rel err {:.2e}; 16x16 max residual {:.2e}", worst, residual)};
}

Outcome whitening_oracle(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const DenseMatrix w = random_with_condition(rng, 16, 64, rng.uniform(1.0, 100.0));
        worst = std::max(worst,
                         relative_error(newton_schulz_whiten(w, kAcceptanceNewtonSchulzIters), eig_whiten_oracle(w)));
    }
    return {worst <= 1e-6,
            fmt::format("max rel err {:.2e} at {} iterations", worst, kAcceptanceNewtonSchulzIters)};
}

Outcome monotone_inner_products(std::uint64_t seed) {
    Rng rng(seed);
    const std::vector<NormSpec> norms = sinkhorn_norms();
    double worst_drop = 0.0;
    double worst_limit = 0.0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t m = between(rng, 2, 32);
        const std::size_t n = between(rng, 2, 64);
        const MultiNormResult r = multi_normalize(random_sign_mixed(rng, m, n), norms, 100);
        const std::vector<double>& ip = r.report.inner_products;
        for (std::size_t k = 1; k < ip.size(); ++k) {
            worst_drop = std::max(worst_drop, ip[k - 1] - ip[k]);
        }
        const double nm = static_cast<double>(n * m);
        worst_limit = std::max(worst_limit, std::abs(ip.back() - nm) / nm);
    }
    return {worst_drop <= 1e-9 && worst_limit <= 1e-6,
            fmt::format("largest decrease {:.2e}; limit rel err {:.2e}", worst_drop, worst_limit)};
}

Outcome linear_convergence(std::uint64_t seed) {
    Rng rng(seed);
    double worst_cv = 0.0;
    bool monotone = true;
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> e = convergence_rate_estimate(random_positive(rng, 16, 16), kRateIterations);
        for (std::size_t k = 1; k < e.size(); ++k) {
            monotone = monotone && e[k] < e[k - 1];
        }
        const double cv = tail_ratio_variation(e);
        worst_cv = std::isnan(cv) ? std::numeric_limits<double>::infinity() : std::max(worst_cv, cv);
    }
    return {monotone && worst_cv <= 0.2,
            fmt::format("monotone={} max ratio CV {:.3f} (L = {})", monotone, worst_cv, kRateIterations)};
}

Outcome convex_solver(std::uint64_t seed) {
    Rng rng(seed);
    double worst_value = 0.0;
    double worst_gap = 0.0;
    double worst_feas = 0.0;
    double solver_seconds = 0.0;
    for (int i = 0; i < 20; ++i) {
        const Vector grad{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const std::vector<BallSpec> balls = {random_ball(rng), random_ball(rng)};
        const auto start = std::chrono::steady_clock::now();
        const DualSolution sol = convex_multiproj_solve(grad, balls);
        solver_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const GridOptimum grid = grid_max_linear(grad, balls);
        const double scale = std::max(std::abs(grid.value), 1e-12);
        worst_value = std::max(worst_value, std::abs(sol.primal_value - grid.value) / scale);
        worst_gap = std::max(worst_gap, sol.gap / std::max(std::abs(sol.objective), 1e-12));
        worst_feas = std::max(worst_feas, max_constraint_ratio(sol.primal, balls) - 1.0);
    }
    return {worst_value <= 1e-2 && worst_gap <= 1e-2 && worst_feas <= 1e-6 && solver_seconds < 30.0,
            fmt::format("value rel err {:.2e}, gap {:.2e}, feasibility excess {:.1e}, solver {:.2f} s", worst_value,
                        worst_gap, worst_feas, solver_seconds)};
}

Outcome gradient_oracles(std::uint64_t seed) {
    double worst = 0.0;
    std::string per_kind;
    for (ProblemKind kind :
         {ProblemKind::kMatrixFactorization, ProblemKind::kLogisticRegression, ProblemKind::kMlp2}) {
        ProblemDims dims;
        if (kind == ProblemKind::kMatrixFactorization) {
            dims.rows = 16;
            dims.cols = 12;
            dims.rank = 3;
        }
        const Problem p = gen_problem(kind, dims, seed);
        double kind_worst = 0.0;
        for (std::uint64_t point = 0; point < 10; ++point) {
            const std::vector<DenseMatrix> params = random_params(p, seed + 1000 + point, 0.5);
            const LossGrad analytic = loss_and_grad(p, params);
            kind_worst =
                std::max(kind_worst, max_group_relative_error(finite_difference_grad(p, params), analytic.grads));
        }
        per_kind += fmt::format("{}{} {:.1e}", per_kind.empty() ? "" : ", ", to_string(kind), kind_worst);
        worst = std::max(worst, kind_worst);
    }
    return {worst <= 1e-5, per_kind};
}

Outcome memory_accounting(std::uint64_t seed) {
    int configs = 0;
    std::string failure;
    for (ProblemKind kind :
         {ProblemKind::kMatrixFactorization, ProblemKind::kLogisticRegression, ProblemKind::kMlp2}) {
        const Problem p = gen_problem(kind, ProblemDims{}, seed);
        std::size_t elements = 0;
        for (const ParamGroup& g : p.groups) {
            elements += g.elements();
        }
        for (OptimizerKind k : all_kinds()) {
            OptimizerBlock block;
            block.kind = k;
            Optimizer opt(make_optimizer_config(block), make_groups(block, p));
            // A few steps must not grow (or create) state.
            std::vector<DenseMatrix> params = p.init;
            for (int t = 0; t < 3; ++t) {
                opt.step(params, loss_and_grad(p, params).grads, 1e-3);
            }
            const std::size_t expected = k == OptimizerKind::kAdam ? 2 * elements * 8 : 0;
            if (opt.state_memory_bytes(8) != expected && failure.empty()) {
                failure = fmt::format("{} on {}: {} bytes, expected {}", to_string(k), to_string(kind),
                                      opt.state_memory_bytes(8), expected);
            }
            ++configs;
        }
    }
    return {failure.empty(), failure.empty() ? fmt::format("{} configurations exact", configs) : failure};
}

Outcome training_sanity(std::uint64_t seed) {
    ProblemDims logistic;
    logistic.features = 20;
    logistic.samples = 200;
    logistic.margin = 0.1;
    std::string detail;
    bool ok = true;
    for (OptimizerKind k : all_kinds()) {
        const RunRecord r = train_with_defaults(ProblemKind::kLogisticRegression, logistic, k, 2000, seed);
        const double ratio = r.final_loss() / r.initial_loss;
        ok = ok && ratio <= 0.1;
        detail += fmt::format("{}{}={:.1e}", detail.empty() ? "logistic: " : " ", to_string(k), ratio);
    }
    ProblemDims mf;
    mf.rows = 64;
    mf.cols = 64;
    mf.rank = 4;
    detail += "; factorization:";
    for (OptimizerKind k : {OptimizerKind::kSinkGd, OptimizerKind::kAdam}) {
        const RunRecord a = train_with_defaults(ProblemKind::kMatrixFactorization, mf, k, 5000, seed);
        const RunRecord b = train_with_defaults(ProblemKind::kMatrixFactorization, mf, k, 5000, seed);
        const double ratio = a.final_loss() / a.initial_loss;
        const bool same = to_csv(a) == to_csv(b);
        ok = ok && ratio <= 1e-3 && same;
        detail += fmt::format(" {}={:.1e}{}", to_string(k), ratio, same ? "" : " (NOT reproducible)");
    }
    return {ok, detail};
}

Outcome update_magnitude(std::uint64_t seed) {
    ProblemDims mf;
    const RunRecord r = train_with_defaults(ProblemKind::kMatrixFactorization, mf, OptimizerKind::kSinkGd, 1000, seed);
    const Problem p = gen_problem(ProblemKind::kMatrixFactorization, mf, seed);
    double worst = 0.0;
    std::size_t checked = 0;
    for (const StepRecord& s : r.steps) {
        for (std::size_t g = 0; g < p.groups.size(); ++g) {
            const ParamGroup& pg = p.groups[g];
            const double expected =
                kDefaultGroupScale * s.lr * std::sqrt(static_cast<double>(pg.rows * pg.cols));
            const double err = expected == 0.0 ? s.update_norms[g] : std::abs(s.update_norms[g] - expected) / expected;
            worst = std::max(worst, err);
            ++checked;
        }
    }
    return {worst <= 1e-10, fmt::format("max rel deviation {:.2e} over {} group-steps", worst, checked)};
}

// ---------------------------------------------------------------------------

Outcome sign_preservation(std::uint64_t seed) {
    Rng rng(seed);
    for (int i = 0; i < 20; ++i) {
        const DenseMatrix g = random_sign_mixed(rng, between(rng, 2, 16), between(rng, 2, 16));
        const DenseMatrix x = sr_sinkhorn(g, 7);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if ((g.values()[k] > 0.0) != (x.values()[k] > 0.0)) {
                return {false, fmt::format("sign flipped in matrix {}", i)};
            }
        }
    }
    return {true, "20 matrices"};
}

Outcome projective_contraction(std::uint64_t seed) {
    Rng rng(seed);
    for (int i = 0; i < 20; ++i) {
        const std::vector<double> e = convergence_rate_estimate(random_positive(rng, 12, 9), 15);
        for (std::size_t k = 1; k < e.size(); ++k) {
            if (e[k] > e[k - 1] + 1e-14) {
                return {false, fmt::format("matrix {}: e[{}] = {:.3e} > e[{}] = {:.3e}", i, k, e[k], k - 1, e[k - 1])};
            }
        }
    }
    return {true, "20 matrices, 15 iterations"};
}

Outcome sphere_membership(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const DenseMatrix x = sr_sinkhorn(random_sign_mixed(rng, 6, 10), 300);
        worst = std::max(worst, sphere_membership_check(x, sinkhorn_norms()).max_deviation());
    }
    return {worst <= 1e-8, fmt::format("max deviation {:.2e}", worst)};
}

Outcome direction_invariance(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const DenseMatrix g = random_gaussian(rng, 6, 10);
        const double a = rng.uniform(0.01, 100.0);
        worst = std::max(worst, relative_error(sinkgd_direction(a * g, 5), sinkgd_direction(g, 5)));
        worst = std::max(worst, relative_error(swan_direction(a * g, 1), swan_direction(g, 1)));
    }
    return {worst <= 1e-10, fmt::format("max rel difference {:.2e}", worst)};
}

Outcome configuration_coherence(std::uint64_t seed) {
    Rng rng(seed);
    for (int i = 0; i < 10; ++i) {
        const DenseMatrix g = random_gaussian(rng, 5, 9);
        const std::vector<NormSpec> sink = sinkhorn_norms();
        const std::vector<NormSpec> swan = swan_norms();
        if (!(mngd_direction(g, sink, 5) == sinkgd_direction(g, 5))) {
            return {false, "mngd with the Sinkhorn pair differs from sinkgd"};
        }
        if (!(mngd_direction(g, swan, 1) == swan_direction(g, 1))) {
            return {false, "mngd with the whitening pair differs from swan"};
        }
    }
    return {true, "bitwise equal on 10 inputs"};
}

Outcome stateless_interleaving(std::uint64_t seed) {
    const Problem a = gen_problem(ProblemKind::kMatrixFactorization, ProblemDims{16, 12, 3}, seed);
    const Problem b = gen_problem(ProblemKind::kMatrixFactorization, ProblemDims{16, 12, 3}, seed + 1);
    OptimizerBlock block;
    auto run = [&](const Problem& p, Optimizer& opt, std::vector<DenseMatrix>& params) {
        opt.step(params, loss_and_grad(p, params).grads, 0.01);
    };
    Optimizer shared(make_optimizer_config(block), make_groups(block, a));
    Optimizer solo_a(make_optimizer_config(block), make_groups(block, a));
    Optimizer solo_b(make_optimizer_config(block), make_groups(block, b));
    std::vector<DenseMatrix> pa = a.init;
    std::vector<DenseMatrix> pb = b.init;
    std::vector<DenseMatrix> qa = a.init;
    std::vector<DenseMatrix> qb = b.init;
    for (int t = 0; t < 20; ++t) {
        run(a, shared, pa);
        run(b, shared, pb);
        run(a, solo_a, qa);
        run(b, solo_b, qb);
    }
    return {pa == qa && pb == qb && shared.state_memory_bytes() == 0, "20 interleaved steps"};
}

Outcome config_round_trip(std::uint64_t /*seed*/) {
    RunConfig cfg = parse_config("command = train\n[optimizer]\nkind = mngd\nnorms = row_l2_max; spectral_max\n");
    const std::string echo = echo_config(cfg);
    const std::string again = echo_config(parse_config(echo));
    return {echo == again, echo == again ? "parse(echo) is a fixed point" : "echo changed on re-parse"};
}

Outcome weak_duality(std::uint64_t seed) {
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Vector grad{rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
        const std::vector<BallSpec> balls = {random_ball(rng), random_ball(rng)};
        const DualSolution sol = convex_multiproj_solve(grad, balls);
        worst = std::min(worst, sol.gap);
    }
    return {worst >= -1e-9, fmt::format("most negative gap {:.2e}", worst)};
}

}  // namespace

std::vector<CheckResult> run_acceptance(std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(timed("A1", "sinkhorn-equivalence", [&] { return sinkhorn_equivalence(seed); }));
    out.push_back(timed("A2", "fixed-point-normalization", [&] { return fixed_point_norms(seed + 1); }));
    out.push_back(timed("A3", "swan-recovery", [&] { return swan_recovery(seed + 2); }));
    out.push_back(timed("A4", "whitening-oracle", [&] { return whitening_oracle(seed + 3); }));
    out.push_back(timed("A5", "inner-product-monotonicity", [&] { return monotone_inner_products(seed + 4); }));
    out.push_back(timed("A6", "linear-convergence", [&] { return linear_convergence(seed + 5); }));
    out.push_back(timed("A7", "convex-solver-vs-grid", [&] { return convex_solver(seed + 6); }));
    out.push_back(timed("A8", "gradient-oracles", [&] { return gradient_oracles(seed + 7); }));
    out.push_back(timed("A9", "memory-accounting", [&] { return memory_accounting(seed + 8); }));
    out.push_back(timed("A10", "training-sanity", [&] { return training_sanity(seed + 9); }));
    out.push_back(timed("A11", "update-magnitude", [&] { return update_magnitude(seed + 10); }));
    return out;
}

std::vector<CheckResult> run_invariants(std::uint64_t seed) {
    std::vector<CheckResult> out;
    out.push_back(timed("I1", "sign-preservation", [&] { return sign_preservation(seed); }));
    out.push_back(timed("I2", "projective-contraction", [&] { return projective_contraction(seed + 1); }));
    out.push_back(timed("I3", "sphere-membership", [&] { return sphere_membership(seed + 2); }));
    out.push_back(timed("I4", "direction-invariance", [&] { return direction_invariance(seed + 3); }));
    out.push_back(timed("I5", "configuration-coherence", [&] { return configuration_coherence(seed + 4); }));
    out.push_back(timed("I6", "stateless-interleaving", [&] { return stateless_interleaving(seed + 5); }));
    out.push_back(timed("I7", "config-round-trip", [&] { return config_round_trip(seed + 6); }));
    out.push_back(timed("I8", "weak-duality", [&] { return weak_duality(seed + 7); }));
    return out;
}

std::string format_check(const CheckResult& r) {
    return fmt::format("{}  {:<4} {:<28} ({:.2f} s)  {}", r.passed ? "PASS" : "FAIL", r.id, r.name, r.seconds,
                       r.detail);
}

}  // namespace mnorm
