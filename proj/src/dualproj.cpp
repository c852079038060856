// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/dualproj.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <fmt/format.h>

#include "mnorm/error.hpp"

namespace mnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNonzeroLambda = 1e-9;

double sign(double v) {
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
}

// Radius of the ball measured in the raw l_p norm.
double raw_radius(const BallSpec& ball, std::size_t d) {
    return ball.radius * ball.norm.resolved_scale(d, 1);
}

Vector axpy(const Vector& x, double a, const Vector& y) {
    Vector out = x;
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] += a * y[i];
    }
    return out;
}

Vector sub(const Vector& x, const Vector& y) {
    return axpy(x, -1.0, y);
}

Vector add(const Vector& x, const Vector& y) {
    return axpy(x, 1.0, y);
}

Vector project_l1(const Vector& x, double r) {
    if (lp_norm(x, 1.0) <= r) {
        return x;
    }
    std::vector<double> u;
    u.reserve(x.size());
    for (double v : x) {
        u.push_back(std::abs(v));
    }
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cum += u[j];
        const double t = (cum - r) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            theta = t;
        }
    }
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = sign(x[i]) * std::max(std::abs(x[i]) - theta, 0.0);
    }
    return out;
}

void require_same_length(const Vector& a, const Vector& b, const char* op) {
    if (a.size() != b.size()) {
        throw DimensionError(fmt::format("{}: length mismatch {} vs {}", op, a.size(), b.size()));
    }
}

}  // namespace

void validate_ball(const BallSpec& ball) {
    if (ball.norm.kind != NormKind::kVectorLp) {
        throw ConfigError(fmt::format("ball: {} is not a vector norm", ball.norm.to_string()));
    }
    if (ball.norm.p != 1.0 && ball.norm.p != 2.0 && !std::isinf(ball.norm.p)) {
        throw ConfigError(fmt::format("ball: {} is not one of l1, l2, linf", ball.norm.to_string()));
    }
    if (!(ball.radius > 0.0) || !std::isfinite(ball.radius)) {
        throw ConfigError(fmt::format("ball: radius must be positive, got {}", ball.radius));
    }
}

Subgradient lp_subdifferential(const Vector& x, double p) {
    if (!(p >= 1.0)) {
        throw ConfigError(fmt::format("lp_subdifferential: p must be >= 1, got {}", p));
    }
    Subgradient out{Vector(x.size()), false};
    const double norm = lp_norm(x, p);
    if (norm == 0.0) {
        out.zero_input = true;
        return out;
    }
    if (p == 1.0) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.g[i] = sign(x[i]);
        }
    } else if (std::isinf(p)) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            if (std::abs(x[i]) > std::abs(x[best])) {
                best = i;
            }
        }
        out.g[best] = sign(x[best]);
    } else {
        // |x_i|^{p-2} x_i / ||x||_p^{p-1}, written to avoid overflow.
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.g[i] = sign(x[i]) * std::pow(std::abs(x[i]) / norm, p - 1.0);
        }
    }
    return out;
}

Vector project_ball(const Vector& x, const BallSpec& ball) {
    validate_ball(ball);
    const double r = raw_radius(ball, x.size());
    const double p = ball.norm.p;
    if (p == 2.0) {
        const double n = lp_norm(x, 2.0);
        if (n <= r) {
            return x;
        }
        Vector out = x;
        for (double& v : out) {
            v *= r / n;
        }
        return out;
    }
    if (std::isinf(p)) {
        Vector out = x;
        for (double& v : out) {
            v = std::clamp(v, -r, r);
        }
        return out;
    }
    return project_l1(x, r);
}

Vector prox_scaled_dual_norm(const Vector& x, double step, const BallSpec& ball) {
    validate_ball(ball);
    if (step < 0.0) {
        throw ConfigError(fmt::format("prox_scaled_dual_norm: step must be >= 0, got {}", step));
    }
    if (step == 0.0) {
        return x;
    }
    return sub(x, project_ball(x, BallSpec{ball.norm, step * ball.radius}));
}

double block_objective(const Vector& beta, const Vector& lambda, const BallSpec& ball1, const BallSpec& ballk) {
    return ball1.radius * dual_norm_eval(ball1.norm, sub(beta, lambda)) +
           ballk.radius * dual_norm_eval(ballk.norm, lambda);
}

ChambollePockState chambolle_pock(const Vector& beta, const BallSpec& ball1, const BallSpec& ballk,
                                  const ChambollePockOptions& options, const ChambollePockState* warm) {
    validate_ball(ball1);
    validate_ball(ballk);
    if (!(options.eta1 > 0.0) || !(options.eta2 > 0.0) || !(options.eta1 * options.eta2 < 1.0)) {
        throw ConfigError(
            fmt::format("chambolle_pock: need eta1, eta2 > 0 with eta1*eta2 < 1, got {} and {}", options.eta1,
                        options.eta2));
    }
    if (options.iterations < 1) {
        throw ConfigError(fmt::format("chambolle_pock: L must be >= 1, got {}", options.iterations));
    }
    const std::size_t d = beta.size();
    Vector lambda(d);
    Vector z(d);
    if (warm != nullptr) {
        require_same_length(beta, warm->lambda, "chambolle_pock");
        require_same_length(beta, warm->z, "chambolle_pock");
        lambda = warm->lambda;
        z = warm->z;
    }
    Vector u = lambda;

    // Best point among the start, both endpoints and every iterate.
    ChambollePockState best{Vector(d), z, block_objective(beta, Vector(d), ball1, ballk)};
    auto consider = [&](const Vector& candidate) {
        const double obj = block_objective(beta, candidate, ball1, ballk);
        if (obj < best.objective) {
            best.lambda = candidate;
            best.z = z;
            best.objective = obj;
        }
    };
    consider(beta);
    consider(lambda);

    for (int it = 0; it < options.iterations; ++it) {
        z = project_ball(axpy(z, options.eta1, sub(u, beta)), ball1);
        const Vector previous = lambda;
        lambda = prox_scaled_dual_norm(axpy(lambda, -options.eta2, z), options.eta2, ballk);
        u = axpy(lambda, 1.0, sub(lambda, previous));
        consider(lambda);
    }
    // Keep the final dual iterate for warm starts even if lambda came earlier.
    best.z = z;
    return best;
}

double dual_objective(const std::vector<Vector>& lambdas, const std::vector<BallSpec>& balls) {
    if (lambdas.size() != balls.size()) {
        throw DimensionError(fmt::format("dual_objective: {} multipliers vs {} balls", lambdas.size(), balls.size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < balls.size(); ++i) {
        total += balls[i].radius * dual_norm_eval(balls[i].norm, lambdas[i]);
    }
    return total;
}

Vector recover_primal(const Vector& lambda_k, const BallSpec& ball) {
    validate_ball(ball);
    if (lp_norm(lambda_k, kInf) == 0.0) {
        throw DegenerateInputError("recover_primal: lambda_k = 0 leaves the primal point undetermined");
    }
    Vector out = normalized_projection(ball.norm, lambda_k, Mode::kStrict);
    for (double& v : out) {
        v *= ball.radius;
    }
    return out;
}

double max_constraint_ratio(const Vector& z, const std::vector<BallSpec>& balls) {
    double worst = 0.0;
    for (const BallSpec& b : balls) {
        worst = std::max(worst, norm_eval(b.norm, z) / b.radius);
    }
    return worst;
}

namespace {

// Primal candidates: eps_k P_{g_k}(lambda_k) for every nonzero lambda_k, plus
// the negated Chambolle-Pock dual iterates. Each is shrunk onto the
// intersection and the one with the largest <grad, z> wins. The
// recovered point from a single lambda_k is exact only when g_k's maximizer
// is unique, which fails at corners of polyhedral intersections.
Vector best_primal(const Vector& grad, const std::vector<BallSpec>& balls, const std::vector<Vector>& lambdas,
                   const std::vector<Vector>& duals) {
    std::vector<Vector> candidates;
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if (lp_norm(lambdas[k], 2.0) > kNonzeroLambda) {
            candidates.push_back(recover_primal(lambdas[k], balls[k]));
        }
    }
    for (const Vector& z : duals) {
        Vector neg = z;
        for (double& v : neg) {
            v = -v;
        }
        candidates.push_back(neg);
    }
    Vector best(grad.size());
    double best_value = 0.0;
    for (Vector& c : candidates) {
        const double ratio = max_constraint_ratio(c, balls);
        if (ratio > 1.0) {
            for (double& v : c) {
                v /= ratio;
            }
        }
        const double value = dot(grad, c);
        if (value > best_value) {
            best_value = value;
            best = c;
        }
    }
    return best;
}

void finish(DualSolution& sol, const Vector& grad) {
    sol.primal_value = dot(grad, sol.primal);
    sol.gap = sol.objective - sol.primal_value;
}

}  // namespace

DualSolution coordinate_dual_descent(const Vector& grad, const std::vector<BallSpec>& balls,
                                     const DualSolverOptions& options) {
    if (balls.size() < 2) {
        throw ConfigError(fmt::format("coordinate_dual_descent: need K >= 2 balls, got {}", balls.size()));
    }
    for (const BallSpec& b : balls) {
        validate_ball(b);
    }
    if (options.sweeps < 1) {
        throw ConfigError(fmt::format("coordinate_dual_descent: T must be >= 1, got {}", options.sweeps));
    }
    const std::size_t d = grad.size();
    const std::size_t k_count = balls.size();

    DualSolution sol;
    sol.lambdas.assign(k_count, Vector(d));
    sol.lambdas[0] = grad;
    sol.objective = dual_objective(sol.lambdas, balls);
    sol.primal = Vector(d);
    if (lp_norm(grad, kInf) == 0.0) {
        sol.history.push_back(0.0);
        finish(sol, grad);
        return sol;
    }

    // One warm-started Chambolle-Pock state per block pair (i, j), i < j.
    // Pairs (1, k) are the classic sweep; for K >= 3 the pairs among
    // lambda_2..lambda_K are swept as well, since single-block moves against
    // lambda_1 alone can stall on the nonsmooth coupling.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 1; k < k_count; ++k) {
        pairs.emplace_back(0, k);
    }
    for (std::size_t i = 1; i < k_count; ++i) {
        for (std::size_t j = i + 1; j < k_count; ++j) {
            pairs.emplace_back(i, j);
        }
    }
    std::vector<ChambollePockState> states(pairs.size(), ChambollePockState{Vector(d), Vector(d), 0.0});
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        states[p].lambda = sol.lambdas[pairs[p].second];
    }
    for (int t = 0; t < options.sweeps; ++t) {
        const double before = sol.objective;
        for (std::size_t p = 0; p < pairs.size(); ++p) {
            const auto [i, j] = pairs[p];
            // beta = grad - sum_{l != i, j} lambda_l = lambda_i + lambda_j.
            const Vector beta = add(sol.lambdas[i], sol.lambdas[j]);
            const double current = block_objective(beta, sol.lambdas[j], balls[i], balls[j]);
            states[p].lambda = sol.lambdas[j];
            const ChambollePockState next = chambolle_pock(beta, balls[i], balls[j], options.inner, &states[p]);
            states[p].z = next.z;
            if (next.objective < current) {
                sol.lambdas[j] = next.lambda;
                sol.lambdas[i] = sub(beta, next.lambda);
            }
        }
        sol.objective = dual_objective(sol.lambdas, balls);
        sol.history.push_back(sol.objective);
        sol.sweeps = t + 1;
        if (std::abs(before - sol.objective) < options.tolerance) {
            break;
        }
    }

    std::vector<Vector> duals;
    for (const ChambollePockState& st : states) {
        duals.push_back(st.z);
    }
    sol.primal = best_primal(grad, balls, sol.lambdas, duals);
    finish(sol, grad);
    return sol;
}

DualSolution convex_multiproj_solve(const Vector& grad, const std::vector<BallSpec>& balls,
                                    const DualSolverOptions& options) {
    if (balls.empty()) {
        throw ConfigError("convex_multiproj: empty ball list");
    }
    if (balls.size() >= 2) {
        return coordinate_dual_descent(grad, balls, options);
    }
    validate_ball(balls[0]);
    DualSolution sol;
    sol.lambdas = {grad};
    sol.objective = dual_objective(sol.lambdas, balls);
    sol.history = {sol.objective};
    sol.primal = lp_norm(grad, kInf) == 0.0 ? Vector(grad.size()) : recover_primal(grad, balls[0]);
    finish(sol, grad);
    return sol;
}

Vector convex_multiproj(const Vector& grad, const std::vector<BallSpec>& balls, const DualSolverOptions& options) {
    return convex_multiproj_solve(grad, balls, options).primal;
}

}  // namespace mnorm
