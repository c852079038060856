// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mnorm/error.hpp"
#include "mnorm/whiten.hpp"

namespace mnorm {

namespace {

// Orthonormalizes the columns of a in place (modified Gram-Schmidt).
void orthonormalize_columns(DenseMatrix& a) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            double proj = 0.0;
            for (std::size_t i = 0; i < a.rows(); ++i) {
                proj += a(i, k) * a(i, j);
            }
            for (std::size_t i = 0; i < a.rows(); ++i) {
                a(i, j) -= proj * a(i, k);
            }
        }
        double norm = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            norm += a(i, j) * a(i, j);
        }
        norm = std::sqrt(norm);
        for (std::size_t i = 0; i < a.rows(); ++i) {
            a(i, j) /= norm;
        }
    }
}

void require_planar(std::size_t d, const char* op) {
    if (d != 2) {
        throw DimensionError(fmt::format("{}: grid oracles are two-dimensional, got d = {}", op, d));
    }
}

double raw_norm(double x, double y, double p) {
    const double ax = std::abs(x);
    const double ay = std::abs(y);
    if (p == 1.0) {
        return ax + ay;
    }
    if (std::isinf(p)) {
        return std::max(ax, ay);
    }
    if (p == 2.0) {
        return std::hypot(ax, ay);
    }
    return std::pow(std::pow(ax, p) + std::pow(ay, p), 1.0 / p);
}

// g(z) for a ball's norm and g^*(z) for its dual, on planar points.
double ball_norm(const BallSpec& b, double x, double y) {
    return raw_norm(x, y, b.norm.p) / b.norm.resolved_scale(2, 1);
}

double ball_dual(const BallSpec& b, double x, double y) {
    return raw_norm(x, y, dual_exponent(b.norm.p)) * b.norm.resolved_scale(2, 1);
}

}  // namespace

DenseMatrix random_sign_mixed(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    DenseMatrix out(rows, cols);
    for (double& v : out.values()) {
        const double mag = rng.uniform(lo, hi);
        v = rng.uniform() < 0.5 ? -mag : mag;
    }
    return out;
}

DenseMatrix random_positive(Rng& rng, std::size_t rows, std::size_t cols, double lo, double hi) {
    DenseMatrix out(rows, cols);
    for (double& v : out.values()) {
        v = rng.uniform(lo, hi);
    }
    return out;
}

DenseMatrix random_gaussian(Rng& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix out(rows, cols);
    for (double& v : out.values()) {
        v = rng.normal();
    }
    return out;
}

DenseMatrix random_with_condition(Rng& rng, std::size_t rows, std::size_t cols, double condition) {
    if (rows > cols) {
        throw DimensionError(fmt::format("random_with_condition: need rows <= cols, got {}x{}", rows, cols));
    }
    if (!(condition >= 1.0)) {
        throw ConfigError(fmt::format("random_with_condition: condition must be >= 1, got {}", condition));
    }
    DenseMatrix u = random_gaussian(rng, rows, rows);
    DenseMatrix v = random_gaussian(rng, cols, rows);
    orthonormalize_columns(u);
    orthonormalize_columns(v);
    Vector sigma(rows);
    for (std::size_t k = 0; k < rows; ++k) {
        const double t = rows == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(rows - 1);
        sigma[k] = std::pow(condition, -t);
    }
    return matmul_nt(diag_scale(Vector(std::vector<double>(rows, 1.0)), u, sigma), v);
}

GridOptimum grid_max_linear(const Vector& grad, const std::vector<BallSpec>& balls, double resolution) {
    require_planar(grad.size(), "grid_max_linear");
    double extent = std::numeric_limits<double>::infinity();
    for (const BallSpec& b : balls) {
        validate_ball(b);
        extent = std::min(extent, b.radius * b.norm.resolved_scale(2, 1));
    }
    const auto n = static_cast<long>(std::floor(extent / resolution));
    GridOptimum best{Vector(2), -std::numeric_limits<double>::infinity()};
    for (long i = -n; i <= n; ++i) {
        const double x = static_cast<double>(i) * resolution;
        for (long j = -n; j <= n; ++j) {
            const double y = static_cast<double>(j) * resolution;
            const double value = grad[0] * x + grad[1] * y;
            if (value <= best.value) {
                continue;
            }
            bool feasible = true;
            for (const BallSpec& b : balls) {
                if (ball_norm(b, x, y) > b.radius * (1.0 + 1e-12)) {
                    feasible = false;
                    break;
                }
            }
            if (feasible) {
                best = GridOptimum{Vector{x, y}, value};
            }
        }
    }
    return best;
}

GridOptimum grid_min_block_objective(const Vector& beta, const BallSpec& ball1, const BallSpec& ballk, double radius,
                                     double resolution) {
    require_planar(beta.size(), "grid_min_block_objective");
    validate_ball(ball1);
    validate_ball(ballk);
    const auto n = static_cast<long>(std::floor(radius / resolution));
    GridOptimum best{Vector(2), std::numeric_limits<double>::infinity()};
    for (long i = -n; i <= n; ++i) {
        const double x = static_cast<double>(i) * resolution;
        for (long j = -n; j <= n; ++j) {
            const double y = static_cast<double>(j) * resolution;
            const double value = ball1.radius * ball_dual(ball1, beta[0] - x, beta[1] - y) +
                                 ballk.radius * ball_dual(ballk, x, y);
            if (value < best.value) {
                best = GridOptimum{Vector{x, y}, value};
            }
        }
    }
    return best;
}

double grid_fenchel_sup(const Vector& x, double p, double radius, double resolution) {
    require_planar(x.size(), "grid_fenchel_sup");
    const auto n = static_cast<long>(std::floor(radius / resolution));
    double best = -std::numeric_limits<double>::infinity();
    for (long i = -n; i <= n; ++i) {
        const double a = static_cast<double>(i) * resolution;
        for (long j = -n; j <= n; ++j) {
            const double b = static_cast<double>(j) * resolution;
            best = std::max(best, a * x[0] + b * x[1] - raw_norm(a, b, p));
        }
    }
    return best;
}

DenseMatrix swan_reference(const DenseMatrix& grad) {
    const double sqrt_n = std::sqrt(static_cast<double>(grad.cols()));
    DenseMatrix g = grad;
    const Vector norms = row_norms(grad);
    for (std::size_t i = 0; i < g.rows(); ++i) {
        for (double& v : g.row(i)) {
            v *= sqrt_n / norms[i];
        }
    }
    return sqrt_n * eig_whiten_oracle(g);
}

std::vector<long double> scalar_adam_reference(long double param, long double grad, int steps, long double lr,
                                               const AdamHyper& hyper) {
    const long double b1 = hyper.beta1;
    const long double b2 = hyper.beta2;
    long double m = 0.0L;
    long double s = 0.0L;
    std::vector<long double> out;
    for (int t = 1; t <= steps; ++t) {
        m = b1 * m + (1.0L - b1) * grad;
        s = b2 * s + (1.0L - b2) * grad * grad;
        const long double mhat = m / (1.0L - std::pow(b1, static_cast<long double>(t)));
        const long double shat = s / (1.0L - std::pow(b2, static_cast<long double>(t)));
        param -= lr * mhat / (std::sqrt(shat) + static_cast<long double>(hyper.eps));
        out.push_back(param);
    }
    return out;
}

std::vector<DenseMatrix> finite_difference_grad(const Problem& problem, const std::vector<DenseMatrix>& params,
                                                double h) {
    std::vector<DenseMatrix> out;
    std::vector<DenseMatrix> probe = params;
    for (std::size_t g = 0; g < params.size(); ++g) {
        DenseMatrix grad(params[g].rows(), params[g].cols());
        auto values = probe[g].values();
        for (std::size_t i = 0; i < values.size(); ++i) {
            const double saved = values[i];
            values[i] = saved + h;
            const double plus = loss_value(problem, probe);
            values[i] = saved - h;
            const double minus = loss_value(problem, probe);
            values[i] = saved;
            grad.values()[i] = (plus - minus) / (2.0 * h);
        }
        out.push_back(std::move(grad));
    }
    return out;
}

double max_group_relative_error(const std::vector<DenseMatrix>& a, const std::vector<DenseMatrix>& b, double floor) {
    if (a.size() != b.size()) {
        throw DimensionError("max_group_relative_error: group count mismatch");
    }
    double worst = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) {
        worst = std::max(worst, frobenius_norm(a[g] - b[g]) / std::max(frobenius_norm(b[g]), floor));
    }
    return worst;
}

}  // namespace mnorm
