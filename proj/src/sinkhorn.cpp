// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mnorm/error.hpp"

namespace mnorm {

namespace {

void require_iterations(int iterations, const char* op) {
    if (iterations < 1) {
        throw ConfigError(fmt::format("{}: L must be >= 1, got {}", op, iterations));
    }
}

void check_nonnegative(const DenseMatrix& a, Mode mode) {
    for (double v : a.values()) {
        if (v < 0.0 || (mode == Mode::kStrict && v == 0.0)) {
            throw DomainError(fmt::format("classic_sinkhorn: entry {} violates {} positivity", v,
                                          mode == Mode::kStrict ? "strict" : "non-negative"));
        }
    }
}

double guarded(double denom) {
    return denom > 0.0 ? denom : kGuardFloor;
}

// One Sinkhorn half-step pair; updates u then v in place.
void sinkhorn_round(const DenseMatrix& a, Vector& u, Vector& v) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    for (std::size_t i = 0; i < m; ++i) {
        auto r = a.row(i);
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            s += r[j] * v[j];
        }
        u[i] = static_cast<double>(n) / guarded(s);
    }
    std::vector<double> colsum(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        auto r = a.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            colsum[j] += r[j] * u[i];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        v[j] = static_cast<double>(m) / guarded(colsum[j]);
    }
}

std::vector<Vector> u_history(const DenseMatrix& a, int iterations) {
    Vector u(a.rows(), 1.0);
    Vector v(a.cols(), 1.0);
    std::vector<Vector> out;
    out.reserve(static_cast<std::size_t>(iterations));
    for (int k = 0; k < iterations; ++k) {
        sinkhorn_round(a, u, v);
        out.push_back(u);
    }
    return out;
}

bool all_nonzero(const DenseMatrix& a) {
    return std::none_of(a.values().begin(), a.values().end(), [](double v) { return v == 0.0; });
}

}  // namespace

DenseMatrix sr_sinkhorn(const DenseMatrix& grad, int iterations, Mode mode) {
    require_iterations(iterations, "sr_sinkhorn");
    const double row_target = std::sqrt(static_cast<double>(grad.cols()));
    const double col_target = std::sqrt(static_cast<double>(grad.rows()));
    DenseMatrix x = grad;
    for (int l = 0; l < iterations; ++l) {
        normalize_rows_inplace(x, row_target, mode);
        normalize_cols_inplace(x, col_target, mode);
    }
    return x;
}

SinkhornScaling classic_sinkhorn(const DenseMatrix& a, int iterations, Mode mode) {
    require_iterations(iterations, "classic_sinkhorn");
    check_nonnegative(a, mode);
    SinkhornScaling out{Vector(a.rows(), 1.0), Vector(a.cols(), 1.0), iterations};
    for (int k = 0; k < iterations; ++k) {
        sinkhorn_round(a, out.u, out.v);
    }
    return out;
}

double sr_equivalence_check(const DenseMatrix& grad, int iterations) {
    const Vector rn = row_norms(grad);
    const Vector cn = col_norms(grad);
    if (std::any_of(rn.begin(), rn.end(), [](double v) { return v == 0.0; }) ||
        std::any_of(cn.begin(), cn.end(), [](double v) { return v == 0.0; })) {
        throw DegenerateInputError("sr_equivalence_check: gradient has a zero row or column");
    }
    const DenseMatrix direct = sr_sinkhorn(grad, iterations, Mode::kStrict);
    const SinkhornScaling scaling = classic_sinkhorn(hadamard_square(grad), iterations, Mode::kGuarded);
    Vector su(scaling.u.size());
    Vector sv(scaling.v.size());
    for (std::size_t i = 0; i < su.size(); ++i) {
        su[i] = std::sqrt(scaling.u[i]);
    }
    for (std::size_t j = 0; j < sv.size(); ++j) {
        sv[j] = std::sqrt(scaling.v[j]);
    }
    return relative_error(diag_scale(su, grad, sv), direct);
}

double hilbert_metric(const Vector& a, const Vector& b) {
    if (a.size() != b.size() || a.empty()) {
        throw DimensionError(fmt::format("hilbert_metric: length mismatch {} vs {}", a.size(), b.size()));
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!(a[i] > 0.0) || !(b[i] > 0.0)) {
            throw DomainError("hilbert_metric: entries must be strictly positive");
        }
        const double r = std::log(a[i]) - std::log(b[i]);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return hi - lo;
}

std::vector<double> convergence_rate_estimate(const DenseMatrix& grad, int iterations) {
    require_iterations(iterations, "convergence_rate_estimate");
    const DenseMatrix a = hadamard_square(grad);
    check_nonnegative(a, Mode::kStrict);
    const std::vector<Vector> history = u_history(a, 4 * iterations);
    const Vector& limit = history.back();
    std::vector<double> errors;
    errors.reserve(static_cast<std::size_t>(iterations));
    for (int k = 0; k < iterations; ++k) {
        errors.push_back(hilbert_metric(history[static_cast<std::size_t>(k)], limit));
    }
    return errors;
}

double tail_ratio_variation(std::span<const double> errors) {
    if (std::all_of(errors.begin(), errors.end(), [](double e) { return e == 0.0; })) {
        return 0.0;
    }
    std::vector<double> ratios;
    for (std::size_t k = errors.size() / 2; k + 1 < errors.size(); ++k) {
        if (errors[k] > 0.0) {
            ratios.push_back(errors[k + 1] / errors[k]);
        }
    }
    if (ratios.size() < 2) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double mean = 0.0;
    for (double r : ratios) {
        mean += r;
    }
    mean /= static_cast<double>(ratios.size());
    double var = 0.0;
    for (double r : ratios) {
        var += (r - mean) * (r - mean);
    }
    var /= static_cast<double>(ratios.size());
    return mean > 0.0 ? std::sqrt(var) / mean : std::numeric_limits<double>::quiet_NaN();
}

SinkhornTrace sinkhorn_trace(const DenseMatrix& grad, int iterations, Mode mode) {
    require_iterations(iterations, "sinkhorn_trace");
    const double sqrt_n = std::sqrt(static_cast<double>(grad.cols()));
    const double sqrt_m = std::sqrt(static_cast<double>(grad.rows()));

    std::vector<Vector> history;
    if (all_nonzero(grad)) {
        history = u_history(hadamard_square(grad), 4 * iterations);
    }

    SinkhornTrace out{grad, {}};
    for (int k = 0; k < iterations; ++k) {
        normalize_rows_inplace(out.x, sqrt_n, mode);
        normalize_cols_inplace(out.x, sqrt_m, mode);
        SinkhornTraceRow row;
        row.k = k + 1;
        for (double r : row_norms(out.x)) {
            row.row_residual = std::max(row.row_residual, std::abs(r - sqrt_n) / sqrt_n);
        }
        for (double c : col_norms(out.x)) {
            row.col_residual = std::max(row.col_residual, std::abs(c - sqrt_m) / sqrt_m);
        }
        row.hilbert_error = history.empty()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : hilbert_metric(history[static_cast<std::size_t>(k)], history.back());
        out.rows.push_back(row);
    }
    return out;
}

}  // namespace mnorm
