// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "mnorm/error.hpp"
#include "mnorm/whiten.hpp"

namespace mnorm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Newton-Schulz budget used inside the spectral projection: iterate to
// convergence rather than a fixed count.
constexpr int kProjectionNsMaxIters = 100;
constexpr double kProjectionNsTol = 1e-13;

bool vector_shaped(const DenseMatrix& x) {
    return x.rows() == 1 || x.cols() == 1;
}

void require_vector_shaped(const NormSpec& spec, const DenseMatrix& x) {
    if (!vector_shaped(x)) {
        throw TypeError(fmt::format("{} applies to vectors, got a {} matrix", spec.to_string(), x.shape()));
    }
}

void reject_matrix_kind(const NormSpec& spec) {
    if (spec.is_matrix_kind()) {
        throw TypeError(fmt::format("{} applies to matrices, got a vector", spec.to_string()));
    }
}

double sign(double v) {
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
}

std::vector<double> project_lp(std::span<const double> x, double p, double scale, Mode mode) {
    std::vector<double> z(x.size(), 0.0);
    if (lp_norm(x, kInf) == 0.0) {
        if (mode == Mode::kStrict) {
            throw DegenerateInputError("normalized_projection: zero vector");
        }
        return z;
    }
    if (p == 2.0) {
        const double n2 = lp_norm(x, 2.0);
        for (std::size_t i = 0; i < x.size(); ++i) {
            z[i] = scale * x[i] / n2;
        }
    } else if (std::isinf(p)) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            z[i] = scale * sign(x[i]);
        }
    } else if (p == 1.0) {
        // Lowest index attaining max |x_i|.
        std::size_t best = 0;
        for (std::size_t i = 1; i < x.size(); ++i) {
            if (std::abs(x[i]) > std::abs(x[best])) {
                best = i;
            }
        }
        z[best] = scale * sign(x[best]);
    } else {
        throw ConfigError(fmt::format("normalized_projection: vector_lp with p={} has no closed form here", p));
    }
    return z;
}

DenseMatrix spectral_projection_wide(const DenseMatrix& x, double scale, Mode mode) {
    DenseMatrix whitened;
    try {
        whitened = newton_schulz_whiten_traced(x, kProjectionNsMaxIters, kProjectionNsTol).whitened;
    } catch (const SingularInputError& e) {
        if (mode == Mode::kStrict) {
            throw DegenerateInputError(fmt::format("spectral projection: {}", e.what()));
        }
        whitened = eig_whiten_pseudo(x);
    }
    whitened *= scale;
    return whitened;
}

}  // namespace

NormSpec NormSpec::row_l2_max(std::optional<double> scale) {
    return {NormKind::kRowL2Max, 2.0, scale};
}

NormSpec NormSpec::col_l2_max(std::optional<double> scale) {
    return {NormKind::kColL2Max, 2.0, scale};
}

NormSpec NormSpec::spectral_max(std::optional<double> scale) {
    return {NormKind::kSpectralMax, 2.0, scale};
}

NormSpec NormSpec::vector_lp(double p, std::optional<double> scale) {
    if (!(p >= 1.0)) {
        throw ConfigError(fmt::format("vector_lp: p must lie in [1, inf], got {}", p));
    }
    return {NormKind::kVectorLp, p, scale};
}

double NormSpec::resolved_scale(std::size_t rows, std::size_t cols) const {
    if (scale) {
        if (!(*scale > 0.0) || !std::isfinite(*scale)) {
            throw ConfigError(fmt::format("{}: scale must be positive", to_string()));
        }
        return *scale;
    }
    switch (kind) {
        case NormKind::kRowL2Max:
            return std::sqrt(static_cast<double>(cols));
        case NormKind::kColL2Max:
            return std::sqrt(static_cast<double>(rows));
        case NormKind::kSpectralMax:
            return std::sqrt(static_cast<double>(std::max(rows, cols)));
        case NormKind::kVectorLp:
            return 1.0;
    }
    return 1.0;
}

std::string NormSpec::to_string() const {
    std::string out;
    switch (kind) {
        case NormKind::kRowL2Max:
            out = "row_l2_max";
            break;
        case NormKind::kColL2Max:
            out = "col_l2_max";
            break;
        case NormKind::kSpectralMax:
            out = "spectral_max";
            break;
        case NormKind::kVectorLp:
            out = std::isinf(p) ? "vector_lp:p=inf" : "vector_lp:p=" + format_double(p);
            break;
    }
    if (scale) {
        out += kind == NormKind::kVectorLp ? "," : ":";
        out += "scale=" + format_double(*scale);
    }
    return out;
}

NormSpec NormSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    NormSpec spec;
    if (name == "row_l2_max") {
        spec = row_l2_max();
    } else if (name == "col_l2_max") {
        spec = col_l2_max();
    } else if (name == "spectral_max") {
        spec = spectral_max();
    } else if (name == "vector_lp") {
        spec = vector_lp(2.0);
    } else {
        throw ConfigError(fmt::format("unknown norm '{}'", name));
    }
    bool saw_p = false;
    if (colon != std::string_view::npos) {
        std::string_view rest = text.substr(colon + 1);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            const auto eq = item.find('=');
            if (eq == std::string_view::npos) {
                throw ConfigError(fmt::format("norm option '{}' must be key=value", item));
            }
            const std::string key(item.substr(0, eq));
            const std::string value(item.substr(eq + 1));
            double number = 0.0;
            if (value == "inf") {
                number = kInf;
            } else {
                char* end = nullptr;
                number = std::strtod(value.c_str(), &end);
                if (end == value.c_str() || *end != '\0') {
                    throw ConfigError(fmt::format("norm option {}: '{}' is not a number", key, value));
                }
            }
            if (key == "p") {
                if (spec.kind != NormKind::kVectorLp) {
                    throw ConfigError(fmt::format("norm option p only applies to vector_lp"));
                }
                spec = vector_lp(number, spec.scale);
                saw_p = true;
            } else if (key == "scale") {
                if (!(number > 0.0) || std::isinf(number)) {
                    throw ConfigError(fmt::format("norm scale must be positive and finite, got '{}'", value));
                }
                spec.scale = number;
            } else {
                throw ConfigError(fmt::format("unknown norm option '{}'", key));
            }
        }
    }
    if (spec.kind == NormKind::kVectorLp && !saw_p) {
        throw ConfigError("vector_lp requires p=<value>");
    }
    return spec;
}

double dual_exponent(double p) {
    if (p == 1.0) {
        return kInf;
    }
    if (std::isinf(p)) {
        return 1.0;
    }
    return p / (p - 1.0);
}

Vector singular_values(const DenseMatrix& x) {
    const DenseMatrix gram = x.rows() <= x.cols() ? matmul_nt(x, x) : matmul_tn(x, x);
    const SymmetricEigen eig = symmetric_eigen(gram);
    Vector out(eig.values.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = std::sqrt(std::max(0.0, eig.values[eig.values.size() - 1 - k]));
    }
    return out;
}

double norm_eval(const NormSpec& spec, const DenseMatrix& x) {
    const double s = spec.resolved_scale(x.rows(), x.cols());
    switch (spec.kind) {
        case NormKind::kRowL2Max: {
            const Vector r = row_norms(x);
            return lp_norm(r, kInf) / s;
        }
        case NormKind::kColL2Max: {
            const Vector c = col_norms(x);
            return lp_norm(c, kInf) / s;
        }
        case NormKind::kSpectralMax:
            return singular_values(x)[0] / s;
        case NormKind::kVectorLp:
            require_vector_shaped(spec, x);
            return lp_norm(x.values(), spec.p) / s;
    }
    return 0.0;
}

double norm_eval(const NormSpec& spec, const Vector& x) {
    reject_matrix_kind(spec);
    return lp_norm(x, spec.p) / spec.resolved_scale(x.size(), 1);
}

double dual_norm_eval(const NormSpec& spec, const DenseMatrix& x) {
    const double s = spec.resolved_scale(x.rows(), x.cols());
    switch (spec.kind) {
        case NormKind::kRowL2Max: {
            const Vector r = row_norms(x);
            return s * lp_norm(r, 1.0);
        }
        case NormKind::kColL2Max: {
            const Vector c = col_norms(x);
            return s * lp_norm(c, 1.0);
        }
        case NormKind::kSpectralMax:
            return s * lp_norm(singular_values(x), 1.0);
        case NormKind::kVectorLp:
            require_vector_shaped(spec, x);
            return s * lp_norm(x.values(), dual_exponent(spec.p));
    }
    return 0.0;
}

double dual_norm_eval(const NormSpec& spec, const Vector& x) {
    reject_matrix_kind(spec);
    return spec.resolved_scale(x.size(), 1) * lp_norm(x, dual_exponent(spec.p));
}

void normalize_rows_inplace(DenseMatrix& x, double target, Mode mode) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        double norm = lp_norm(r, 2.0);
        if (norm == 0.0) {
            if (mode == Mode::kStrict) {
                throw DegenerateInputError(fmt::format("row normalization: row {} is zero", i));
            }
            norm = kGuardFloor;
        }
        const double factor = target / norm;
        for (double& v : r) {
            v *= factor;
        }
    }
}

void normalize_cols_inplace(DenseMatrix& x, double target, Mode mode) {
    Vector norms = col_norms(x);
    for (std::size_t j = 0; j < x.cols(); ++j) {
        if (norms[j] == 0.0) {
            if (mode == Mode::kStrict) {
                throw DegenerateInputError(fmt::format("column normalization: column {} is zero", j));
            }
            norms[j] = kGuardFloor;
        }
        norms[j] = target / norms[j];
    }
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto r = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            r[j] *= norms[j];
        }
    }
}

DenseMatrix normalized_projection(const NormSpec& spec, const DenseMatrix& x, Mode mode) {
    const double s = spec.resolved_scale(x.rows(), x.cols());
    switch (spec.kind) {
        case NormKind::kRowL2Max: {
            DenseMatrix z = x;
            normalize_rows_inplace(z, s, mode);
            return z;
        }
        case NormKind::kColL2Max: {
            DenseMatrix z = x;
            normalize_cols_inplace(z, s, mode);
            return z;
        }
        case NormKind::kSpectralMax:
            if (x.rows() <= x.cols()) {
                return spectral_projection_wide(x, s, mode);
            }
            return transpose(spectral_projection_wide(transpose(x), s, mode));
        case NormKind::kVectorLp:
            require_vector_shaped(spec, x);
            return {x.rows(), x.cols(), project_lp(x.values(), spec.p, s, mode)};
    }
    return x;
}

Vector normalized_projection(const NormSpec& spec, const Vector& x, Mode mode) {
    reject_matrix_kind(spec);
    return Vector(project_lp(x.values(), spec.p, spec.resolved_scale(x.size(), 1), mode));
}

ProjectionConstant projection_l2_constant(const NormSpec& spec, std::size_t rows, std::size_t cols) {
    const double s = spec.resolved_scale(rows, cols);
    const auto m = static_cast<double>(rows);
    const auto n = static_cast<double>(cols);
    switch (spec.kind) {
        case NormKind::kRowL2Max:
            return {s * std::sqrt(m)};
        case NormKind::kColL2Max:
            return {s * std::sqrt(n)};
        case NormKind::kSpectralMax:
            return {s * std::sqrt(std::min(m, n))};
        case NormKind::kVectorLp:
            if (spec.p == 2.0) {
                return {s};
            }
            if (std::isinf(spec.p)) {
                return {s * std::sqrt(m * n)};
            }
            throw AssumptionViolatedError(
                fmt::format("{}: projections have no input-independent l2 norm", spec.to_string()));
    }
    return {0.0};
}

NormSpec rescale_norm(const NormSpec& spec, double target, std::size_t rows, std::size_t cols) {
    if (!(target > 0.0) || !std::isfinite(target)) {
        throw ConfigError(fmt::format("rescale_norm: target must be positive, got {}", target));
    }
    const double c = projection_l2_constant(spec, rows, cols).c;
    // Already at the target up to rounding: keep the spec as given.
    if (std::abs(c - target) <= 4.0 * std::numeric_limits<double>::epsilon() * target) {
        return spec;
    }
    NormSpec out = spec;
    // The projection length is linear in the divisor.
    out.scale = spec.resolved_scale(rows, cols) * (target / c);
    return out;
}

}  // namespace mnorm
