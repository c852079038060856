// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/multinorm.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mnorm/error.hpp"

namespace mnorm {

MultiNormResult multi_normalize(const DenseMatrix& grad, std::span<const NormSpec> norms, int iterations,
                                const MultiNormOptions& options) {
    if (norms.empty()) {
        throw ConfigError("multi_normalize: empty norm list");
    }
    if (iterations < 1) {
        throw ConfigError(fmt::format("multi_normalize: L must be >= 1, got {}", iterations));
    }
    if (options.mode == Mode::kStrict && max_abs(grad) == 0.0) {
        throw DegenerateInputError("multi_normalize: zero gradient");
    }

    MultiNormResult out{grad, {}};
    MultiNormReport& report = out.report;
    report.iterations = iterations;
    if (options.diagnostics) {
        report.l2_norms.push_back(frobenius_norm(grad));
    }

    bool have_previous = false;
    for (int l = 0; l < iterations; ++l) {
        for (const NormSpec& spec : norms) {
            DenseMatrix next = normalized_projection(spec, out.x, options.mode);
            if (options.diagnostics) {
                if (have_previous) {
                    report.inner_products.push_back(frobenius_inner(out.x, next));
                }
                report.l2_norms.push_back(frobenius_norm(next));
            }
            have_previous = true;
            if (options.keep_iterates) {
                report.iterates.push_back(next);
            }
            out.x = std::move(next);
        }
        if (options.track_residuals) {
            report.cycle_residuals.push_back(fixed_point_residual(out.x, norms, options.mode));
        }
    }
    if (!options.diagnostics) {
        return out;
    }
    report.final_residual = options.track_residuals ? report.cycle_residuals.back()
                                                    : fixed_point_residual(out.x, norms, options.mode);
    return out;
}

double fixed_point_residual(const DenseMatrix& x, std::span<const NormSpec> norms, Mode mode) {
    double worst = 0.0;
    for (const NormSpec& spec : norms) {
        worst = std::max(worst, frobenius_norm(normalized_projection(spec, x, mode) - x));
    }
    return worst;
}

double SphereMembership::max_deviation() const {
    double worst = l2_deviation;
    for (double d : norm_deviations) {
        worst = std::max(worst, d);
    }
    return worst;
}

SphereMembership sphere_membership_check(const DenseMatrix& x, std::span<const NormSpec> norms) {
    if (norms.empty()) {
        throw ConfigError("sphere_membership_check: empty norm list");
    }
    SphereMembership out;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const NormSpec& spec = norms[i];
        if (!spec.is_matrix_kind() && x.rows() != 1 && x.cols() != 1) {
            throw ConfigError(
                fmt::format("sphere_membership_check: {} does not apply to a {} matrix", spec.to_string(), x.shape()));
        }
        double c = 0.0;
        try {
            c = projection_l2_constant(spec, x.rows(), x.cols()).c;
        } catch (const AssumptionViolatedError& e) {
            throw ConfigError(fmt::format("sphere_membership_check: {}", e.what()));
        }
        if (i == 0) {
            out.c = c;
        } else if (std::abs(c - out.c) > 1e-12 * out.c) {
            throw ConfigError(fmt::format(
                "sphere_membership_check: projection constants differ ({} has {}, {} has {})",
                norms[0].to_string(), out.c, spec.to_string(), c));
        }
    }
    for (const NormSpec& spec : norms) {
        out.norm_deviations.push_back(std::abs(norm_eval(spec, x) - 1.0));
    }
    out.l2_deviation = std::abs(frobenius_norm(x) - out.c) / out.c;
    return out;
}

std::vector<NormSpec> swan_norms() {
    return {NormSpec::row_l2_max(), NormSpec::spectral_max()};
}

std::vector<NormSpec> sinkhorn_norms() {
    return {NormSpec::row_l2_max(), NormSpec::col_l2_max()};
}

}  // namespace mnorm
