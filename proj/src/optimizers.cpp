// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/optimizers.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "mnorm/error.hpp"
#include "mnorm/multinorm.hpp"
#include "mnorm/sinkhorn.hpp"

namespace mnorm {

namespace {

void require_same_shape(const DenseMatrix& params, const DenseMatrix& grad, const char* op) {
    if (params.rows() != grad.rows() || params.cols() != grad.cols()) {
        throw DimensionError(fmt::format("{}: params {} vs grad {}", op, params.shape(), grad.shape()));
    }
}

bool involves_whitening(std::span<const NormSpec> norms) {
    return std::any_of(norms.begin(), norms.end(),
                       [](const NormSpec& s) { return s.kind == NormKind::kSpectralMax; });
}

// params += -lr * direction; returns the applied update.
DenseMatrix descend(DenseMatrix& params, DenseMatrix direction, double lr) {
    direction *= -lr;
    params += direction;
    return direction;
}

}  // namespace

void validate_group(const ParamGroup& group) {
    if (!(group.group_scale > 0.0) || !std::isfinite(group.group_scale)) {
        throw ConfigError(fmt::format("group {}: group_scale must be positive", group.name));
    }
    if (group.rows == 0 || group.cols == 0) {
        throw ConfigError(fmt::format("group {}: empty shape", group.name));
    }
    if (group.role == GroupRole::kLinear2d && (group.rows < 2 || group.cols < 2)) {
        throw ConfigError(
            fmt::format("group {}: linear_2d needs both dimensions >= 2, got {}x{}", group.name, group.rows, group.cols));
    }
}

double effective_lr(const ParamGroup& group, double eta) {
    return group.role == GroupRole::kLinear2d ? group.group_scale * eta : eta;
}

AdamState AdamState::zeros(std::size_t rows, std::size_t cols) {
    return AdamState{DenseMatrix(rows, cols), DenseMatrix(rows, cols), 0};
}

DenseMatrix adam_step(AdamState& state, DenseMatrix& params, const DenseMatrix& grad, double lr,
                      const AdamHyper& hyper) {
    require_same_shape(params, grad, "adam_step");
    require_same_shape(state.m, grad, "adam_step");
    require_same_shape(state.s, grad, "adam_step");
    state.t += 1;
    const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.t));
    const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.t));
    auto m = state.m.values();
    auto s = state.s.values();
    auto g = grad.values();
    DenseMatrix update(grad.rows(), grad.cols());
    auto u = update.values();
    for (std::size_t i = 0; i < g.size(); ++i) {
        m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
        s[i] = hyper.beta2 * s[i] + (1.0 - hyper.beta2) * g[i] * g[i];
        const double mhat = m[i] / c1;
        const double denom = std::sqrt(s[i] / c2) + hyper.eps;
        u[i] = denom > 0.0 ? -lr * mhat / denom : 0.0;
    }
    params += update;
    return update;
}

DenseMatrix sgd_step(DenseMatrix& params, const DenseMatrix& grad, double lr) {
    require_same_shape(params, grad, "sgd_step");
    return descend(params, grad, lr);
}

DenseMatrix signgd_step(DenseMatrix& params, const DenseMatrix& grad, double lr) {
    require_same_shape(params, grad, "signgd_step");
    DenseMatrix sign(grad.rows(), grad.cols());
    auto out = sign.values();
    auto g = grad.values();
    for (std::size_t i = 0; i < g.size(); ++i) {
        out[i] = g[i] > 0.0 ? 1.0 : (g[i] < 0.0 ? -1.0 : 0.0);
    }
    return descend(params, std::move(sign), lr);
}

DenseMatrix steepest_descent_step(DenseMatrix& params, const DenseMatrix& grad, const NormSpec& spec,
                                  double sharpness, Mode mode) {
    require_same_shape(params, grad, "steepest_descent_step");
    if (!(sharpness > 0.0)) {
        throw ConfigError(fmt::format("steepest_descent_step: sharpness must be positive, got {}", sharpness));
    }
    if (max_abs(grad) == 0.0) {
        return DenseMatrix(grad.rows(), grad.cols());
    }
    const double length = dual_norm_eval(spec, grad) / sharpness;
    return descend(params, normalized_projection(spec, grad, mode), length);
}

DenseMatrix mngd_direction(const DenseMatrix& grad, std::span<const NormSpec> norms, int iterations, Mode mode) {
    MultiNormOptions options;
    options.mode = mode;
    options.diagnostics = false;
    if (involves_whitening(norms) && grad.rows() > grad.cols()) {
        return transpose(multi_normalize(transpose(grad), norms, iterations, options).x);
    }
    return multi_normalize(grad, norms, iterations, options).x;
}

DenseMatrix swan_direction(const DenseMatrix& grad, int iterations, Mode mode) {
    const std::vector<NormSpec> norms = swan_norms();
    return mngd_direction(grad, norms, iterations, mode);
}

DenseMatrix sinkgd_direction(const DenseMatrix& grad, int iterations, Mode mode) {
    return sr_sinkhorn(grad, iterations, mode);
}

DenseMatrix mngd_step(DenseMatrix& params, const DenseMatrix& grad, std::span<const NormSpec> norms, int iterations,
                      double lr, Mode mode) {
    require_same_shape(params, grad, "mngd_step");
    return descend(params, mngd_direction(grad, norms, iterations, mode), lr);
}

DenseMatrix swan_step(DenseMatrix& params, const DenseMatrix& grad, double lr, int iterations, Mode mode) {
    require_same_shape(params, grad, "swan_step");
    return descend(params, swan_direction(grad, iterations, mode), lr);
}

DenseMatrix sinkgd_step(DenseMatrix& params, const DenseMatrix& grad, double lr, int iterations, Mode mode) {
    require_same_shape(params, grad, "sinkgd_step");
    return descend(params, sinkgd_direction(grad, iterations, mode), lr);
}

std::string to_string(OptimizerKind kind) {
    switch (kind) {
        case OptimizerKind::kAdam:
            return "adam";
        case OptimizerKind::kSgd:
            return "sgd";
        case OptimizerKind::kSignGd:
            return "signgd";
        case OptimizerKind::kSteepestDescent:
            return "steepest";
        case OptimizerKind::kSwan:
            return "swan";
        case OptimizerKind::kMngd:
            return "mngd";
        case OptimizerKind::kSinkGd:
            return "sinkgd";
    }
    return "?";
}

std::string to_string(FallbackKind kind) {
    switch (kind) {
        case FallbackKind::kSignGd:
            return "signgd";
        case FallbackKind::kSgd:
            return "sgd";
        case FallbackKind::kAdam:
            return "adam";
    }
    return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view text) {
    for (auto k : {OptimizerKind::kAdam, OptimizerKind::kSgd, OptimizerKind::kSignGd, OptimizerKind::kSteepestDescent,
                   OptimizerKind::kSwan, OptimizerKind::kMngd, OptimizerKind::kSinkGd}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ConfigError(fmt::format("unknown optimizer kind '{}'", text));
}

FallbackKind parse_fallback_kind(std::string_view text) {
    for (auto k : {FallbackKind::kSignGd, FallbackKind::kSgd, FallbackKind::kAdam}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ConfigError(fmt::format("unknown fallback kind '{}'", text));
}

bool is_matrix_only(OptimizerKind kind) {
    return kind == OptimizerKind::kSwan || kind == OptimizerKind::kMngd || kind == OptimizerKind::kSinkGd;
}

Optimizer::Optimizer(OptimizerConfig config, std::vector<ParamGroup> groups)
    : config_(std::move(config)), groups_(std::move(groups)) {
    if (config_.iterations < 1) {
        throw ConfigError(fmt::format("optimizer: L must be >= 1, got {}", config_.iterations));
    }
    if (config_.kind == OptimizerKind::kMngd && config_.norms.empty()) {
        throw ConfigError("optimizer: mngd needs a non-empty norm list");
    }
    for (const ParamGroup& g : groups_) {
        validate_group(g);
        Rule rule = Rule::kSignGd;
        const bool matrix = g.role == GroupRole::kLinear2d;
        const bool matrix_norm_steepest =
            config_.kind == OptimizerKind::kSteepestDescent && config_.steepest_norm.is_matrix_kind();
        if ((is_matrix_only(config_.kind) || matrix_norm_steepest) && !matrix) {
            rule = config_.fallback == FallbackKind::kAdam  ? Rule::kAdam
                   : config_.fallback == FallbackKind::kSgd ? Rule::kSgd
                                                            : Rule::kSignGd;
        } else {
            switch (config_.kind) {
                case OptimizerKind::kAdam:
                    rule = Rule::kAdam;
                    break;
                case OptimizerKind::kSgd:
                    rule = Rule::kSgd;
                    break;
                case OptimizerKind::kSignGd:
                    rule = Rule::kSignGd;
                    break;
                case OptimizerKind::kSteepestDescent:
                    rule = Rule::kSteepest;
                    break;
                case OptimizerKind::kSwan:
                    rule = Rule::kSwan;
                    break;
                case OptimizerKind::kMngd:
                    rule = Rule::kMngd;
                    break;
                case OptimizerKind::kSinkGd:
                    rule = Rule::kSinkGd;
                    break;
            }
        }
        rules_.push_back(rule);
        adam_.push_back(rule == Rule::kAdam ? std::optional<AdamState>(AdamState::zeros(g.rows, g.cols))
                                            : std::nullopt);
    }
}

DenseMatrix Optimizer::apply(std::size_t g, DenseMatrix& params, const DenseMatrix& grad, double lr) {
    switch (rules_[g]) {
        case Rule::kAdam:
            return adam_step(*adam_[g], params, grad, lr, config_.adam);
        case Rule::kSgd:
            return sgd_step(params, grad, lr);
        case Rule::kSignGd:
            return signgd_step(params, grad, lr);
        case Rule::kSteepest:
            if (lr == 0.0) {
                return DenseMatrix(grad.rows(), grad.cols());
            }
            if (!config_.steepest_norm.is_matrix_kind()) {
                // Vector norms see the parameter flattened into one row.
                DenseMatrix flat(1, params.size(), std::vector<double>(params.values().begin(), params.values().end()));
                const DenseMatrix g(1, grad.size(), std::vector<double>(grad.values().begin(), grad.values().end()));
                DenseMatrix update = steepest_descent_step(flat, g, config_.steepest_norm, 1.0 / lr, config_.mode);
                DenseMatrix shaped(params.rows(), params.cols(),
                                   std::vector<double>(update.values().begin(), update.values().end()));
                params += shaped;
                return shaped;
            }
            return steepest_descent_step(params, grad, config_.steepest_norm, 1.0 / lr, config_.mode);
        case Rule::kSwan:
            return swan_step(params, grad, lr, config_.iterations, config_.mode);
        case Rule::kMngd:
            return mngd_step(params, grad, config_.norms, config_.iterations, lr, config_.mode);
        case Rule::kSinkGd:
            return sinkgd_step(params, grad, lr, config_.iterations, config_.mode);
    }
    throw ConfigError("optimizer: unhandled rule");
}

std::vector<double> Optimizer::step(std::vector<DenseMatrix>& params, const std::vector<DenseMatrix>& grads,
                                    double eta) {
    if (params.size() != groups_.size() || grads.size() != groups_.size()) {
        throw DimensionError(fmt::format("optimizer: {} groups but {} params / {} grads", groups_.size(),
                                         params.size(), grads.size()));
    }
    std::vector<double> norms;
    norms.reserve(groups_.size());
    for (std::size_t g = 0; g < groups_.size(); ++g) {
        if (params[g].rows() != groups_[g].rows || params[g].cols() != groups_[g].cols) {
            throw DimensionError(fmt::format("optimizer: group {} expects {}x{}, got {}", groups_[g].name,
                                             groups_[g].rows, groups_[g].cols, params[g].shape()));
        }
        // Whitening and Sinkhorn steps need a nonzero gradient; a zero gradient
        // yields a zero update under every rule.
        if (max_abs(grads[g]) == 0.0 && rules_[g] != Rule::kAdam) {
            norms.push_back(0.0);
            continue;
        }
        norms.push_back(frobenius_norm(apply(g, params[g], grads[g], effective_lr(groups_[g], eta))));
    }
    return norms;
}

std::size_t Optimizer::state_entries() const noexcept {
    std::size_t total = 0;
    for (const auto& st : adam_) {
        if (st) {
            total += st->m.size() + st->s.size();
        }
    }
    return total;
}

std::size_t Optimizer::state_memory_bytes(std::size_t width) const noexcept {
    return state_entries() * width;
}

std::size_t state_memory_bytes(const OptimizerConfig& config, std::span<const ParamGroup> groups, std::size_t width) {
    return Optimizer(config, std::vector<ParamGroup>(groups.begin(), groups.end())).state_memory_bytes(width);
}

}  // namespace mnorm
