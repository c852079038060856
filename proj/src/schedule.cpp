// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mnorm/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "mnorm/error.hpp"

namespace mnorm {

namespace {

void validate(const Schedule& sched) {
    if (!(sched.base_lr > 0.0) || !std::isfinite(sched.base_lr)) {
        throw ConfigError(fmt::format("schedule: base_lr must be positive, got {}", sched.base_lr));
    }
    if (sched.total_steps < 1) {
        throw ConfigError(fmt::format("schedule: total_steps must be >= 1, got {}", sched.total_steps));
    }
    if (!(sched.warmup_frac >= 0.0 && sched.warmup_frac < 1.0)) {
        throw ConfigError(fmt::format("schedule: warmup_frac must lie in [0, 1), got {}", sched.warmup_frac));
    }
}

}  // namespace

int warmup_steps(const Schedule& sched) {
    validate(sched);
    // The product is rounded before ceil so that 0.1 * 100 lands on 10, not 11.
    const double raw = sched.warmup_frac * static_cast<double>(sched.total_steps);
    return static_cast<int>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

double cosine_schedule(int t, const Schedule& sched) {
    const int w = warmup_steps(sched);
    const int total = sched.total_steps;
    if (t < 0 || t > total) {
        throw RangeError(fmt::format("cosine_schedule: t = {} outside [0, {}]", t, total));
    }
    if (t < w) {
        return sched.base_lr * static_cast<double>(t) / static_cast<double>(w);
    }
    if (total == w) {
        return sched.base_lr;
    }
    const double progress = static_cast<double>(t - w) / static_cast<double>(total - w);
    return 0.5 * sched.base_lr * (1.0 + std::cos(std::numbers::pi * progress));
}

}  // namespace mnorm
