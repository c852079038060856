// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mnorm {

/// Linear warmup followed by cosine decay to zero at total_steps.
struct Schedule {
    double base_lr = 0.02;
    int total_steps = 1;
    double warmup_frac = 0.10;
};

/// ceil(warmup_frac * total_steps).
int warmup_steps(const Schedule& sched);

/// eta_t for 0 <= t <= T. Throws RangeError outside that window and
/// ConfigError for an invalid schedule.
double cosine_schedule(int t, const Schedule& sched);

}  // namespace mnorm
