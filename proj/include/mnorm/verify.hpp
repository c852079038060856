// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Named end-to-end checks shared by the `verify` subcommand and the
// acceptance test binary.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mnorm {

struct CheckResult {
    std::string id;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr std::uint64_t kVerifySeed = 20261015;

/// Newton-Schulz iterations used by the whitening-oracle check.
inline constexpr int kAcceptanceNewtonSchulzIters = 30;

/// Hilbert-metric error count used by the linear-convergence check.
inline constexpr int kRateIterations = 8;

/// The eleven acceptance criteria, in order.
std::vector<CheckResult> run_acceptance(std::uint64_t seed = kVerifySeed);

/// Further structural invariants (sign preservation, contraction,
/// statelessness, config round trip, ...).
std::vector<CheckResult> run_invariants(std::uint64_t seed = kVerifySeed);

/// "PASS  A1  sinkhorn-equivalence  (0.12 s)  detail".
std::string format_check(const CheckResult& result);

}  // namespace mnorm
