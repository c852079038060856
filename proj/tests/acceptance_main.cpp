// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Exits non-zero if any criterion fails.

#include <cstdio>

#include "mnorm/verify.hpp"

int main() {
    int failures = 0;
    const auto results = mnorm::run_acceptance();
    for (const mnorm::CheckResult& r : results) {
        std::printf("%s\n", mnorm::format_check(r).c_str());
        failures += r.passed ? 0 : 1;
    }
    std::printf("%zu/%zu acceptance criteria passed\n", results.size() - static_cast<std::size_t>(failures),
                results.size());
    return failures == 0 ? 0 : 1;
}
