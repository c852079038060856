// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// Subcommand dispatch. Every command writes its outputs and an echo of the
// resolved configuration (config.echo.ini) into config.out.
//
// Exit codes:
//   0  success
//   1  configuration or usage error
//   2  numeric error (singular, degenerate or out-of-domain input)
//   3  divergence during training
//   4  verification failure

#pragma once

#include <ostream>

#include "mnorm/config.hpp"

namespace mnorm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumeric = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitVerify = 4;

/// Runs config.command. Library errors are caught, reported on err and
/// mapped to their exit code.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace mnorm
