// Copyright 2026 The mnorm Authors
// SPDX-License-Identifier: Apache-2.0
//
// xoshiro256** (Blackman & Vigna), state seeded through splitmix64. Streams
// are fully determined by the 64-bit seed on every platform.

#pragma once

#include <array>
#include <cstdint>

namespace mnorm {

class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64() noexcept;
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept;
    double uniform(double lo, double hi) noexcept;
    /// Standard normal via Box-Muller; the second variate is cached.
    double normal() noexcept;
    /// Uniform integer in [0, n); n must be positive.
    std::uint64_t below(std::uint64_t n) noexcept;

private:
    std::array<std::uint64_t, 4> s_{};
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace mnorm
