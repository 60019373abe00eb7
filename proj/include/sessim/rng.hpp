// Copyright 2026 sessim developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string_view>

namespace sessim {

/// 64-bit FNV-1a, used for stable keys (fingerprints, stream derivation).
[[nodiscard]] constexpr auto fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ULL) noexcept
    -> std::uint64_t
{
    for (char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

[[nodiscard]] constexpr auto splitmix64(std::uint64_t x) noexcept -> std::uint64_t
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based stream: draw n is splitmix64(key + n * golden). Draws depend
/// only on the key and the draw counter, so a stream is reproducible on any
/// platform and independent of every other stream.
class Rng {
  public:
    constexpr explicit Rng(std::uint64_t key) noexcept : key_(key) {}

    /// Child stream keyed by a label, e.g. a topic id.
    [[nodiscard]] constexpr auto derive(std::string_view label) const noexcept -> Rng
    {
        return Rng(splitmix64(fnv1a(label, key_)));
    }

    constexpr auto next_u64() noexcept -> std::uint64_t
    {
        return splitmix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    constexpr auto uniform() noexcept -> double
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// True with probability p; p <= 0 never, p >= 1 always.
    constexpr auto bernoulli(double p) noexcept -> bool { return uniform() < p; }

    /// Uniform integer in [0, n). Precondition: n > 0.
    constexpr auto below(std::uint64_t n) noexcept -> std::uint64_t
    {
        return static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    }

    [[nodiscard]] constexpr auto draws() const noexcept -> std::uint64_t { return counter_; }

  private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace sessim
