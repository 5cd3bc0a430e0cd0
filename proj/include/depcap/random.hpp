// SPDX-License-Identifier: Apache-2.0
//
// depcap: Markov additive capacity models with copula-based dependence control
// Copyright (C) 2026 The depcap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef DEPCAP_RANDOM_HPP
#define DEPCAP_RANDOM_HPP

#include <cstdint>
#include <random>

namespace depcap {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Seed of the independent substream for one (seed, path) pair. Paths never
/// share state, so results do not depend on how paths are spread over threads.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t path) noexcept
{
    return splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632BE59BD9B4E019ull));
}

inline Rng path_rng(std::uint64_t seed, std::uint64_t path) { return Rng(substream_seed(seed, path)); }

/// Uniform on the open interval (0, 1) with 53 random bits.
template <class URBG>
double uniform_open(URBG &g)
{
    return (static_cast<double>(g() >> 11) + 0.5) * 0x1.0p-53;
}

} // namespace depcap

#endif
