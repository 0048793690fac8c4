// SPDX-License-Identifier: Apache-2.0
//
// oddm-isac: delay-Doppler ISAC simulation library
// Copyright (C) 2026 The oddm-isac authors
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

#ifndef ODDM_RANDOM_HPP
#define ODDM_RANDOM_HPP

#include "oddm/types.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace oddm
{
    /// Seeded random stream with platform-independent draws.
    ///
    /// The engine is std::mt19937_64, whose output sequence is fixed by the standard.
    /// Uniform and Gaussian variates are derived here rather than through the
    /// <random> distributions, whose algorithms are implementation-defined.
    class RandomStream
    {
    public:
        explicit RandomStream(std::uint64_t state) : engine_(state) {}

        std::uint64_t next_u64() { return engine_(); }

        /// Uniform on [0, 1) with 53 random bits.
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

        /// Uniform integer in [0, n).
        std::uint64_t below(std::uint64_t n);

        /// Standard normal via the Marsaglia polar method.
        double normal();

        /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
        cd complex_normal(double variance = 1.0);

    private:
        std::mt19937_64 engine_;
        double spare_ = 0.0;
        bool has_spare_ = false;
    };

    /// Independent, reproducible substream for (seed, label).
    RandomStream rng_stream(std::uint64_t seed, std::string_view label);

    /// 64-bit FNV-1a over a byte string.
    std::uint64_t fnv1a64(std::string_view bytes);
} // namespace oddm

#endif
