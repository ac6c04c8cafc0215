// SPDX-License-Identifier: Apache-2.0
//
// irscomp - IRS-aided joint-processing CoMP beamforming and phase design
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

#ifndef IRSCOMP_RNG_HPP
#define IRSCOMP_RNG_HPP

#include <complex>
#include <cstdint>
#include <limits>
#include <string_view>

namespace irscomp
{
    // Counter-based generator: output i is a bijective mix of (key, i). Streams are split by
    // hashing a tag into the key, so every experiment is reproducible from one 64-bit seed
    // regardless of the order in which streams are consumed or the number of workers.
    //
    // Normals use Box-Muller written out here so results do not depend on the standard
    // library's distribution implementations.
    class Rng
    {
    public:
        using result_type = std::uint64_t;

        explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

        Rng split(std::uint64_t tag) const
        {
            return Rng(key_, mix(tag + 0x9e3779b97f4a7c15ULL));
        }
        Rng split(std::string_view tag) const
        {
            return split(hash(tag));
        }

        static constexpr result_type min() { return 0; }
        static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

        result_type operator()()
        {
            return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_);
        }

        // Uniform in [0, 1) with 53 random bits.
        double uniform()
        {
            return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
        }
        double uniform(double lo, double hi)
        {
            return lo + (hi - lo) * uniform();
        }

        // Standard normal.
        double normal();

        // Circularly-symmetric complex Gaussian with unit variance, CN(0, 1).
        std::complex<double> complex_normal();

        std::uint64_t key() const { return key_; }

        static std::uint64_t hash(std::string_view s)
        {
            std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a
            for (unsigned char c : s)
            {
                h ^= c;
                h *= 0x100000001b3ULL;
            }
            return mix(h);
        }

    private:
        Rng(std::uint64_t parent_key, std::uint64_t tag) : key_(mix(parent_key ^ tag)) {}

        static std::uint64_t mix(std::uint64_t z)
        {
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        }

        std::uint64_t key_;
        std::uint64_t counter_ = 0;
        bool has_spare_ = false;
        double spare_ = 0.0;
    };
}

#endif
