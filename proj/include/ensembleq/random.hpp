// Copyright 2026 The ensembleq developers.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace ensembleq {

// Seeded random stream. The engine is std::mt19937_64 (bit-exact across
// platforms by the standard); doubles are generated directly from the raw
// 64-bit output instead of std::uniform_real_distribution, whose mapping is
// implementation-defined.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Draws an index with probability weights[i] / sum(weights). Zero-weight
    // entries are never selected. Consumes exactly one double per call.
    std::size_t sample_discrete(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("sample_discrete: negative weight");
            total += w;
        }
        if (!(total > 0.0)) throw std::invalid_argument("sample_discrete: all weights are zero");
        const double u = next_double() * total;
        double acc = 0.0;
        std::size_t last_positive = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            last_positive = i;
            if (u < acc) return i;
        }
        // Rounding pushed u past the final accumulated sum.
        return last_positive;
    }

  private:
    std::mt19937_64 engine_;
};

// Derives the seed of trial substream `index` from a master seed with the
// SplitMix64 finalizer. Serial and parallel runs assign the same stream to
// the same trial, which is what makes ensemble runs order-independent.
inline std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) {
    std::uint64_t z = master_seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace ensembleq
