// Copyright 2026 The cqs-circulant Authors

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
#include <limits>
#include <random>

namespace cqs {

/// SplitMix64 finalizer; used only to derive well-separated engine seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Seedable, splittable random source. A stream is identified by
/// (seed, stream id); distinct ids give statistically independent engines, so
/// work items that derive their own stream are reproducible regardless of
/// execution order.
class Rng {
  public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : seed_(seed), stream_(stream),
          engine_(splitmix64(splitmix64(seed) ^ splitmix64(~stream))) {}

    static constexpr result_type min() {
        return std::mt19937_64::min();
    }
    static constexpr result_type max() {
        return std::mt19937_64::max();
    }
    result_type operator()() { return engine_(); }

    /// Child stream; deterministic in (seed, stream, id).
    [[nodiscard]] Rng split(std::uint64_t id) const {
        return Rng(splitmix64(seed_ ^ splitmix64(stream_)), id);
    }

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Number of successes in trials Bernoulli(p) draws.
    std::int64_t binomial(std::int64_t trials, double p) {
        if (p <= 0.0) {
            return 0;
        }
        if (p >= 1.0) {
            return trials;
        }
        std::binomial_distribution<std::int64_t> dist(trials, p);
        return dist(engine_);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

} // namespace cqs
