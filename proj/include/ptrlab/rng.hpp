// Copyright 2026 The ptrlab developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace ptrlab {

// Splittable deterministic RNG built on the splitmix64 finalizer.
//
// std::random_device is nondeterministic and the standard distributions are
// implementation-defined, so everything here uses raw 64-bit draws only;
// the same seed produces the same stream on every toolchain.
class SplitRng {
  public:
    explicit SplitRng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return finalize(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; spares are cached.
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));  // u1 < 1, so log1p(-u1) is finite
        const double t = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    // Independent child stream; does not advance the parent.
    SplitRng split(std::uint64_t stream) const {
        return SplitRng(finalize(state_ + 0xD1B54A32D192ED03ULL * (stream + 1)));
    }

    // Index drawn proportionally to the given non-negative weights.
    std::size_t sample(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) {
            if (w < 0.0) throw std::invalid_argument("SplitRng::sample: negative weight");
            total += w;
        }
        if (total <= 0.0) throw std::invalid_argument("SplitRng::sample: all weights zero");
        const double u = next_double() * total;
        double acc = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            acc += weights[i];
            if (u < acc) return i;
        }
        return weights.size() - 1;  // u landed in the rounding slack
    }

    std::uint64_t state() const { return state_; }

  private:
    static std::uint64_t finalize(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ptrlab
