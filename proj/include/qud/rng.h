// Copyright 2026 The qudsim Authors
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

#ifndef QUD_RNG_H
#define QUD_RNG_H

#include <array>
#include <cstdint>

namespace qud {

/// Philox4x32-10 block function (Salmon et al., SC'11). Output matches the
/// Random123 reference implementation.
using PhiloxCounter = std::array<uint32_t, 4>;
using PhiloxKey = std::array<uint32_t, 2>;
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key);

/// One independent random stream.
///
/// Key = (seed low 32 bits, seed high 32 bits). Counter = (block low, block
/// high, stream low, stream high). Each block yields four 32-bit words, which
/// are consumed in order. A uniform double takes two words w0, w1 and returns
/// ((w1:w0 as uint64) >> 11 + 0.5) * 2^-53, which lies strictly inside (0, 1).
/// Normals come from Box-Muller on two consecutive uniforms u1, u2:
/// sqrt(-2 ln u1) cos(2 pi u2) first, then the matching sin value.
class RandomStream {
   public:
    RandomStream(uint64_t seed, uint64_t stream_id);

    uint32_t next_u32() {
        if (word_ == kWords) {
            refill();
        }
        return buffer_[word_++];
    }

    uint64_t next_u64() {
        uint64_t lo = next_u32();
        uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    /// Uniform in the open interval (0, 1).
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform() < p; }

    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        return box_muller();
    }

    uint64_t seed() const { return seed_; }
    uint64_t stream_id() const { return stream_id_; }

   private:
    static constexpr int kBlocks = 4;
    static constexpr int kWords = 4 * kBlocks;

    void refill();
    double box_muller();

    uint64_t seed_;
    uint64_t stream_id_;
    uint64_t block_index_ = 0;
    std::array<uint32_t, kWords> buffer_{};
    int word_ = kWords;
    double cached_normal_ = 0.0;
    bool has_cached_normal_ = false;
};

/// Stream identifier for attempt `attempt` of sweep point `point`.
/// Attempts are limited to 2^40 per point.
constexpr uint64_t stream_id(uint64_t point, uint64_t attempt) { return (point << 40) | (attempt & ((1ULL << 40) - 1)); }

}  // namespace qud

#endif
