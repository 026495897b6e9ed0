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

#include "qud/rng.h"

#include <cmath>
#include <numbers>

namespace qud {

namespace {

constexpr uint32_t kWeylA = 0x9E3779B9;
constexpr uint32_t kWeylB = 0xBB67AE85;
constexpr uint32_t kMulA = 0xD2511F53;
constexpr uint32_t kMulB = 0xCD9E8D57;

inline void philox_round(PhiloxCounter &ctr, const PhiloxKey &key) {
    uint64_t p0 = static_cast<uint64_t>(kMulA) * ctr[0];
    uint64_t p1 = static_cast<uint64_t>(kMulB) * ctr[2];
    uint32_t hi0 = static_cast<uint32_t>(p0 >> 32);
    uint32_t lo0 = static_cast<uint32_t>(p0);
    uint32_t hi1 = static_cast<uint32_t>(p1 >> 32);
    uint32_t lo1 = static_cast<uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        philox_round(counter, key);
    }
    return counter;
}

RandomStream::RandomStream(uint64_t seed, uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

void RandomStream::refill() {
    // kBlocks consecutive counters in lockstep: the rounds are latency bound,
    // so interleaving independent blocks roughly quadruples throughput. The
    // words are still consumed in counter order.
    uint32_t c[kBlocks][4];
    for (int b = 0; b < kBlocks; ++b) {
        uint64_t index = block_index_ + static_cast<uint64_t>(b);
        c[b][0] = static_cast<uint32_t>(index);
        c[b][1] = static_cast<uint32_t>(index >> 32);
        c[b][2] = static_cast<uint32_t>(stream_id_);
        c[b][3] = static_cast<uint32_t>(stream_id_ >> 32);
    }
    uint32_t k0 = static_cast<uint32_t>(seed_);
    uint32_t k1 = static_cast<uint32_t>(seed_ >> 32);
#pragma GCC unroll 10
    for (int round = 0; round < 10; ++round) {
#pragma GCC unroll 4
        for (int b = 0; b < kBlocks; ++b) {
            uint64_t p0 = static_cast<uint64_t>(kMulA) * c[b][0];
            uint64_t p1 = static_cast<uint64_t>(kMulB) * c[b][2];
            uint32_t n0 = static_cast<uint32_t>(p1 >> 32) ^ c[b][1] ^ k0;
            uint32_t n2 = static_cast<uint32_t>(p0 >> 32) ^ c[b][3] ^ k1;
            c[b][1] = static_cast<uint32_t>(p1);
            c[b][3] = static_cast<uint32_t>(p0);
            c[b][0] = n0;
            c[b][2] = n2;
        }
        k0 += kWeylA;
        k1 += kWeylB;
    }
    for (int b = 0; b < kBlocks; ++b) {
        for (int w = 0; w < 4; ++w) {
            buffer_[4 * b + w] = c[b][w];
        }
    }
    block_index_ += kBlocks;
    word_ = 0;
}

double RandomStream::box_muller() {
    double u1 = uniform();
    double u2 = uniform();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 2.0 * std::numbers::pi * u2;
    cached_normal_ = radius * std::sin(angle);
    has_cached_normal_ = true;
    return radius * std::cos(angle);
}

}  // namespace qud
