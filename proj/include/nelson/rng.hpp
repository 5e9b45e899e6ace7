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

// Counter-based random numbers (Philox4x32-10, Salmon et al. SC 2011).
//
// Every random draw in the library is a pure function of a 64-bit seed and a
// 4-word counter. Samplers key uniforms by (row, round, variable, stream), so
// results do not depend on evaluation order or thread scheduling.

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace nelson {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

inline PhiloxKey key_from_seed(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed),
          static_cast<std::uint32_t>(seed >> 32)};
}

/// Maps two 32-bit words to a double in [0, 1) with 53 bits of resolution.
inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

/// Stream tags occupy the last counter word.
enum class Stream : std::uint32_t {
  kSampler = 0,
  kGibbs = 1,
  kData = 2,
  kSeedDerivation = 3,
  kGenerator = 4,
};

/// Uniform on [0, 1) for the cell (a, b, c) of a stream.
inline double counter_uniform(std::uint64_t seed, std::uint32_t a,
                              std::uint32_t b, std::uint32_t c,
                              Stream stream) {
  const auto out = philox4x32({a, b, c, static_cast<std::uint32_t>(stream)},
                              key_from_seed(seed));
  return to_unit_double(out[0], out[1]);
}

/// Derives an independent 64-bit seed from a parent seed and two indices.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint32_t a,
                                 std::uint32_t b) {
  const auto out = philox4x32(
      {a, b, 0x5eedu, static_cast<std::uint32_t>(Stream::kSeedDerivation)},
      key_from_seed(seed));
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

/// Sequential view over a Philox stream; satisfies UniformRandomBitGenerator.
/// Used by instance generators, where draws are naturally sequential.
class PhiloxStream {
 public:
  using result_type = std::uint32_t;

  PhiloxStream(std::uint64_t seed, std::uint32_t tag)
      : key_(key_from_seed(seed)), tag_(tag) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (used_ == 4) {
      block_ = philox4x32(
          {static_cast<std::uint32_t>(block_index_),
           static_cast<std::uint32_t>(block_index_ >> 32), tag_,
           static_cast<std::uint32_t>(Stream::kGenerator)},
          key_);
      ++block_index_;
      used_ = 0;
    }
    return block_[used_++];
  }

  double uniform() {
    const auto hi = (*this)();
    const auto lo = (*this)();
    return to_unit_double(hi, lo);
  }

  /// Unbiased integer in [0, bound); bound > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  PhiloxKey key_;
  std::uint32_t tag_;
  std::uint64_t block_index_ = 0;
  PhiloxCounter block_{};
  int used_ = 4;
};

}  // namespace nelson
