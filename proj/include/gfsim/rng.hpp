// Copyright 2026 The gfsim Authors
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

#include <array>
#include <cstdint>

namespace gfsim {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

// Philox4x64 with 10 rounds (Salmon et al. 2011).
PhiloxCounter philox4x64_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

// One reproducible substream per (master_seed, path_index).  The key is the
// pair itself and the counter walks blocks from zero, so substreams never
// overlap and nothing depends on scheduling.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t master_seed, std::uint64_t path_index) noexcept
      : key_{master_seed, path_index} {}

  std::uint64_t master_seed() const noexcept { return key_[0]; }
  std::uint64_t path_index() const noexcept { return key_[1]; }

  std::uint64_t next_u64() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  // Uniform on the open interval (0, 1) with 53 bits.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) noexcept;

  bool operator==(const RngStream&) const = default;

 private:
  void refill() noexcept {
    buf_ = philox4x64_10({block_, 0, 0, 0}, key_);
    ++block_;
    pos_ = 0;
  }

  PhiloxKey key_{0, 0};
  std::uint64_t block_ = 0;
  PhiloxCounter buf_{};
  unsigned pos_ = 4;
};

}  // namespace gfsim
