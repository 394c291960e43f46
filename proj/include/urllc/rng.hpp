// Copyright 2026 The urllc_lab Authors
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
#include <limits>

namespace urllc {

// Philox4x32-10 counter-based generator.
//
// A stream is addressed by (seed, stream, substream). The 128-bit counter is
// laid out as {block, substream, stream_lo, stream_hi} and the key is the
// seed, so any two addresses produce disjoint sequences without coordination.
class RngStream {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double exponential(double rate = 1.0);
  double normal();
  std::uint64_t poisson(double mean);
  // Uniform on {0, ..., n-1}.
  std::uint32_t uniform_index(std::uint32_t n);
  bool bernoulli(double p);

  // Independent stream sharing seed and stream index.
  RngStream substream(std::uint32_t id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  static Block philox(Block counter, Key key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint32_t substream_;
  std::uint32_t block_ = 0;
  Block buffer_{};
  int used_ = 4;
};

}  // namespace urllc
