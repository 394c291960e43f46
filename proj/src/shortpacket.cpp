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

#include "urllc/shortpacket.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <numbers>

#include "urllc/errors.hpp"
#include "urllc/numerics.hpp"

namespace urllc {

void ShortPacketParams::validate() const {
  if (!(payload > 0.0)) throw DomainError("payload must be positive");
  if (!(duration_ms > 0.0) || !(bandwidth_hz > 0.0)) {
    throw DomainError("duration and bandwidth must be positive");
  }
  if (!(error_prob > 0.0 && error_prob < 1.0)) throw DomainError("error probability must lie in (0, 1)");
}

double ShortPacketParams::blocklength() const { return duration_ms * 1e-3 * bandwidth_hz; }

double payload_nats(const ShortPacketParams& p) {
  const double bits = p.unit == PayloadUnit::bytes ? 8.0 * p.payload : p.payload;
  return bits * std::numbers::ln2;
}

double sir_threshold(const ShortPacketParams& p) {
  p.validate();
  const double n = p.blocklength();
  if (n < 100.0) spdlog::warn("blocklength {} is below 100 channel uses", n);
  return std::expm1(payload_nats(p) / n + inverse_q(p.error_prob) / std::sqrt(n));
}

}  // namespace urllc
