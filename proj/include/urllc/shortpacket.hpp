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

namespace urllc {

// How the payload figure converts to information bits.
enum class PayloadUnit { bytes, bits };

struct ShortPacketParams {
  double payload = 32.0;          // in `unit`
  double duration_ms = 0.05;
  double bandwidth_hz = 20e6;
  double error_prob = 2e-8;
  PayloadUnit unit = PayloadUnit::bytes;

  void validate() const;
  double blocklength() const;  // tau * B, channel uses
};

// Payload in nats: bytes are converted to bits, then ln 2 turns bits into nats.
double payload_nats(const ShortPacketParams& params);

// theta = exp[payload_nats / (tau B) + Q^-1(eps) / sqrt(tau B)] - 1.
double sir_threshold(const ShortPacketParams& params);

}  // namespace urllc
