// Copyright 2026 The DP-PSI Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <sodium.h>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <limits>
#include <span>

#include "dppsi/error.h"

namespace dppsi {

inline void EnsureSodium() {
  static const bool ok = [] { return sodium_init() >= 0; }();
  if (!ok) throw Error("libsodium initialization failed");
}

// Random stream threaded explicitly through every randomized operation.
//
// Secure mode draws from OS entropy. Seeded mode expands (seed, stream) into
// a ChaCha20 key, so output is reproducible across platforms; distinct
// stream ids give independent streams for the same seed.
//
// Satisfies std::uniform_random_bit_generator.
class Rng {
 public:
  using result_type = std::uint64_t;

  static Rng Secure() { return Rng(); }

  static Rng Seeded(std::uint64_t seed, std::uint64_t stream = 0) {
    return Rng(seed, stream);
  }

  bool deterministic() const { return deterministic_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() {
    if (pos_ + sizeof(result_type) > buffer_.size()) Refill();
    result_type v;
    std::memcpy(&v, buffer_.data() + pos_, sizeof(v));
    pos_ += sizeof(v);
    return v;
  }

  void Fill(std::span<std::uint8_t> out) {
    std::size_t done = 0;
    while (done < out.size()) {
      if (pos_ == buffer_.size()) Refill();
      std::size_t n = std::min(out.size() - done, buffer_.size() - pos_);
      std::memcpy(out.data() + done, buffer_.data() + pos_, n);
      pos_ += n;
      done += n;
    }
  }

  // Uniform in [0, 1) with 53 bits of resolution.
  double UniformDouble() {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  // p = 0 never fires, p = 1 always fires.
  bool Bernoulli(double p) { return UniformDouble() < p; }

  // Uniform in [0, bound). bound must be nonzero.
  std::uint64_t UniformBelow(std::uint64_t bound) {
    // Rejection on the top of the range keeps the result exactly uniform.
    const std::uint64_t limit = max() - max() % bound;
    std::uint64_t v;
    do {
      v = (*this)();
    } while (v >= limit);
    return v % bound;
  }

 private:
  static constexpr std::size_t kBufferBytes = 4096;

  Rng() : deterministic_(false) {
    EnsureSodium();
    Refill();
  }

  Rng(std::uint64_t seed, std::uint64_t stream) : deterministic_(true) {
    EnsureSodium();
    std::array<std::uint8_t, 32> material{};
    static constexpr char kLabel[] = "dppsi-rng-v1";
    std::memcpy(material.data(), kLabel, sizeof(kLabel) - 1);
    for (int i = 0; i < 8; ++i) {
      material[16 + i] = static_cast<std::uint8_t>(seed >> (8 * i));
      material[24 + i] = static_cast<std::uint8_t>(stream >> (8 * i));
    }
    crypto_hash_sha256(key_.data(), material.data(), material.size());
    Refill();
  }

  void Refill() {
    if (deterministic_) {
      std::array<std::uint8_t, crypto_stream_chacha20_ietf_NONCEBYTES> nonce{};
      for (int i = 0; i < 8; ++i) {
        nonce[i] = static_cast<std::uint8_t>(block_ >> (8 * i));
      }
      ++block_;
      crypto_stream_chacha20_ietf(buffer_.data(), buffer_.size(), nonce.data(),
                                  key_.data());
    } else {
      randombytes_buf(buffer_.data(), buffer_.size());
    }
    pos_ = 0;
  }

  bool deterministic_;
  std::array<std::uint8_t, crypto_stream_chacha20_ietf_KEYBYTES> key_{};
  std::uint64_t block_ = 0;
  std::array<std::uint8_t, kBufferBytes> buffer_{};
  std::size_t pos_ = 0;
};

}  // namespace dppsi
