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
#include <compare>
#include <concepts>
#include <cstdint>
#include <cstring>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "dppsi/error.h"
#include "dppsi/random.h"

namespace dppsi {

inline constexpr std::size_t kElementBytes = 32;

// Canonical 32-byte encoding of a group element. Construction from raw bytes
// performs no validation; groups validate on ingest (see Group::Decode).
class GroupElement {
 public:
  using Bytes = std::array<std::uint8_t, kElementBytes>;

  GroupElement() = default;
  explicit GroupElement(const Bytes& bytes) : bytes_(bytes) {}

  static GroupElement FromSpan(std::span<const std::uint8_t> in) {
    if (in.size() != kElementBytes) {
      throw InvalidElementError(0);
    }
    Bytes b;
    std::copy(in.begin(), in.end(), b.begin());
    return GroupElement(b);
  }

  const Bytes& bytes() const { return bytes_; }

  std::string ToHex() const {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * kElementBytes);
    for (std::uint8_t b : bytes_) {
      out.push_back(kDigits[b >> 4]);
      out.push_back(kDigits[b & 0xf]);
    }
    return out;
  }

  // Lexicographic over the encoding.
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;

 private:
  Bytes bytes_{};
};

struct GroupElementHash {
  std::size_t operator()(const GroupElement& e) const {
    // Encodings of random-looking elements; the first word is enough.
    std::uint64_t v;
    std::memcpy(&v, e.bytes().data(), sizeof(v));
    return static_cast<std::size_t>(v);
  }
};

// Exponent in [1, order). Little-endian 32-byte representation.
class Scalar {
 public:
  using Bytes = std::array<std::uint8_t, 32>;

  Scalar() = default;
  explicit Scalar(const Bytes& bytes) : bytes_(bytes) {}

  const Bytes& bytes() const { return bytes_; }

  bool IsZero() const {
    return std::all_of(bytes_.begin(), bytes_.end(),
                       [](std::uint8_t b) { return b == 0; });
  }

  friend bool operator==(const Scalar&, const Scalar&) = default;

 private:
  Bytes bytes_{};
};

// Items are hashed with a fixed domain-separation prefix so the map is
// specific to this protocol.
inline std::array<std::uint8_t, 64> WideDigest(
    std::span<const std::uint8_t> input) {
  EnsureSodium();
  static constexpr std::string_view kDomain = "dppsi-hash-to-group-v1";
  crypto_hash_sha512_state st;
  crypto_hash_sha512_init(&st);
  crypto_hash_sha512_update(
      &st, reinterpret_cast<const unsigned char*>(kDomain.data()),
      kDomain.size());
  crypto_hash_sha512_update(&st, input.data(), input.size());
  std::array<std::uint8_t, 64> digest;
  crypto_hash_sha512_final(&st, digest.data());
  return digest;
}

inline std::span<const std::uint8_t> AsBytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

// A prime-order group with a random-oracle hash into it.
template <class G>
concept PrimeOrderGroup =
    requires(std::span<const std::uint8_t> in, const GroupElement& e,
             const Scalar& k, Rng& rng, std::uint64_t small) {
      { G::HashToGroup(in) } -> std::same_as<GroupElement>;
      { G::GenSecret(rng) } -> std::same_as<Scalar>;
      { G::Exp(e, k) } -> std::same_as<GroupElement>;
      { G::IsValid(e) } -> std::same_as<bool>;
      { G::ScalarFromInt(small) } -> std::same_as<Scalar>;
      { G::Multiply(k, k) } -> std::same_as<Scalar>;
      { G::Invert(k) } -> std::same_as<Scalar>;
    };

// ristretto255: the prime-order quotient of curve25519's Edwards form.
// Order L = 2^252 + 27742317777372353535851937790883648493.
struct Ristretto255 {
  static constexpr std::string_view kName = "ristretto255";

  // SHA-512 wide digest then the two-Elligator ristretto map; never goes
  // through a known discrete log.
  static GroupElement HashToGroup(std::span<const std::uint8_t> input) {
    auto digest = WideDigest(input);
    GroupElement::Bytes out;
    crypto_core_ristretto255_from_hash(out.data(), digest.data());
    return GroupElement(out);
  }

  static GroupElement HashToGroup(std::string_view input) {
    return HashToGroup(AsBytes(input));
  }

  static Scalar GenSecret(Rng& rng) {
    EnsureSodium();
    Scalar::Bytes out;
    do {
      std::array<std::uint8_t, crypto_core_ristretto255_NONREDUCEDSCALARBYTES>
          wide;
      rng.Fill(wide);
      crypto_core_ristretto255_scalar_reduce(out.data(), wide.data());
    } while (Scalar(out).IsZero());
    return Scalar(out);
  }

  // The identity encodes as all-zero and is rejected along with any
  // non-canonical encoding.
  static bool IsValid(const GroupElement& e) {
    EnsureSodium();
    const auto& b = e.bytes();
    if (std::all_of(b.begin(), b.end(), [](std::uint8_t x) { return x == 0; }))
      return false;
    return crypto_core_ristretto255_is_valid_point(b.data()) == 1;
  }

  static std::optional<GroupElement> Decode(std::span<const std::uint8_t> in) {
    if (in.size() != kElementBytes) return std::nullopt;
    auto e = GroupElement::FromSpan(in);
    if (!IsValid(e)) return std::nullopt;
    return e;
  }

  static GroupElement Exp(const GroupElement& e, const Scalar& k) {
    EnsureSodium();
    // Fails on non-canonical input and on an identity input or result.
    GroupElement::Bytes out;
    if (crypto_scalarmult_ristretto255(out.data(), k.bytes().data(),
                                       e.bytes().data()) != 0) {
      throw InvalidElementError(0);
    }
    return GroupElement(out);
  }

  static Scalar ScalarFromInt(std::uint64_t v) {
    Scalar::Bytes b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return Scalar(b);
  }

  static Scalar Multiply(const Scalar& x, const Scalar& y) {
    EnsureSodium();
    Scalar::Bytes out;
    crypto_core_ristretto255_scalar_mul(out.data(), x.bytes().data(),
                                        y.bytes().data());
    return Scalar(out);
  }

  static Scalar Invert(const Scalar& k) {
    EnsureSodium();
    Scalar::Bytes out;
    if (crypto_core_ristretto255_scalar_invert(out.data(), k.bytes().data()) !=
        0) {
      throw DomainError("cannot invert zero scalar");
    }
    return Scalar(out);
  }
};

// Quadratic residues modulo the safe prime 2039 = 2 * 1019 + 1: a prime-order
// subgroup of order 1019, small enough to enumerate. Test use only.
struct TinyModPGroup {
  static constexpr std::string_view kName = "tiny-modp-2039";
  static constexpr std::uint64_t kModulus = 2039;
  static constexpr std::uint64_t kOrder = 1019;

  static std::uint64_t PowMod(std::uint64_t base, std::uint64_t exp,
                              std::uint64_t mod) {
    std::uint64_t result = 1 % mod;
    base %= mod;
    while (exp > 0) {
      if (exp & 1) result = result * base % mod;
      base = base * base % mod;
      exp >>= 1;
    }
    return result;
  }

  static std::uint64_t ToInt(const std::array<std::uint8_t, 32>& b) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  static GroupElement FromInt(std::uint64_t v) {
    GroupElement::Bytes b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return GroupElement(b);
  }

  static std::uint64_t Value(const GroupElement& e) { return ToInt(e.bytes()); }

  static GroupElement HashToGroup(std::span<const std::uint8_t> input) {
    auto digest = WideDigest(input);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t{digest[i]} << (8 * i);
    std::uint64_t x = v % (kModulus - 1) + 1;
    return FromInt(x * x % kModulus);
  }

  static GroupElement HashToGroup(std::string_view input) {
    return HashToGroup(AsBytes(input));
  }

  static Scalar GenSecret(Rng& rng) {
    return ScalarFromInt(rng.UniformBelow(kOrder - 1) + 1);
  }

  static bool IsValid(const GroupElement& e) {
    const auto& b = e.bytes();
    if (std::any_of(b.begin() + 8, b.end(), [](std::uint8_t x) { return x; }))
      return false;
    std::uint64_t v = Value(e);
    return v != 0 && v < kModulus && PowMod(v, kOrder, kModulus) == 1;
  }

  static std::optional<GroupElement> Decode(std::span<const std::uint8_t> in) {
    if (in.size() != kElementBytes) return std::nullopt;
    auto e = GroupElement::FromSpan(in);
    if (!IsValid(e)) return std::nullopt;
    return e;
  }

  static GroupElement Exp(const GroupElement& e, const Scalar& k) {
    if (!IsValid(e)) throw InvalidElementError(0);
    return FromInt(PowMod(Value(e), ToInt(k.bytes()) % kOrder, kModulus));
  }

  static Scalar ScalarFromInt(std::uint64_t v) {
    Scalar::Bytes b{};
    v %= kOrder;
    for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
    return Scalar(b);
  }

  static Scalar Multiply(const Scalar& x, const Scalar& y) {
    return ScalarFromInt((ToInt(x.bytes()) % kOrder) *
                         (ToInt(y.bytes()) % kOrder) % kOrder);
  }

  static Scalar Invert(const Scalar& k) {
    std::uint64_t v = ToInt(k.bytes()) % kOrder;
    if (v == 0) throw DomainError("cannot invert zero scalar");
    return ScalarFromInt(PowMod(v, kOrder - 2, kOrder));
  }
};

static_assert(PrimeOrderGroup<Ristretto255>);
static_assert(PrimeOrderGroup<TinyModPGroup>);

// Elementwise Exp, split across hardware threads when the batch is large.
// Output order matches input order regardless of the split. An invalid
// element raises InvalidElementError carrying the lowest offending index.
template <PrimeOrderGroup G>
std::vector<GroupElement> BatchExp(std::span<const GroupElement> elements,
                                   const Scalar& k,
                                   unsigned max_threads = 0) {
  std::vector<GroupElement> out(elements.size());
  const std::size_t n = elements.size();
  unsigned threads = max_threads ? max_threads
                                 : std::max(1u, std::thread::hardware_concurrency());
  constexpr std::size_t kMinPerThread = 1024;
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, n / kMinPerThread)));

  // Per chunk: first failing index, or n when the chunk was clean.
  auto run_chunk = [&](std::size_t begin, std::size_t end) -> std::size_t {
    for (std::size_t i = begin; i < end; ++i) {
      try {
        out[i] = G::Exp(elements[i], k);
      } catch (const InvalidElementError&) {
        return i;
      }
    }
    return n;
  };

  std::size_t first_bad = n;
  if (threads <= 1) {
    first_bad = run_chunk(0, n);
  } else {
    std::vector<std::size_t> bad(threads, n);
    std::vector<std::thread> pool;
    const std::size_t step = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      std::size_t begin = std::min(n, t * step);
      std::size_t end = std::min(n, begin + step);
      pool.emplace_back([&, t, begin, end] { bad[t] = run_chunk(begin, end); });
    }
    for (auto& th : pool) th.join();
    first_bad = *std::min_element(bad.begin(), bad.end());
  }
  if (first_bad != n) throw InvalidElementError(first_bad);
  return out;
}

}  // namespace dppsi
