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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dppsi {

// Root of every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A group element failed to decode. `index()` is the position inside the
// batch or message that carried it.
class InvalidElementError : public Error {
 public:
  explicit InvalidElementError(std::size_t index)
      : Error("invalid group element at index " + std::to_string(index)),
        index_(index) {}

  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

// Parameter outside the supported domain (probabilities, budgets, sizes).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Caller broke an operation contract, e.g. overlapping inputs to upsample.
class ContractError : public Error {
 public:
  using Error::Error;
};

// The receiver budget formula is only valid above the intersection floor.
class IntersectionTooSmallError : public Error {
 public:
  IntersectionTooSmallError(std::size_t size, std::size_t lower_bound)
      : Error("intersection too small for DP guarantee: |I| = " +
              std::to_string(size) + " but must exceed |I_L| = " +
              std::to_string(lower_bound)),
        size_(size),
        lower_bound_(lower_bound) {}

  std::size_t size() const { return size_; }
  std::size_t lower_bound() const { return lower_bound_; }

 private:
  std::size_t size_;
  std::size_t lower_bound_;
};

// Malformed frame on the wire.
class WireError : public Error {
 public:
  using Error::Error;
};

// Session aborted: bad phase, bad message, or the peer sent Abort.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Socket or channel failure.
class TransportError : public Error {
 public:
  using Error::Error;
};

}  // namespace dppsi
