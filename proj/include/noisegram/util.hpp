// Copyright 2026 The noisegram Authors
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

#ifndef NOISEGRAM_UTIL_HPP
#define NOISEGRAM_UTIL_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>

namespace noisegram {

// Bad configuration or misuse of an interface. CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using TokenId = std::int32_t;

// Packed (first, second) bigram key, ordered like the pair itself.
inline std::uint64_t pack_bigram(TokenId first, TokenId second) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(first)) << 32) |
         static_cast<std::uint32_t>(second);
}

inline TokenId bigram_first(std::uint64_t key) {
  return static_cast<TokenId>(key >> 32);
}

inline TokenId bigram_second(std::uint64_t key) {
  return static_cast<TokenId>(key & 0xffffffffULL);
}

// FNV-1a, used for input/content fingerprints in serialized artifacts.
inline std::uint64_t fnv1a64(std::span<const char> bytes,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
  for (char c : bytes) {
    state ^= static_cast<unsigned char>(c);
    state *= 0x100000001b3ULL;
  }
  return state;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
  return fnv1a64(std::span<const char>(s.data(), s.size()), state);
}

inline std::string to_hex(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<size_t>(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return out;
}

// Compensated (Neumaier) summation; keeps big reductions reproducible and
// accurate well past the 1e-12 tolerances used in the exact identities.
class KahanSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace noisegram

#endif  // NOISEGRAM_UTIL_HPP
