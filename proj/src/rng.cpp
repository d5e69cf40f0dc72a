// Copyright 2026 The HSI Testbed Authors
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

#include "hsi/rng.hpp"

namespace hsi {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RngStream::RngStream(std::uint64_t seed, std::string_view name)
    : key_(splitmix64(splitmix64(seed) ^ fnv1a64(name))) {}

std::uint64_t RngStream::at(std::uint64_t counter) const noexcept {
  // Two rounds decorrelate adjacent counters under the same key.
  return splitmix64(splitmix64(key_ ^ splitmix64(counter)) + counter);
}

std::uint64_t RngStream::below(std::uint64_t n) noexcept {
  // Reject the short tail so the modulo stays unbiased.
  const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

double RngStream::uniform_at(std::uint64_t a, std::uint64_t b, std::uint64_t c) const noexcept {
  const std::uint64_t k = splitmix64(splitmix64(splitmix64(key_ ^ a) ^ b) ^ c);
  return to_unit(splitmix64(k));
}

RngStream RngStream::fork(std::string_view name) const {
  return from_key(splitmix64(key_ ^ fnv1a64(name)));
}

}  // namespace hsi
