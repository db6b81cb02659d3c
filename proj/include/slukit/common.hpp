// slukit/common.hpp
//
// Copyright 2026 The slukit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SLUKIT_COMMON_HPP
#define SLUKIT_COMMON_HPP

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slukit {

// Raised for anything caused by bad user input: malformed files, violated
// preconditions, unreadable paths. The CLI maps it to exit code 1; every
// other exception is an internal error (exit code 2).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {
inline void concat_into(std::ostringstream&) {}

template <typename T, typename... Rest>
void concat_into(std::ostringstream& oss, T&& head, Rest&&... rest) {
  oss << std::forward<T>(head);
  concat_into(oss, std::forward<Rest>(rest)...);
}
}  // namespace detail

template <typename... Parts>
std::string concat(Parts&&... parts) {
  std::ostringstream oss;
  detail::concat_into(oss, std::forward<Parts>(parts)...);
  return oss.str();
}

template <typename... Parts>
[[noreturn]] void raise(Parts&&... parts) {
  throw Error(concat(std::forward<Parts>(parts)...));
}

// FNV-1a, 64 bit. Used wherever a stable, platform-independent hash is
// needed (per-utterance RNG streams, noise-file content fingerprints).
// std::hash is not guaranteed stable across implementations.
inline std::uint64_t fnv1a64(std::string_view bytes,
                             std::uint64_t state = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001b3ULL;
  }
  return state;
}

inline std::uint64_t fnv1a64_mix(std::uint64_t seed, std::string_view bytes) {
  char seed_bytes[8];
  for (int i = 0; i < 8; ++i) {
    seed_bytes[i] = static_cast<char>((seed >> (8 * i)) & 0xff);
  }
  return fnv1a64(bytes, fnv1a64(std::string_view(seed_bytes, 8)));
}

// Unit-cost Levenshtein distance over raw characters. Two-row DP; used by
// the knowledge-base fallback scoring and nowhere on the hot word-level
// path (that one needs a backtrace, see alignment.hpp).
inline std::size_t char_edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t prev = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, row[j] + 1, row[j - 1] + 1});
      diag = prev;
    }
  }
  return row[b.size()];
}

}  // namespace slukit

#endif  // SLUKIT_COMMON_HPP
