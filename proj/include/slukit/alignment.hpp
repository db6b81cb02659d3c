// slukit/alignment.hpp
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
//
// Word-level minimum edit distance with backtrace. Unit costs for
// substitution, deletion and insertion; matches cost nothing. The
// backtrace is deterministic: on cost ties the diagonal step wins, then
// deletion, then insertion, so identical inputs always produce the same
// op sequence on every platform.

#ifndef SLUKIT_ALIGNMENT_HPP
#define SLUKIT_ALIGNMENT_HPP

#include <algorithm>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slukit/common.hpp"

namespace slukit {

enum class AlignKind { kMatch, kSub, kDel, kIns };

inline const char* to_string(AlignKind kind) {
  switch (kind) {
    case AlignKind::kMatch: return "MATCH";
    case AlignKind::kSub: return "SUB";
    case AlignKind::kDel: return "DEL";
    case AlignKind::kIns: return "INS";
  }
  return "?";
}

// MATCH/SUB carry both indices, DEL only ref_index, INS only hyp_index.
struct AlignmentOp {
  AlignKind kind = AlignKind::kMatch;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;

  bool operator==(const AlignmentOp&) const = default;
};

struct Alignment {
  std::vector<AlignmentOp> ops;
  std::size_t distance = 0;  // count of SUB + DEL + INS ops

  bool operator==(const Alignment&) const = default;
};

inline Alignment align_words(std::span<const std::string> ref,
                             std::span<const std::string> hyp) {
  const std::size_t n_ref = ref.size();
  const std::size_t n_hyp = hyp.size();
  const std::size_t width = n_hyp + 1;

  // dist[i * width + j] = edit distance between ref[0..i) and hyp[0..j).
  std::vector<std::uint32_t> dist((n_ref + 1) * width);
  for (std::size_t j = 0; j <= n_hyp; ++j) dist[j] = static_cast<std::uint32_t>(j);
  for (std::size_t i = 1; i <= n_ref; ++i) {
    dist[i * width] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 1; j <= n_hyp; ++j) {
      const std::uint32_t diag =
          dist[(i - 1) * width + (j - 1)] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::uint32_t del = dist[(i - 1) * width + j] + 1;
      const std::uint32_t ins = dist[i * width + (j - 1)] + 1;
      dist[i * width + j] = std::min({diag, del, ins});
    }
  }

  Alignment result;
  result.distance = dist[n_ref * width + n_hyp];
  result.ops.reserve(std::max(n_ref, n_hyp));

  std::size_t i = n_ref;
  std::size_t j = n_hyp;
  while (i > 0 || j > 0) {
    const std::uint32_t here = dist[i * width + j];
    if (i > 0 && j > 0) {
      const bool equal = ref[i - 1] == hyp[j - 1];
      if (here == dist[(i - 1) * width + (j - 1)] + (equal ? 0 : 1)) {
        result.ops.push_back({equal ? AlignKind::kMatch : AlignKind::kSub,
                              i - 1, j - 1});
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && here == dist[(i - 1) * width + j] + 1) {
      result.ops.push_back({AlignKind::kDel, i - 1, std::nullopt});
      --i;
      continue;
    }
    result.ops.push_back({AlignKind::kIns, std::nullopt, j - 1});
    --j;
  }
  std::reverse(result.ops.begin(), result.ops.end());
  return result;
}

inline Alignment align_words(const std::vector<std::string>& ref,
                             const std::vector<std::string>& hyp) {
  return align_words(std::span<const std::string>(ref),
                     std::span<const std::string>(hyp));
}

// Dump format, one op per line:
//   KIND<TAB>ref_idx|-<TAB>hyp_idx|-<TAB>ref_word|-<TAB>hyp_word|-
inline std::string format_alignment(const Alignment& alignment,
                                    std::span<const std::string> ref,
                                    std::span<const std::string> hyp) {
  std::string out;
  for (const auto& op : alignment.ops) {
    out += to_string(op.kind);
    out += '\t';
    out += op.ref_index ? std::to_string(*op.ref_index) : "-";
    out += '\t';
    out += op.hyp_index ? std::to_string(*op.hyp_index) : "-";
    out += '\t';
    out += op.ref_index ? ref[*op.ref_index] : "-";
    out += '\t';
    out += op.hyp_index ? hyp[*op.hyp_index] : "-";
    out += '\n';
  }
  return out;
}

}  // namespace slukit

#endif  // SLUKIT_ALIGNMENT_HPP
