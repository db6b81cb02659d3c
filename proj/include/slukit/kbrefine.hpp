// slukit/kbrefine.hpp
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
// Post-decoding correction of slot-value words. A per-slot knowledge base
// is harvested from training data; each predicted (word, slot) pair with a
// non-O slot is replaced by the KB member with the highest embedding dot
// product. Words already in the KB are kept (which makes refinement
// idempotent), and candidates without embedding coverage compete on a
// separate edit-distance fallback pass used only when no embedding-scored
// candidate exists. Slots, intent and sequence length never change.

#ifndef SLUKIT_KBREFINE_HPP
#define SLUKIT_KBREFINE_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slukit/common.hpp"
#include "slukit/manifest.hpp"
#include "slukit/metrics.hpp"

namespace slukit {

// slot label -> slot-value words seen in training, normalized with the
// same pass used at scoring time. Never keyed by "O".
struct KnowledgeBase {
  TagMode tag_mode = TagMode::kRaw;
  std::map<std::string, std::set<std::string>> entries;
};

inline KnowledgeBase build_kb(const Manifest& train, TagMode tag_mode = TagMode::kRaw) {
  KnowledgeBase kb;
  kb.tag_mode = tag_mode;
  for (const auto& r : train.records) {
    for (std::size_t i = 0; i < r.slots.size() && i < r.words.size(); ++i) {
      if (r.slots[i] == "O") continue;
      const std::string label = effective_tag(r.slots[i], tag_mode);
      if (label == "O") continue;
      std::string w = normalize_word(r.words[i]);
      if (w.empty()) continue;
      kb.entries[label].insert(std::move(w));
    }
  }
  return kb;
}

// token -> vector, one shared dimensionality. Text format, one line per
// token: `token v1 v2 ... vd` (the common word-vector convention).
struct EmbeddingTable {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;

  const std::vector<double>* find(const std::string& token) const {
    auto it = vectors.find(token);
    return it == vectors.end() ? nullptr : &it->second;
  }
};

inline EmbeddingTable load_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("cannot open embeddings: ", path.string());
  EmbeddingTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ss(line);
    std::string token;
    ss >> token;
    std::vector<double> vec;
    double v = 0.0;
    while (ss >> v) vec.push_back(v);
    if (!ss.eof()) {
      raise(path.string(), ":", line_no, ": unparsable number in embedding row");
    }
    if (table.dim == 0 && table.vectors.empty()) {
      table.dim = vec.size();
    } else if (vec.size() != table.dim) {
      raise(path.string(), ":", line_no, ": dimension ", vec.size(),
            " does not match earlier rows of dimension ", table.dim);
    }
    if (!table.vectors.emplace(token, std::move(vec)).second) {
      raise(path.string(), ":", line_no, ": duplicate token \"", token, "\"");
    }
  }
  return table;
}

enum class RefineMethod { kKept, kEmbedding, kEditDistanceFallback };

inline const char* to_string(RefineMethod m) {
  switch (m) {
    case RefineMethod::kKept: return "kept";
    case RefineMethod::kEmbedding: return "embedding";
    case RefineMethod::kEditDistanceFallback: return "edit_distance_fallback";
  }
  return "?";
}

// One decision per non-O position, kept or replaced.
struct Replacement {
  std::string utterance_id;
  std::size_t position = 0;
  std::string original;
  std::string slot;
  std::string replacement;
  double similarity = 0.0;
  RefineMethod method = RefineMethod::kKept;
};

using RefinementReport = std::vector<Replacement>;

namespace detail {

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

inline double edit_similarity(const std::string& a, const std::string& b) {
  const std::size_t longest = std::max(a.size(), b.size());
  if (longest == 0) return 1.0;
  return 1.0 - static_cast<double>(char_edit_distance(a, b)) /
                   static_cast<double>(longest);
}

}  // namespace detail

inline std::pair<UtteranceRecord, RefinementReport> refine(
    const UtteranceRecord& hyp, const KnowledgeBase& kb,
    const EmbeddingTable& emb) {
  UtteranceRecord out = hyp;
  RefinementReport report;

  for (std::size_t i = 0; i < out.words.size() && i < out.slots.size(); ++i) {
    const std::string& slot = out.slots[i];
    if (slot == "O") continue;

    Replacement row;
    row.utterance_id = hyp.id;
    row.position = i;
    row.original = out.words[i];
    row.slot = slot;
    row.replacement = out.words[i];
    row.method = RefineMethod::kKept;

    const std::string label = effective_tag(slot, kb.tag_mode);
    auto entry = kb.entries.find(label);
    if (entry == kb.entries.end() || entry->second.empty()) {
      report.push_back(std::move(row));
      continue;
    }
    const std::set<std::string>& candidates = entry->second;
    const std::string norm = normalize_word(out.words[i]);
    if (candidates.count(norm) > 0) {
      row.similarity = 1.0;
      report.push_back(std::move(row));
      continue;
    }

    // Embedding pass; std::set iterates ascending, so a strict > keeps
    // the lexicographically smallest candidate on ties.
    const std::vector<double>* wv = emb.find(norm);
    const std::string* best = nullptr;
    double best_score = 0.0;
    if (wv != nullptr) {
      for (const std::string& m : candidates) {
        const std::vector<double>* mv = emb.find(m);
        if (mv == nullptr) continue;
        const double score = detail::dot(*wv, *mv);
        if (best == nullptr || score > best_score) {
          best = &m;
          best_score = score;
        }
      }
    }
    row.method = RefineMethod::kEmbedding;
    if (best == nullptr) {
      // Fallback pass: no candidate had embedding coverage (or the word
      // itself is missing from the table).
      row.method = RefineMethod::kEditDistanceFallback;
      for (const std::string& m : candidates) {
        const double score = detail::edit_similarity(norm, m);
        if (best == nullptr || score > best_score) {
          best = &m;
          best_score = score;
        }
      }
    }
    out.words[i] = *best;
    row.replacement = *best;
    row.similarity = best_score;
    report.push_back(std::move(row));
  }
  return {std::move(out), std::move(report)};
}

// Iterated refinement; with a fixed KB the first pass already lands every
// word inside the KB, so extra passes are no-ops kept for experimentation.
inline std::pair<UtteranceRecord, RefinementReport> refine_iterated(
    const UtteranceRecord& hyp, const KnowledgeBase& kb,
    const EmbeddingTable& emb, std::size_t iterations) {
  if (iterations == 0) raise("iterations must be at least 1");
  auto [record, report] = refine(hyp, kb, emb);
  for (std::size_t k = 1; k < iterations; ++k) {
    auto next = refine(record, kb, emb);
    record = std::move(next.first);
    report = std::move(next.second);
  }
  return {std::move(record), std::move(report)};
}

}  // namespace slukit

#endif  // SLUKIT_KBREFINE_HPP
