// slukit/manifest.hpp
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
// Corpus data model and the line-delimited JSON manifest format:
//   {"id": str, "audio_path": str?, "speaker": str?,
//    "words": [str], "slots": [str], "intent": str}
// one utterance per line, UTF-8. Slot tags follow the BIO convention:
// "O", "B-<label>" or "I-<label>".

#ifndef SLUKIT_MANIFEST_HPP
#define SLUKIT_MANIFEST_HPP

#include <cctype>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>

#include "slukit/common.hpp"
#include "slukit/wav.hpp"

namespace slukit {

// One labeled utterance. words and slots are parallel sequences.
struct UtteranceRecord {
  std::string id;
  std::optional<std::string> audio_path;
  std::optional<std::string> speaker;
  std::vector<std::string> words;
  std::vector<std::string> slots;
  std::string intent;

  bool operator==(const UtteranceRecord&) const = default;
};

struct Manifest {
  std::vector<UtteranceRecord> records;

  bool operator==(const Manifest&) const = default;
};

struct CorpusStats {
  std::size_t utterance_count = 0;
  std::optional<double> total_hours;
  std::size_t unique_transcriptions = 0;
  std::size_t speaker_count = 0;
};

struct LintWarning {
  std::size_t index = 0;  // word/slot position within the record
  std::string message;

  bool operator==(const LintWarning&) const = default;
};

inline bool is_valid_slot_tag(std::string_view tag) {
  if (tag == "O") return true;
  if (tag.size() < 3) return false;
  if (tag[0] != 'B' && tag[0] != 'I') return false;
  if (tag[1] != '-') return false;
  for (char c : tag.substr(2)) {
    if (std::isspace(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Structural invariants of a single record; `where` prefixes error text
// (typically "file:line").
inline void validate_record(const UtteranceRecord& r, const std::string& where) {
  if (r.id.empty()) raise(where, ": empty id");
  if (r.words.size() != r.slots.size()) {
    raise(where, ": words/slots length mismatch (", r.words.size(),
          " words, ", r.slots.size(), " slots)");
  }
  for (std::size_t i = 0; i < r.slots.size(); ++i) {
    if (!is_valid_slot_tag(r.slots[i])) {
      raise(where, ": bad slot tag \"", r.slots[i], "\" at index ", i,
            " (expected O, B-<label> or I-<label>)");
    }
  }
}

namespace detail {

inline std::vector<std::string> parse_string_array(const nlohmann::json& j,
                                                   const char* key,
                                                   const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    raise(where, ": missing or non-array field \"", key, "\"");
  }
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_string()) raise(where, ": non-string entry in \"", key, "\"");
    out.push_back(v.get<std::string>());
  }
  return out;
}

inline std::string parse_string(const nlohmann::json& j, const char* key,
                                const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) {
    raise(where, ": missing or non-string field \"", key, "\"");
  }
  return it->get<std::string>();
}

inline std::optional<std::string> parse_optional_string(
    const nlohmann::json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) raise(where, ": field \"", key, "\" must be a string");
  return it->get<std::string>();
}

}  // namespace detail

inline UtteranceRecord record_from_json_line(const std::string& line,
                                             const std::string& where) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    raise(where, ": malformed JSON: ", e.what());
  }
  if (!j.is_object()) raise(where, ": line is not a JSON object");

  UtteranceRecord r;
  r.id = detail::parse_string(j, "id", where);
  r.audio_path = detail::parse_optional_string(j, "audio_path", where);
  r.speaker = detail::parse_optional_string(j, "speaker", where);
  r.words = detail::parse_string_array(j, "words", where);
  r.slots = detail::parse_string_array(j, "slots", where);
  r.intent = detail::parse_string(j, "intent", where);
  validate_record(r, where);
  return r;
}

inline nlohmann::ordered_json record_to_json(const UtteranceRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.id;
  if (r.audio_path) j["audio_path"] = *r.audio_path;
  if (r.speaker) j["speaker"] = *r.speaker;
  j["words"] = r.words;
  j["slots"] = r.slots;
  j["intent"] = r.intent;
  return j;
}

// File order is preserved; ids must be pairwise distinct. Blank lines are
// skipped. Errors name the offending line.
inline Manifest parse_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("cannot open manifest: ", path.string());

  Manifest m;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = concat(path.string(), ":", line_no);
    UtteranceRecord r = record_from_json_line(line, where);
    if (!seen_ids.insert(r.id).second) {
      raise(where, ": duplicate id \"", r.id, "\"");
    }
    m.records.push_back(std::move(r));
  }
  return m;
}

inline void write_manifest(const Manifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise("cannot open for writing: ", path.string());
  for (const auto& r : m.records) {
    out << record_to_json(r).dump() << '\n';
  }
  if (!out) raise("write failed: ", path.string());
}

// BIO lint: warnings only, never errors. Model hypotheses routinely break
// the tagging scheme and must stay scorable.
inline std::vector<LintWarning> lint_record(const UtteranceRecord& r) {
  std::vector<LintWarning> warnings;
  for (std::size_t i = 0; i < r.slots.size(); ++i) {
    const std::string& tag = r.slots[i];
    if (tag.size() > 2 && tag[0] == 'I') {
      const std::string_view label = std::string_view(tag).substr(2);
      bool continues = false;
      if (i > 0) {
        const std::string& prev = r.slots[i - 1];
        continues = prev.size() > 2 && (prev[0] == 'B' || prev[0] == 'I') &&
                    std::string_view(prev).substr(2) == label;
      }
      if (!continues) {
        warnings.push_back({i, concat("I-", label, " at index ", i,
                                      " does not continue a B-", label,
                                      " or I-", label, " tag")});
      }
    }
    if (i < r.words.size() && r.words[i].empty()) {
      warnings.push_back({i, concat("empty word at index ", i)});
    }
  }
  return warnings;
}

inline constexpr std::string_view kDefaultStripChars = ".,!?;:\"'";

// Lowercase (ASCII) plus leading/trailing punctuation strip. Words emptied
// by stripping are dropped. Idempotent. No number or date verbalization.
inline std::string normalize_word(std::string_view word,
                                  std::string_view strip_chars = kDefaultStripChars) {
  std::size_t begin = 0;
  std::size_t end = word.size();
  while (begin < end && strip_chars.find(word[begin]) != std::string_view::npos) ++begin;
  while (end > begin && strip_chars.find(word[end - 1]) != std::string_view::npos) --end;
  std::string out(word.substr(begin, end - begin));
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

inline std::vector<std::string> normalize_text(
    const std::vector<std::string>& words,
    std::string_view strip_chars = kDefaultStripChars) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    std::string n = normalize_word(w, strip_chars);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

// Durations come from WAV headers only and only when audio_root is given;
// records without audio_path are skipped in the duration sum.
inline CorpusStats corpus_stats(
    const Manifest& m,
    const std::optional<std::filesystem::path>& audio_root = std::nullopt) {
  CorpusStats stats;
  stats.utterance_count = m.records.size();

  std::set<std::string> transcriptions;
  std::set<std::string> speakers;
  double seconds = 0.0;
  bool any_audio = false;
  for (const auto& r : m.records) {
    std::string joined;
    for (std::size_t i = 0; i < r.words.size(); ++i) {
      if (i > 0) joined += ' ';
      joined += r.words[i];
    }
    transcriptions.insert(std::move(joined));
    if (r.speaker && !r.speaker->empty()) speakers.insert(*r.speaker);
    if (audio_root && r.audio_path) {
      seconds += read_wav_info(*audio_root / *r.audio_path).duration_seconds();
      any_audio = true;
    }
  }
  stats.unique_transcriptions = transcriptions.size();
  stats.speaker_count = speakers.size();
  if (any_audio) stats.total_hours = seconds / 3600.0;
  return stats;
}

}  // namespace slukit

#endif  // SLUKIT_MANIFEST_HPP
