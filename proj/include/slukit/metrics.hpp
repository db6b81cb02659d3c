// slukit/metrics.hpp
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
// End-to-end scoring of hypothesis manifests against references: WER,
// intent F1, and slots edit F1. Slots edit F1 tolerates hypotheses whose
// length differs from the reference: words are aligned by minimum edit
// distance first, then per-slot TP/FP/FN are tallied on the alignment ops
// and micro-aggregated into
//
//   F1 = sum_v 2*TP_v / sum_v (2*TP_v + FP_v + FN_v)
//
// over all slot labels v except "O". A substitution counts as FN for the
// reference slot and FP for the hypothesis slot even when the two labels
// agree, so substitution errors are double-penalized.

#ifndef SLUKIT_METRICS_HPP
#define SLUKIT_METRICS_HPP

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "slukit/alignment.hpp"
#include "slukit/common.hpp"
#include "slukit/manifest.hpp"

namespace slukit {

// raw scores "B-city" and "I-city" as distinct labels; strip_bio folds
// them into "city".
enum class TagMode { kRaw, kStripBio };

inline std::string effective_tag(const std::string& tag, TagMode mode) {
  if (mode == TagMode::kStripBio && tag.size() > 2 &&
      (tag[0] == 'B' || tag[0] == 'I') && tag[1] == '-') {
    return tag.substr(2);
  }
  return tag;
}

struct SlotCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  bool operator==(const SlotCounts&) const = default;
};

template <typename Stream>
Stream& operator<<(Stream& os, const SlotCounts& c) {
  os << "{tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << "}";
  return os;
}

// Per-label counters, label set excludes "O". Labels never appear with
// all-zero counts; iteration order is sorted for reproducible reports.
class SlotTally {
 public:
  void add_tp(const std::string& label, std::uint64_t n = 1) { by_label_[label].tp += n; }
  void add_fp(const std::string& label, std::uint64_t n = 1) { by_label_[label].fp += n; }
  void add_fn(const std::string& label, std::uint64_t n = 1) { by_label_[label].fn += n; }

  void merge(const SlotTally& other) {
    for (const auto& [label, counts] : other.by_label_) {
      SlotCounts& mine = by_label_[label];
      mine.tp += counts.tp;
      mine.fp += counts.fp;
      mine.fn += counts.fn;
    }
  }

  const std::map<std::string, SlotCounts>& by_label() const { return by_label_; }
  bool empty() const { return by_label_.empty(); }

  SlotCounts totals() const {
    SlotCounts t;
    for (const auto& [label, c] : by_label_) {
      t.tp += c.tp;
      t.fp += c.fp;
      t.fn += c.fn;
    }
    return t;
  }

  bool operator==(const SlotTally&) const = default;

 private:
  std::map<std::string, SlotCounts> by_label_;
};

// Tally one aligned ref/hyp pair. `alignment` must index into the two
// records. Positions where every involved slot is "O" contribute nothing.
inline SlotTally tally_slots(const UtteranceRecord& ref,
                             const UtteranceRecord& hyp,
                             const Alignment& alignment,
                             TagMode tag_mode = TagMode::kRaw) {
  SlotTally tally;
  auto ref_tag = [&](std::size_t i) -> std::string {
    if (i >= ref.slots.size()) {
      raise("alignment ref index ", i, " out of range for record \"", ref.id,
            "\" (", ref.slots.size(), " slots)");
    }
    return effective_tag(ref.slots[i], tag_mode);
  };
  auto hyp_tag = [&](std::size_t j) -> std::string {
    if (j >= hyp.slots.size()) {
      raise("alignment hyp index ", j, " out of range for record \"", hyp.id,
            "\" (", hyp.slots.size(), " slots)");
    }
    return effective_tag(hyp.slots[j], tag_mode);
  };

  for (const AlignmentOp& op : alignment.ops) {
    switch (op.kind) {
      case AlignKind::kMatch: {
        const std::string rs = ref_tag(*op.ref_index);
        const std::string hs = hyp_tag(*op.hyp_index);
        if (rs == hs) {
          if (rs != "O") tally.add_tp(rs);
        } else {
          if (rs != "O") tally.add_fn(rs);
          if (hs != "O") tally.add_fp(hs);
        }
        break;
      }
      case AlignKind::kSub: {
        // FN and FP even when the labels agree (double penalty).
        const std::string rs = ref_tag(*op.ref_index);
        const std::string hs = hyp_tag(*op.hyp_index);
        if (rs != "O") tally.add_fn(rs);
        if (hs != "O") tally.add_fp(hs);
        break;
      }
      case AlignKind::kDel: {
        const std::string rs = ref_tag(*op.ref_index);
        if (rs != "O") tally.add_fn(rs);
        break;
      }
      case AlignKind::kIns: {
        const std::string hs = hyp_tag(*op.hyp_index);
        if (hs != "O") tally.add_fp(hs);
        break;
      }
    }
  }
  return tally;
}

// Micro aggregation across labels. A corpus without any slots has an
// empty denominator; that scores 1.0 and sets *vacuous so pipelines can
// tell a perfect score from a pointless one.
inline double slots_edit_f1(const SlotTally& tally, bool* vacuous = nullptr) {
  const SlotCounts t = tally.totals();
  const std::uint64_t denom = 2 * t.tp + t.fp + t.fn;
  if (vacuous != nullptr) *vacuous = denom == 0;
  if (denom == 0) return 1.0;
  return static_cast<double>(2 * t.tp) / static_cast<double>(denom);
}

struct WerCounts {
  std::uint64_t substitutions = 0;
  std::uint64_t deletions = 0;
  std::uint64_t insertions = 0;
  std::uint64_t ref_words = 0;

  std::uint64_t edits() const { return substitutions + deletions + insertions; }

  double wer() const {
    if (ref_words == 0) raise("WER undefined: empty reference");
    return static_cast<double>(edits()) / static_cast<double>(ref_words);
  }
};

inline WerCounts wer_counts(const Alignment& alignment, std::size_t ref_len) {
  WerCounts c;
  c.ref_words = ref_len;
  for (const auto& op : alignment.ops) {
    switch (op.kind) {
      case AlignKind::kMatch: break;
      case AlignKind::kSub: ++c.substitutions; break;
      case AlignKind::kDel: ++c.deletions; break;
      case AlignKind::kIns: ++c.insertions; break;
    }
  }
  return c;
}

// (S + D + I) / len(ref). May exceed 1. Errors on an empty reference.
inline double wer(const std::vector<std::string>& ref_words,
                  const std::vector<std::string>& hyp_words) {
  if (ref_words.empty()) raise("WER undefined: empty reference");
  return wer_counts(align_words(ref_words, hyp_words), ref_words.size()).wer();
}

enum class IntentAverage { kMicro, kMacro };

// Micro-averaged F1 over intent labels. With exactly one intent per
// utterance, micro F1 equals plain accuracy. Macro averages per-label F1
// over every label seen in either sequence.
inline double intent_f1(const std::vector<std::string>& refs,
                        const std::vector<std::string>& hyps,
                        IntentAverage average = IntentAverage::kMicro) {
  if (refs.size() != hyps.size()) {
    raise("intent sequences differ in length (", refs.size(), " vs ",
          hyps.size(), ")");
  }
  if (refs.empty()) return 1.0;

  if (average == IntentAverage::kMicro) {
    std::size_t correct = 0;
    for (std::size_t i = 0; i < refs.size(); ++i) {
      if (refs[i] == hyps[i]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(refs.size());
  }

  std::map<std::string, SlotCounts> per_label;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (refs[i] == hyps[i]) {
      ++per_label[refs[i]].tp;
    } else {
      ++per_label[refs[i]].fn;
      ++per_label[hyps[i]].fp;
    }
  }
  double sum = 0.0;
  for (const auto& [label, c] : per_label) {
    sum += static_cast<double>(2 * c.tp) /
           static_cast<double>(2 * c.tp + c.fp + c.fn);
  }
  return sum / static_cast<double>(per_label.size());
}

struct UtteranceScore {
  std::string id;
  std::size_t ref_len = 0;
  std::size_t hyp_len = 0;
  std::uint64_t edits = 0;
  SlotCounts slots;
  bool intent_correct = false;
  bool hyp_missing = false;
};

struct EvalReport {
  double wer = 0.0;
  double slots_edit_f1 = 1.0;
  double intent_f1 = 1.0;
  SlotTally per_slot;
  std::size_t utterance_count = 0;
  bool vacuous_slots = false;
  std::size_t missing_hypotheses = 0;
  std::vector<UtteranceScore> per_utterance;
};

// Intent used for reference utterances the hypothesis manifest omits.
// Any omitted utterance therefore counts as an intent miss and its slots
// as all-FN.
inline constexpr const char* kMissingIntentSentinel = "__missing__";

// Corpus-level scoring. Tallies are summed corpus-wide before the single
// F1 division (micro, not an average of per-utterance F1s), and WER is
// total edits over total reference words. Hypothesis ids must be a subset
// of reference ids; missing hypotheses are scored as empty.
inline EvalReport evaluate(const Manifest& ref, const Manifest& hyp,
                           TagMode tag_mode = TagMode::kRaw,
                           IntentAverage intent_average = IntentAverage::kMicro) {
  std::unordered_map<std::string, const UtteranceRecord*> hyp_by_id;
  for (const auto& r : hyp.records) hyp_by_id.emplace(r.id, &r);
  std::unordered_map<std::string, bool> ref_ids;
  for (const auto& r : ref.records) ref_ids.emplace(r.id, true);
  for (const auto& r : hyp.records) {
    if (ref_ids.find(r.id) == ref_ids.end()) {
      raise("hypothesis id \"", r.id, "\" has no reference utterance");
    }
  }

  EvalReport report;
  report.utterance_count = ref.records.size();
  WerCounts total_wer;
  std::vector<std::string> ref_intents;
  std::vector<std::string> hyp_intents;
  ref_intents.reserve(ref.records.size());
  hyp_intents.reserve(ref.records.size());

  static const UtteranceRecord kEmptyHyp{};
  for (const auto& r : ref.records) {
    const UtteranceRecord* h = nullptr;
    auto it = hyp_by_id.find(r.id);
    UtteranceScore score;
    score.id = r.id;
    score.ref_len = r.words.size();
    if (it == hyp_by_id.end()) {
      h = &kEmptyHyp;
      score.hyp_missing = true;
      ++report.missing_hypotheses;
      hyp_intents.push_back(kMissingIntentSentinel);
    } else {
      h = it->second;
      hyp_intents.push_back(h->intent);
    }
    ref_intents.push_back(r.intent);
    score.hyp_len = h->words.size();

    const Alignment alignment = align_words(r.words, h->words);
    const SlotTally tally = tally_slots(r, *h, alignment, tag_mode);
    report.per_slot.merge(tally);
    score.slots = tally.totals();

    const WerCounts wc = wer_counts(alignment, r.words.size());
    total_wer.substitutions += wc.substitutions;
    total_wer.deletions += wc.deletions;
    total_wer.insertions += wc.insertions;
    total_wer.ref_words += wc.ref_words;
    score.edits = wc.edits();
    score.intent_correct = r.intent == hyp_intents.back();
    report.per_utterance.push_back(std::move(score));
  }

  report.wer = total_wer.ref_words == 0 ? 0.0 : total_wer.wer();
  report.slots_edit_f1 = slots_edit_f1(report.per_slot, &report.vacuous_slots);
  report.intent_f1 = intent_f1(ref_intents, hyp_intents, intent_average);
  return report;
}

}  // namespace slukit

#endif  // SLUKIT_METRICS_HPP
