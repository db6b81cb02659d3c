// Shared scoring fixtures used by the unit and acceptance suites. The
// "recipes" corpus exercises the interesting tally cases: perfect text
// with wrong labels, wrong filler text with intact labels, and label-true
// value substitutions. The "flight" pair adds a length-mismatched
// hypothesis with a split word.

#ifndef SLUKIT_TESTS_FIXTURES_HPP
#define SLUKIT_TESTS_FIXTURES_HPP

#include <string>
#include <utility>
#include <vector>

#include "slukit/alignment.hpp"
#include "slukit/manifest.hpp"

namespace fixtures {

using TaggedWords = std::vector<std::pair<std::string, std::string>>;

inline slukit::UtteranceRecord make_record(std::string id, const TaggedWords& tagged,
                                           std::string intent) {
  slukit::UtteranceRecord r;
  r.id = std::move(id);
  r.intent = std::move(intent);
  for (const auto& [word, slot] : tagged) {
    r.words.push_back(word);
    r.slots.push_back(slot);
  }
  return r;
}

// The recipes fixtures carry bare labels ("food"); the manifest format
// requires BIO tags. Encoding each entity word as its own B- span and
// scoring with strip-bio recovers the bare labels exactly.
inline slukit::UtteranceRecord bio_encoded(slukit::UtteranceRecord r) {
  for (auto& slot : r.slots) {
    if (slot != "O") slot = "B-" + slot;
  }
  return r;
}

// Reference: six food words in a filler sentence, intent "baking".
inline slukit::UtteranceRecord recipes_reference(const std::string& id = "recipes") {
  return make_record(id,
                     {{"the", "O"},
                      {"potato", "food"},
                      {"and", "O"},
                      {"cauliflower", "food"},
                      {"are", "O"},
                      {"both", "O"},
                      {"in", "O"},
                      {"season", "O"},
                      {"to", "O"},
                      {"make", "O"},
                      {"combo", "food"},
                      {"breads", "food"},
                      {"mounds", "food"},
                      {"or", "O"},
                      {"pads", "food"}},
                     "baking");
}

// Perfect word recognition, every food slot mislabeled, wrong intent:
// zero semantics captured.
inline slukit::UtteranceRecord recipes_hyp_labels_wrong(const std::string& id = "recipes") {
  return make_record(id,
                     {{"the", "O"},
                      {"potato", "sports"},
                      {"and", "O"},
                      {"cauliflower", "sports"},
                      {"are", "O"},
                      {"both", "O"},
                      {"in", "O"},
                      {"season", "O"},
                      {"to", "O"},
                      {"make", "O"},
                      {"combo", "sports"},
                      {"breads", "sports"},
                      {"mounds", "sports"},
                      {"or", "O"},
                      {"pads", "sports"}},
                     "sports");
}

// Every filler word misrecognized, every slot word and label intact:
// high WER, perfect semantics.
inline slukit::UtteranceRecord recipes_hyp_fillers_wrong(const std::string& id = "recipes") {
  return make_record(id,
                     {{"blaw", "O"},
                      {"potato", "food"},
                      {"blaw", "O"},
                      {"cauliflower", "food"},
                      {"blaw", "O"},
                      {"blaw", "O"},
                      {"blaw", "O"},
                      {"blaw", "O"},
                      {"blaw", "O"},
                      {"blaw", "O"},
                      {"combo", "food"},
                      {"breads", "food"},
                      {"mounds", "food"},
                      {"blaw", "O"},
                      {"pads", "food"}},
                     "baking");
}

// Slot types all correct, five of six slot values substituted.
inline slukit::UtteranceRecord recipes_hyp_values_wrong(const std::string& id = "recipes") {
  return make_record(id,
                     {{"the", "O"},
                      {"tomato", "food"},
                      {"and", "O"},
                      {"cabbage", "food"},
                      {"are", "O"},
                      {"both", "O"},
                      {"in", "O"},
                      {"season", "O"},
                      {"to", "O"},
                      {"make", "O"},
                      {"sour", "food"},
                      {"breads", "food"},
                      {"mud", "food"},
                      {"or", "O"},
                      {"pets", "food"}},
                     "baking");
}

// BIO-tagged flight query, 32 reference words.
inline slukit::UtteranceRecord flight_reference(const std::string& id = "flight") {
  return make_record(id,
                     {{"please", "O"},
                      {"find", "O"},
                      {"a", "O"},
                      {"flight", "O"},
                      {"round", "B-roundtrip"},
                      {"trip", "I-roundtrip"},
                      {"from", "O"},
                      {"los", "B-fromloc.city"},
                      {"angeles", "I-fromloc.city"},
                      {"to", "O"},
                      {"tacoma", "B-toloc.city"},
                      {"washington", "B-toloc.state"},
                      {"with", "O"},
                      {"a", "O"},
                      {"stopover", "O"},
                      {"in", "O"},
                      {"san", "B-stoploc.city"},
                      {"francisco", "I-stoploc.city"},
                      {"not", "B-cost.relative"},
                      {"exceeding", "I-cost.relative"},
                      {"the", "O"},
                      {"price", "O"},
                      {"of", "O"},
                      {"three", "B-fare"},
                      {"hundred", "I-fare"},
                      {"dollars", "I-fare"},
                      {"for", "O"},
                      {"june", "B-depart.month"},
                      {"tenth", "B-depart.day"},
                      {"nineteen", "B-depart.year"},
                      {"ninety", "I-depart.year"},
                      {"three", "I-depart.year"}},
                     "flight");
}

// 33-word hypothesis: "tacoma" split into "taco ma", "francisco" re-tagged
// into the wrong entity, a few value substitutions.
inline slukit::UtteranceRecord flight_hypothesis(const std::string& id = "flight") {
  return make_record(id,
                     {{"*", "O"},
                      {"find", "O"},
                      {"a", "O"},
                      {"flights", "O"},
                      {"round", "B-roundtrip"},
                      {"trip", "I-roundtrip"},
                      {"from", "O"},
                      {"los", "B-fromloc.city"},
                      {"angeles", "I-fromloc.city"},
                      {"to", "O"},
                      {"taco", "B-toloc.city"},
                      {"ma", "I-toloc.city"},
                      {"washington", "B-toloc.state"},
                      {"with", "O"},
                      {"a", "O"},
                      {"stopover", "O"},
                      {"in", "O"},
                      {"san", "B-stoploc.city"},
                      {"francisco", "I-toloc.city"},
                      {"not", "B-cost.relative"},
                      {"exciting", "I-cost.relative"},
                      {"the", "O"},
                      {"price", "O"},
                      {"of", "O"},
                      {"three", "B-fare"},
                      {"hundred", "I-fare"},
                      {"dollar", "I-fare"},
                      {"for", "O"},
                      {"june", "B-depart.month"},
                      {"tenth", "B-depart.day"},
                      {"nineteen", "B-depart.year"},
                      {"nineteen", "I-depart.year"},
                      {"three", "I-depart.year"}},
                     "flight");
}

// Hand-coded alignment for the flight pair in which the split word is a
// deletion plus two insertions and the re-tagged "francisco" a deletion
// plus an insertion (rather than the minimum-cost SUB/MATCH choices).
// Valid but non-minimal; slot tallies must not depend on the difference.
inline slukit::Alignment flight_split_style_alignment() {
  using slukit::AlignKind;
  using slukit::AlignmentOp;
  slukit::Alignment a;
  auto both = [&](AlignKind kind, std::size_t i, std::size_t j) {
    a.ops.push_back(AlignmentOp{kind, i, j});
  };
  auto del = [&](std::size_t i) {
    a.ops.push_back(AlignmentOp{AlignKind::kDel, i, std::nullopt});
  };
  auto ins = [&](std::size_t j) {
    a.ops.push_back(AlignmentOp{AlignKind::kIns, std::nullopt, j});
  };

  both(AlignKind::kSub, 0, 0);     // please -> *
  both(AlignKind::kMatch, 1, 1);   // find
  both(AlignKind::kMatch, 2, 2);   // a
  both(AlignKind::kSub, 3, 3);     // flight -> flights
  for (std::size_t k = 4; k <= 9; ++k) both(AlignKind::kMatch, k, k);
  del(10);                         // tacoma
  ins(10);                         // taco
  ins(11);                         // ma
  both(AlignKind::kMatch, 11, 12); // washington
  for (std::size_t k = 12; k <= 16; ++k) both(AlignKind::kMatch, k, k + 1);
  del(17);                         // francisco [I-stoploc.city]
  ins(18);                         // francisco [I-toloc.city]
  both(AlignKind::kMatch, 18, 19); // not
  both(AlignKind::kSub, 19, 20);   // exceeding -> exciting
  for (std::size_t k = 20; k <= 24; ++k) both(AlignKind::kMatch, k, k + 1);
  both(AlignKind::kSub, 25, 26);   // dollars -> dollar
  for (std::size_t k = 26; k <= 29; ++k) both(AlignKind::kMatch, k, k + 1);
  both(AlignKind::kSub, 30, 31);   // ninety -> nineteen
  both(AlignKind::kMatch, 31, 32); // three

  for (const auto& op : a.ops) {
    if (op.kind != AlignKind::kMatch) ++a.distance;
  }
  return a;
}

}  // namespace fixtures

#endif  // SLUKIT_TESTS_FIXTURES_HPP
