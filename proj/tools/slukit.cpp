// tools/slukit.cpp
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
// Single binary exposing the toolkit as subcommands:
//
//   score        WER / slots edit F1 / intent F1 of hyp vs ref manifests
//   align        word-level edit alignment dump
//   augment      SNR-controlled noise augmentation of a corpus
//   refine       knowledge-base correction of hypothesis slot values
//   build-masks  first-subword selection matrices from a vocabulary
//   stats        corpus statistics
//   validate     manifest validation / noise-pool disjointness
//
// Standard output carries only the machine-readable artifact of the
// subcommand; all diagnostics go to standard error. Exit codes: 0 ok,
// 1 invalid input, 2 internal error.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "slukit/alignment.hpp"
#include "slukit/kbrefine.hpp"
#include "slukit/manifest.hpp"
#include "slukit/metrics.hpp"
#include "slukit/fusion.hpp"
#include "slukit/noisemix.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

slukit::TagMode parse_tag_mode(const std::string& s) {
  if (s == "raw") return slukit::TagMode::kRaw;
  if (s == "strip-bio") return slukit::TagMode::kStripBio;
  slukit::raise("unknown --tag-mode \"", s, "\" (expected raw or strip-bio)");
}

slukit::IntentAverage parse_intent_average(const std::string& s) {
  if (s == "micro") return slukit::IntentAverage::kMicro;
  if (s == "macro") return slukit::IntentAverage::kMacro;
  slukit::raise("unknown --intent-average \"", s, "\" (expected micro or macro)");
}

std::vector<fs::path> load_path_list(const fs::path& list_file) {
  std::ifstream in(list_file);
  if (!in) slukit::raise("cannot open path list: ", list_file.string());
  std::vector<fs::path> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fs::path p(line);
    // Relative entries resolve against the list's own directory.
    out.push_back(p.is_absolute() ? p : list_file.parent_path() / p);
  }
  return out;
}

std::vector<fs::path> scan_wav_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    slukit::raise("--noise-dir ", dir.string(), " is not a directory");
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".wav") {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) slukit::raise("no .wav files in ", dir.string());
  return out;
}

double safe_ratio(std::uint64_t num, std::uint64_t denom) {
  return denom == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(denom);
}

// ---------------------------------------------------------------- score

struct ScoreArgs {
  std::string ref;
  std::string hyp;
  std::string tag_mode = "raw";
  std::string intent_average = "micro";
  std::string per_utterance_tsv;
  bool pretty = false;
};

int run_score(const ScoreArgs& args) {
  const slukit::Manifest ref = slukit::parse_manifest(args.ref);
  const slukit::Manifest hyp = slukit::parse_manifest(args.hyp);
  const slukit::EvalReport report =
      slukit::evaluate(ref, hyp, parse_tag_mode(args.tag_mode),
                       parse_intent_average(args.intent_average));

  if (report.vacuous_slots) {
    std::cerr << "warning: no slots anywhere, slots_edit_f1 is vacuously 1.0\n";
  }
  if (report.missing_hypotheses > 0) {
    std::cerr << "warning: " << report.missing_hypotheses
              << " reference utterance(s) missing from the hypothesis, scored as empty\n";
  }

  if (!args.per_utterance_tsv.empty()) {
    std::ofstream tsv(args.per_utterance_tsv, std::ios::trunc);
    if (!tsv) slukit::raise("cannot open ", args.per_utterance_tsv);
    tsv << "id\tref_len\thyp_len\tedits\twer\ttp\tfp\tfn\tslots_edit_f1\t"
           "intent_correct\thyp_missing\n";
    for (const auto& u : report.per_utterance) {
      tsv << u.id << '\t' << u.ref_len << '\t' << u.hyp_len << '\t' << u.edits
          << '\t';
      if (u.ref_len == 0) {
        tsv << '-';
      } else {
        tsv << static_cast<double>(u.edits) / static_cast<double>(u.ref_len);
      }
      const std::uint64_t denom = 2 * u.slots.tp + u.slots.fp + u.slots.fn;
      tsv << '\t' << u.slots.tp << '\t' << u.slots.fp << '\t' << u.slots.fn
          << '\t' << (denom == 0 ? 1.0 : safe_ratio(2 * u.slots.tp, denom))
          << '\t' << (u.intent_correct ? 1 : 0) << '\t' << (u.hyp_missing ? 1 : 0)
          << '\n';
    }
  }

  if (args.pretty) {
    char line[128];
    std::printf("%10s  %14s  %10s  %12s\n", "WER", "slots edit F1", "intent F1",
                "utterances");
    std::snprintf(line, sizeof(line), "%10.2f  %14.2f  %10.2f  %12zu",
                  report.wer * 100.0, report.slots_edit_f1 * 100.0,
                  report.intent_f1 * 100.0, report.utterance_count);
    std::printf("%s\n", line);
    return 0;
  }

  ordered_json j;
  j["wer"] = report.wer;
  j["slots_edit_f1"] = report.slots_edit_f1;
  j["intent_f1"] = report.intent_f1;
  j["utterance_count"] = report.utterance_count;
  j["vacuous_slots"] = report.vacuous_slots;
  j["missing_hypotheses"] = report.missing_hypotheses;
  ordered_json per_slot = ordered_json::object();
  for (const auto& [label, c] : report.per_slot.by_label()) {
    ordered_json slot;
    slot["tp"] = c.tp;
    slot["fp"] = c.fp;
    slot["fn"] = c.fn;
    slot["precision"] = safe_ratio(c.tp, c.tp + c.fp);
    slot["recall"] = safe_ratio(c.tp, c.tp + c.fn);
    slot["f1"] = safe_ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
    per_slot[label] = std::move(slot);
  }
  j["per_slot"] = std::move(per_slot);
  std::cout << j.dump(2) << '\n';
  return 0;
}

// ---------------------------------------------------------------- align

struct AlignArgs {
  std::string ref;
  std::string hyp;
  std::string only_id;
};

int run_align(const AlignArgs& args) {
  const slukit::Manifest ref = slukit::parse_manifest(args.ref);
  const slukit::Manifest hyp = slukit::parse_manifest(args.hyp);
  std::unordered_map<std::string, const slukit::UtteranceRecord*> hyp_by_id;
  for (const auto& r : hyp.records) hyp_by_id.emplace(r.id, &r);

  static const slukit::UtteranceRecord kEmpty{};
  bool found = false;
  for (const auto& r : ref.records) {
    if (!args.only_id.empty() && r.id != args.only_id) continue;
    found = true;
    auto it = hyp_by_id.find(r.id);
    const slukit::UtteranceRecord& h = it == hyp_by_id.end() ? kEmpty : *it->second;
    if (it == hyp_by_id.end()) {
      std::cerr << "warning: no hypothesis for \"" << r.id
                << "\", aligning against empty\n";
    }
    const slukit::Alignment a = slukit::align_words(r.words, h.words);
    std::cout << "# " << r.id << '\n'
              << slukit::format_alignment(a, r.words, h.words);
  }
  if (!args.only_id.empty() && !found) {
    slukit::raise("id \"", args.only_id, "\" not present in the reference");
  }
  return 0;
}

// -------------------------------------------------------------- augment

struct AugmentArgs {
  std::string manifest;
  std::string noise_dir;
  std::string noise_list;
  std::string out_dir;
  std::string audio_root;
  std::uint64_t seed = 0;
  std::vector<double> snrs{0.0, 10.0, 20.0, 30.0, 40.0};
  bool strict_sampling = false;
  std::size_t jobs = 1;
};

int run_augment(const AugmentArgs& args) {
  const slukit::Manifest m = slukit::parse_manifest(args.manifest);

  slukit::AugmentPlan plan;
  plan.seed = args.seed;
  plan.snr_levels_db = args.snrs;
  plan.copies_per_utterance = args.snrs.size();
  plan.strict_sampling = args.strict_sampling;
  if (!args.noise_dir.empty()) {
    plan.noise_pool = scan_wav_dir(args.noise_dir);
  } else if (!args.noise_list.empty()) {
    plan.noise_pool = load_path_list(args.noise_list);
  } else {
    slukit::raise("one of --noise-dir or --noise-list is required");
  }

  const fs::path audio_root = args.audio_root.empty()
                                  ? fs::path(args.manifest).parent_path()
                                  : fs::path(args.audio_root);

  std::vector<std::string> warnings;
  const slukit::Manifest augmented = slukit::augment_corpus(
      m, plan, args.out_dir, audio_root, std::max<std::size_t>(1, args.jobs),
      &warnings);
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

  slukit::write_manifest(augmented, fs::path(args.out_dir) / "manifest.jsonl");
  for (const auto& r : augmented.records) {
    std::cout << slukit::record_to_json(r).dump() << '\n';
  }
  std::cerr << "wrote " << augmented.records.size() << " augmented utterances to "
            << args.out_dir << '\n';
  return 0;
}

// --------------------------------------------------------------- refine

struct RefineArgs {
  std::string hyp;
  std::string kb_from;
  std::string embeddings;
  std::string report;
  std::string out;
  std::string tag_mode = "raw";
  std::size_t iterations = 1;
};

int run_refine(const RefineArgs& args) {
  const slukit::Manifest hyp = slukit::parse_manifest(args.hyp);
  const slukit::Manifest train = slukit::parse_manifest(args.kb_from);
  const slukit::KnowledgeBase kb =
      slukit::build_kb(train, parse_tag_mode(args.tag_mode));
  slukit::EmbeddingTable emb;
  if (!args.embeddings.empty()) emb = slukit::load_embeddings(args.embeddings);

  slukit::Manifest refined;
  slukit::RefinementReport all_rows;
  for (const auto& r : hyp.records) {
    auto [record, rows] = slukit::refine_iterated(r, kb, emb, args.iterations);
    refined.records.push_back(std::move(record));
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }

  if (!args.report.empty()) {
    std::ofstream tsv(args.report, std::ios::trunc);
    if (!tsv) slukit::raise("cannot open ", args.report);
    tsv << "id\tposition\toriginal\tslot\treplacement\tsimilarity\tmethod\n";
    for (const auto& row : all_rows) {
      tsv << row.utterance_id << '\t' << row.position << '\t' << row.original
          << '\t' << row.slot << '\t' << row.replacement << '\t'
          << row.similarity << '\t' << slukit::to_string(row.method) << '\n';
    }
  }

  if (!args.out.empty()) {
    slukit::write_manifest(refined, args.out);
  } else {
    for (const auto& r : refined.records) {
      std::cout << slukit::record_to_json(r).dump() << '\n';
    }
  }
  std::size_t replaced = 0;
  for (const auto& row : all_rows) {
    if (row.method != slukit::RefineMethod::kKept) ++replaced;
  }
  std::cerr << "refined " << hyp.records.size() << " utterances, " << replaced
            << " replacement(s)\n";
  return 0;
}

// ----------------------------------------------------------- build-masks

struct BuildMasksArgs {
  std::string manifest;
  std::string vocab;
  std::string out_dir;
  std::string marker = "##";
  std::size_t prefix_specials = 0;
  std::size_t suffix_specials = 0;
};

int run_build_masks(const BuildMasksArgs& args) {
  const slukit::Manifest m = slukit::parse_manifest(args.manifest);
  const slukit::SubwordVocab vocab = slukit::SubwordVocab::load(args.vocab, args.marker);
  fs::create_directories(args.out_dir);
  for (const auto& r : m.records) {
    const slukit::Tokenization tok = slukit::tokenize_words(
        r.words, vocab, args.prefix_specials, args.suffix_specials);
    const slukit::SelectionMatrix mask = slukit::build_selection_matrix(r.words, tok);
    slukit::write_selection(mask, fs::path(args.out_dir) / (r.id + ".mask"));
  }
  std::cerr << "wrote " << m.records.size() << " selection masks to "
            << args.out_dir << '\n';
  return 0;
}

// ---------------------------------------------------------------- stats

struct StatsArgs {
  std::string manifest;
  std::string audio_root;
  bool with_hours = false;
};

int run_stats(const StatsArgs& args) {
  const slukit::Manifest m = slukit::parse_manifest(args.manifest);
  std::optional<fs::path> root;
  if (args.with_hours || !args.audio_root.empty()) {
    root = args.audio_root.empty() ? fs::path(args.manifest).parent_path()
                                   : fs::path(args.audio_root);
  }
  const slukit::CorpusStats stats = slukit::corpus_stats(m, root);
  ordered_json j;
  j["utterance_count"] = stats.utterance_count;
  j["unique_transcriptions"] = stats.unique_transcriptions;
  j["speaker_count"] = stats.speaker_count;
  if (stats.total_hours) {
    j["total_hours"] = *stats.total_hours;
  } else {
    j["total_hours"] = nullptr;
  }
  std::cout << j.dump(2) << '\n';
  return 0;
}

// ------------------------------------------------------------- validate

struct ValidateArgs {
  std::string manifest;
  std::string train_noise;
  std::string test_noise;
};

int run_validate(const ValidateArgs& args) {
  if (!args.manifest.empty()) {
    const slukit::Manifest m = slukit::parse_manifest(args.manifest);
    std::size_t warning_count = 0;
    for (const auto& r : m.records) {
      for (const auto& w : slukit::lint_record(r)) {
        std::cerr << "warning: " << r.id << ": " << w.message << '\n';
        ++warning_count;
      }
    }
    ordered_json j;
    j["records"] = m.records.size();
    j["warnings"] = warning_count;
    std::cout << j.dump(2) << '\n';
    return 0;  // lint warnings never change the exit code
  }

  if (args.train_noise.empty() || args.test_noise.empty()) {
    slukit::raise("validate needs --manifest, or both --train-noise and --test-noise");
  }
  const auto violations = slukit::check_disjoint_pools(
      load_path_list(args.train_noise), load_path_list(args.test_noise));
  ordered_json j;
  j["disjoint"] = violations.empty();
  j["violations"] = violations.size();
  std::cout << j.dump(2) << '\n';
  if (!violations.empty()) {
    for (const auto& v : violations) {
      std::cerr << "pool overlap ("
                << (v.reason == slukit::PoolViolation::Reason::kSamePath
                        ? "same path"
                        : "same content")
                << "): " << v.train_path.string() << " / " << v.test_path.string()
                << '\n';
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SLU evaluation and data-prep toolkit"};
  app.require_subcommand(1);

  ScoreArgs score_args;
  CLI::App* score = app.add_subcommand(
      "score", "Score a hypothesis manifest against a reference");
  score->add_option("--ref", score_args.ref, "Reference manifest (JSONL)")->required();
  score->add_option("--hyp", score_args.hyp, "Hypothesis manifest (JSONL)")->required();
  score->add_option("--tag-mode", score_args.tag_mode, "raw | strip-bio");
  score->add_option("--intent-average", score_args.intent_average, "micro | macro");
  score->add_option("--per-utterance", score_args.per_utterance_tsv,
                    "Write a per-utterance TSV breakdown here");
  score->add_flag("--pretty", score_args.pretty,
                  "Print a table instead of the JSON report");

  AlignArgs align_args;
  CLI::App* align = app.add_subcommand("align", "Dump word-level edit alignments");
  align->add_option("--ref", align_args.ref, "Reference manifest")->required();
  align->add_option("--hyp", align_args.hyp, "Hypothesis manifest")->required();
  align->add_option("--id", align_args.only_id, "Align only this utterance id");

  AugmentArgs augment_args;
  CLI::App* augment =
      app.add_subcommand("augment", "Mix environmental noise at fixed SNR levels");
  augment->add_option("--manifest", augment_args.manifest, "Corpus manifest")->required();
  augment->add_option("--noise-dir", augment_args.noise_dir,
                      "Directory of noise .wav files");
  augment->add_option("--noise-list", augment_args.noise_list,
                      "File listing noise paths, one per line");
  augment->add_option("--out", augment_args.out_dir, "Output directory")->required();
  augment->add_option("--audio-root", augment_args.audio_root,
                      "Root for relative audio paths (default: manifest directory)");
  augment->add_option("--seed", augment_args.seed, "RNG seed");
  augment->add_option("--snrs", augment_args.snrs, "SNR levels in dB")
      ->delimiter(',');
  augment->add_flag("--strict-sampling", augment_args.strict_sampling,
                    "Refuse to reuse noise files within one utterance");
  augment->add_option("--jobs", augment_args.jobs, "Worker threads");

  RefineArgs refine_args;
  CLI::App* refine =
      app.add_subcommand("refine", "Correct slot values against a knowledge base");
  refine->add_option("--hyp", refine_args.hyp, "Hypothesis manifest")->required();
  refine->add_option("--kb-from", refine_args.kb_from,
                     "Training manifest the KB is harvested from")->required();
  refine->add_option("--embeddings", refine_args.embeddings,
                     "Word-embedding text file (token v1 ... vd)");
  refine->add_option("--report", refine_args.report, "Write a TSV replacement report");
  refine->add_option("--out", refine_args.out,
                     "Write the refined manifest here instead of stdout");
  refine->add_option("--tag-mode", refine_args.tag_mode, "raw | strip-bio");
  refine->add_option("--iterations", refine_args.iterations, "Refinement passes");

  BuildMasksArgs masks_args;
  CLI::App* masks = app.add_subcommand(
      "build-masks", "Write first-subword selection matrices per utterance");
  masks->add_option("--manifest", masks_args.manifest, "Corpus manifest")->required();
  masks->add_option("--vocab", masks_args.vocab,
                    "Subword vocabulary, one piece per line")->required();
  masks->add_option("--out", masks_args.out_dir, "Output directory")->required();
  masks->add_option("--marker", masks_args.marker, "Continuation marker");
  masks->add_option("--prefix-specials", masks_args.prefix_specials,
                    "Special token rows before the first word");
  masks->add_option("--suffix-specials", masks_args.suffix_specials,
                    "Special token rows after the last word");

  StatsArgs stats_args;
  CLI::App* stats = app.add_subcommand("stats", "Corpus statistics");
  stats->add_option("--manifest", stats_args.manifest, "Corpus manifest")->required();
  stats->add_option("--audio-root", stats_args.audio_root,
                    "Resolve audio paths against this root and sum durations");
  stats->add_flag("--hours", stats_args.with_hours,
                  "Sum durations from WAV headers");

  ValidateArgs validate_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "Validate a manifest or check noise-pool disjointness");
  validate->add_option("--manifest", validate_args.manifest, "Corpus manifest");
  validate->add_option("--train-noise", validate_args.train_noise,
                       "Training noise pool list");
  validate->add_option("--test-noise", validate_args.test_noise,
                       "Test noise pool list");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n' << app.help("", CLI::AppFormatMode::Normal);
    return 1;
  }

  try {
    if (score->parsed()) return run_score(score_args);
    if (align->parsed()) return run_align(align_args);
    if (augment->parsed()) return run_augment(augment_args);
    if (refine->parsed()) return run_refine(refine_args);
    if (masks->parsed()) return run_build_masks(masks_args);
    if (stats->parsed()) return run_stats(stats_args);
    if (validate->parsed()) return run_validate(validate_args);
    std::cerr << app.help();
    return 1;
  } catch (const slukit::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
}
