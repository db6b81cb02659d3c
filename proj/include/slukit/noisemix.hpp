// slukit/noisemix.hpp
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
// SNR-controlled environmental-noise mixing. Each utterance gets
// copies_per_utterance noisy copies, one per SNR level, with noise files
// drawn from a pool (without replacement when the pool is big enough).
// SNR is realized on RMS energy: the noise is scaled by
//
//   g = rms(speech) / (rms(noise) * 10^(snr_db / 20))
//
// and added to the speech. If the sum would clip, the whole mixture is
// rescaled to peak 0.999, which leaves the speech/noise ratio intact
// (hard clipping would silently change the SNR).
//
// Every random choice is keyed to (plan.seed, utterance id) through a
// stable hash, so outputs are byte-identical no matter how many workers
// run or in what order utterances are processed.

#ifndef SLUKIT_NOISEMIX_HPP
#define SLUKIT_NOISEMIX_HPP

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "slukit/common.hpp"
#include "slukit/manifest.hpp"
#include "slukit/wav.hpp"

namespace slukit {

struct AugmentPlan {
  std::uint64_t seed = 0;
  std::vector<double> snr_levels_db{0.0, 10.0, 20.0, 30.0, 40.0};
  std::size_t copies_per_utterance = 5;
  std::vector<std::filesystem::path> noise_pool;
  // strict: refuse to sample with replacement when the pool is smaller
  // than copies_per_utterance.
  bool strict_sampling = false;
};

inline double rms(const AudioClip& clip) {
  if (clip.samples.empty()) raise("RMS undefined for an empty clip");
  double sum_sq = 0.0;
  for (double s : clip.samples) sum_sq += s * s;
  return std::sqrt(sum_sq / static_cast<double>(clip.samples.size()));
}

namespace detail {
// rng() % n instead of std::uniform_int_distribution: the standard
// distribution's output is implementation-defined, which would break
// byte-identical reproducibility across toolchains. The modulo bias is
// irrelevant for augmentation sampling.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}
}  // namespace detail

// Length-match noise to target_len samples: longer noise is cropped at a
// uniformly random offset, shorter noise is tiled end-to-end and cropped.
inline AudioClip fit_noise(const AudioClip& noise, std::size_t target_len,
                           std::mt19937_64& rng) {
  if (noise.samples.empty()) raise("cannot fit an empty noise clip");
  AudioClip out;
  out.sample_rate = noise.sample_rate;
  if (noise.samples.size() == target_len) {
    out.samples = noise.samples;
    return out;
  }
  out.samples.resize(target_len);
  if (noise.samples.size() > target_len) {
    const std::size_t max_offset = noise.samples.size() - target_len;
    const std::size_t offset = detail::uniform_index(rng, max_offset + 1);
    std::copy(noise.samples.begin() + static_cast<std::ptrdiff_t>(offset),
              noise.samples.begin() + static_cast<std::ptrdiff_t>(offset + target_len),
              out.samples.begin());
  } else {
    for (std::size_t i = 0; i < target_len; ++i) {
      out.samples[i] = noise.samples[i % noise.samples.size()];
    }
  }
  return out;
}

inline double snr_noise_gain(double speech_rms, double noise_rms, double snr_db) {
  return speech_rms / (noise_rms * std::pow(10.0, snr_db / 20.0));
}

inline AudioClip mix_at_snr(const AudioClip& speech, const AudioClip& noise,
                            double snr_db, std::mt19937_64& rng) {
  if (speech.sample_rate != noise.sample_rate) {
    raise("sample rate mismatch: speech ", speech.sample_rate, " Hz, noise ",
          noise.sample_rate, " Hz");
  }
  if (speech.samples.empty()) raise("cannot mix into an empty speech clip");
  const double speech_rms = rms(speech);
  if (speech_rms == 0.0) raise("zero-energy speech cannot anchor an SNR");

  const AudioClip fitted = fit_noise(noise, speech.samples.size(), rng);
  const double noise_rms = rms(fitted);
  if (noise_rms == 0.0) raise("zero-energy noise cannot realize an SNR");

  const double gain = snr_noise_gain(speech_rms, noise_rms, snr_db);
  AudioClip mix;
  mix.sample_rate = speech.sample_rate;
  mix.samples.resize(speech.samples.size());
  double peak = 0.0;
  for (std::size_t i = 0; i < mix.samples.size(); ++i) {
    mix.samples[i] = speech.samples[i] + gain * fitted.samples[i];
    peak = std::max(peak, std::abs(mix.samples[i]));
  }
  if (peak > 0.999) {
    const double rescale = 0.999 / peak;
    for (double& s : mix.samples) s *= rescale;
  }
  return mix;
}

namespace detail {

inline std::string format_snr_label(double snr_db) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", snr_db);
  return buf;
}

// Pool indices for one utterance: a partial Fisher-Yates draw without
// replacement, or with replacement (plus warning) when the pool is short.
inline std::vector<std::size_t> sample_noise_indices(
    std::size_t pool_size, std::size_t copies, bool strict, std::mt19937_64& rng,
    const std::string& utterance_id, std::vector<std::string>* warnings) {
  std::vector<std::size_t> picks;
  picks.reserve(copies);
  if (pool_size >= copies) {
    std::vector<std::size_t> order(pool_size);
    for (std::size_t i = 0; i < pool_size; ++i) order[i] = i;
    for (std::size_t i = 0; i < copies; ++i) {
      const std::size_t j = i + uniform_index(rng, pool_size - i);
      std::swap(order[i], order[j]);
      picks.push_back(order[i]);
    }
  } else {
    if (strict) {
      raise("noise pool has ", pool_size, " files but ", copies,
            " distinct draws are required (strict sampling)");
    }
    if (warnings != nullptr) {
      warnings->push_back(concat("utterance \"", utterance_id,
                                 "\": noise pool (", pool_size,
                                 " files) smaller than ", copies,
                                 " copies, sampling with replacement"));
    }
    for (std::size_t i = 0; i < copies; ++i) {
      picks.push_back(uniform_index(rng, pool_size));
    }
  }
  return picks;
}

}  // namespace detail

// One utterance's worth of augmentation. Returns the new records in SNR
// order; wav files land in out_dir as <id>__snr<level>.wav.
inline std::vector<UtteranceRecord> augment_utterance(
    const UtteranceRecord& record, const AudioClip& speech,
    const std::vector<AudioClip>& noise_clips, const AugmentPlan& plan,
    const std::filesystem::path& out_dir, std::vector<std::string>* warnings) {
  std::mt19937_64 rng(fnv1a64_mix(plan.seed, record.id));
  const std::vector<std::size_t> picks = detail::sample_noise_indices(
      noise_clips.size(), plan.copies_per_utterance, plan.strict_sampling, rng,
      record.id, warnings);

  std::vector<UtteranceRecord> out;
  out.reserve(plan.copies_per_utterance);
  for (std::size_t k = 0; k < plan.copies_per_utterance; ++k) {
    const AudioClip& noise = noise_clips[picks[k]];
    if (noise.sample_rate != speech.sample_rate) {
      raise("noise file ", plan.noise_pool[picks[k]].string(), " has rate ",
            noise.sample_rate, " Hz, speech \"", record.id, "\" has ",
            speech.sample_rate, " Hz");
    }
    const double snr = plan.snr_levels_db[k];
    const AudioClip mixed = mix_at_snr(speech, noise, snr, rng);
    const std::string stem =
        concat(record.id, "__snr", detail::format_snr_label(snr));
    write_wav(mixed, out_dir / (stem + ".wav"));

    UtteranceRecord aug = record;
    aug.id = stem;
    aug.audio_path = stem + ".wav";
    out.push_back(std::move(aug));
  }
  return out;
}

// Full-corpus augmentation. audio_root resolves each record's audio_path.
// Output record order is input order x SNR order regardless of jobs.
inline Manifest augment_corpus(const Manifest& m, const AugmentPlan& plan,
                               const std::filesystem::path& out_dir,
                               const std::filesystem::path& audio_root = {},
                               std::size_t jobs = 1,
                               std::vector<std::string>* warnings = nullptr) {
  if (plan.copies_per_utterance != plan.snr_levels_db.size()) {
    raise("plan has ", plan.copies_per_utterance, " copies per utterance but ",
          plan.snr_levels_db.size(), " SNR levels");
  }
  if (plan.noise_pool.empty()) raise("noise pool is empty");
  std::filesystem::create_directories(out_dir);

  std::vector<AudioClip> noise_clips;
  noise_clips.reserve(plan.noise_pool.size());
  for (const auto& p : plan.noise_pool) noise_clips.push_back(read_wav(p));

  const std::size_t n = m.records.size();
  std::vector<std::vector<UtteranceRecord>> results(n);
  std::vector<std::vector<std::string>> utt_warnings(n);

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::string first_error;
  std::mutex error_mutex;

  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= n || failed.load()) break;
      try {
        const UtteranceRecord& r = m.records[idx];
        if (!r.audio_path) {
          raise("utterance \"", r.id, "\" has no audio_path");
        }
        const AudioClip speech = read_wav(audio_root / *r.audio_path);
        results[idx] = augment_utterance(r, speech, noise_clips, plan, out_dir,
                                         &utt_warnings[idx]);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) first_error = e.what();
        break;
      }
    }
  };

  const std::size_t n_workers = std::max<std::size_t>(1, std::min(jobs, n == 0 ? 1 : n));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (std::size_t t = 0; t < n_workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (failed.load()) throw Error(first_error);

  Manifest out;
  out.records.reserve(n * plan.copies_per_utterance);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& r : results[i]) out.records.push_back(std::move(r));
    if (warnings != nullptr) {
      for (auto& w : utt_warnings[i]) warnings->push_back(std::move(w));
    }
  }
  return out;
}

struct PoolViolation {
  std::filesystem::path train_path;
  std::filesystem::path test_path;
  enum class Reason { kSamePath, kSameContent } reason = Reason::kSamePath;
};

namespace detail {
inline std::string read_file_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) raise("cannot open noise file: ", p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace detail

// Train/test noise pools must not share files: neither by canonical path
// nor by byte content (the same clip copied under two names still
// leaks test noise into training).
inline std::vector<PoolViolation> check_disjoint_pools(
    const std::vector<std::filesystem::path>& train_pool,
    const std::vector<std::filesystem::path>& test_pool) {
  std::vector<PoolViolation> violations;

  std::unordered_map<std::string, std::filesystem::path> train_canonical;
  for (const auto& p : train_pool) {
    train_canonical.emplace(std::filesystem::weakly_canonical(p).string(), p);
  }
  std::unordered_map<std::uint64_t, std::vector<std::pair<std::filesystem::path, std::string>>>
      train_by_hash;
  for (const auto& p : train_pool) {
    std::string bytes = detail::read_file_bytes(p);
    train_by_hash[fnv1a64(bytes)].emplace_back(p, std::move(bytes));
  }

  for (const auto& p : test_pool) {
    const auto canon = std::filesystem::weakly_canonical(p).string();
    auto path_hit = train_canonical.find(canon);
    if (path_hit != train_canonical.end()) {
      violations.push_back({path_hit->second, p, PoolViolation::Reason::kSamePath});
      continue;
    }
    const std::string bytes = detail::read_file_bytes(p);
    auto bucket = train_by_hash.find(fnv1a64(bytes));
    if (bucket != train_by_hash.end()) {
      // Hash is only a filter; confirm on the actual bytes.
      for (const auto& [train_path, train_bytes] : bucket->second) {
        if (train_bytes == bytes) {
          violations.push_back({train_path, p, PoolViolation::Reason::kSameContent});
          break;
        }
      }
    }
  }
  return violations;
}

}  // namespace slukit

#endif  // SLUKIT_NOISEMIX_HPP
