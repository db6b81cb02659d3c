#include "slukit/noisemix.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "slukit/manifest.hpp"
#include "slukit/wav.hpp"

using namespace slukit;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("slukit-noise-" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

AudioClip sine(double amplitude, double freq_hz, double seconds, int rate = 16000) {
  AudioClip c;
  c.sample_rate = rate;
  const std::size_t n = static_cast<std::size_t>(seconds * rate);
  c.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    c.samples[i] = amplitude * std::sin(2.0 * kPi * freq_hz * i / rate);
  }
  return c;
}

AudioClip random_clip(std::mt19937_64& rng, std::size_t n, double amplitude,
                      int rate = 16000) {
  AudioClip c;
  c.sample_rate = rate;
  c.samples.resize(n);
  for (auto& s : c.samples) {
    s = amplitude * (2.0 * (rng() / static_cast<double>(UINT64_MAX)) - 1.0);
  }
  return c;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double measured_snr_db(const AudioClip& speech, const AudioClip& mix) {
  AudioClip noise_part;
  noise_part.sample_rate = mix.sample_rate;
  noise_part.samples.resize(mix.samples.size());
  for (std::size_t i = 0; i < mix.samples.size(); ++i) {
    noise_part.samples[i] = mix.samples[i] - speech.samples[i];
  }
  return 20.0 * std::log10(rms(speech) / rms(noise_part));
}

Manifest one_utterance_manifest(const std::string& id, const std::string& wav) {
  Manifest m;
  UtteranceRecord r;
  r.id = id;
  r.audio_path = wav;
  r.words = {"turn", "on", "lights"};
  r.slots = {"O", "O", "B-device"};
  r.intent = "activate";
  m.records.push_back(std::move(r));
  return m;
}

}  // namespace

TEST_CASE("wav round-trip of silence", "[noisemix][wav]") {
  TempDir tmp;
  AudioClip silence;
  silence.sample_rate = 16000;
  silence.samples.assign(16000, 0.0);
  write_wav(silence, tmp.path / "s.wav");
  const AudioClip back = read_wav(tmp.path / "s.wav");
  REQUIRE(back.sample_rate == 16000);
  REQUIRE(back.samples.size() == 16000);
  for (double s : back.samples) REQUIRE(s == 0.0);
}

TEST_CASE("wav round-trip error is bounded by one quantization step", "[noisemix][wav]") {
  TempDir tmp;
  AudioClip square;
  square.sample_rate = 8000;
  for (int i = 0; i < 400; ++i) {
    square.samples.push_back(i % 2 == 0 ? 0.9999 : -0.9999);
  }
  // Plus some awkward values.
  square.samples.push_back(0.123456789);
  square.samples.push_back(-1.0);
  write_wav(square, tmp.path / "sq.wav");
  const AudioClip back = read_wav(tmp.path / "sq.wav");
  REQUIRE(back.samples.size() == square.samples.size());
  for (std::size_t i = 0; i < back.samples.size(); ++i) {
    REQUIRE(std::abs(back.samples[i] - square.samples[i]) <= 1.0 / 32768.0);
  }
}

TEST_CASE("wav reader rejects what it cannot represent", "[noisemix][wav]") {
  TempDir tmp;

  SECTION("stereo") {
    // Hand-build a 2-channel header.
    std::ofstream out(tmp.path / "stereo.wav", std::ios::binary);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36 + 8);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(1);
    u16(2);  // channels
    u32(16000);
    u32(16000 * 4);
    u16(4);
    u16(16);
    out.write("data", 4);
    u32(8);
    u32(0);
    u32(0);
    out.close();
    REQUIRE_THROWS_WITH(read_wav(tmp.path / "stereo.wav"),
                        Catch::Matchers::ContainsSubstring("2 channels"));
  }

  SECTION("truncated header") {
    std::ofstream out(tmp.path / "trunc.wav", std::ios::binary);
    out.write("RIFF\x10\x00\x00\x00WAV", 11);
    out.close();
    REQUIRE_THROWS_WITH(read_wav(tmp.path / "trunc.wav"),
                        Catch::Matchers::ContainsSubstring("truncated"));
  }

  SECTION("not RIFF at all") {
    std::ofstream out(tmp.path / "nope.wav", std::ios::binary);
    out << "this is not audio, honestly";
    out.close();
    REQUIRE_THROWS_AS(read_wav(tmp.path / "nope.wav"), Error);
  }

  SECTION("non-PCM format code") {
    std::ofstream out(tmp.path / "float.wav", std::ios::binary);
    auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(3);  // IEEE float
    u16(1);
    u32(16000);
    u32(16000 * 2);
    u16(2);
    u16(16);
    out.write("data", 4);
    u32(0);
    out.close();
    REQUIRE_THROWS_WITH(read_wav(tmp.path / "float.wav"),
                        Catch::Matchers::ContainsSubstring("not integer PCM"));
  }
}

TEST_CASE("rms", "[noisemix]") {
  AudioClip flat;
  flat.samples.assign(1000, 0.5);
  REQUIRE(rms(flat) == Catch::Approx(0.5));

  // Many whole periods of a unit sine: rms -> 1/sqrt(2).
  REQUIRE(rms(sine(1.0, 100.0, 1.0)) ==
          Catch::Approx(1.0 / std::sqrt(2.0)).margin(1e-3));

  AudioClip silence;
  silence.samples.assign(100, 0.0);
  REQUIRE(rms(silence) == 0.0);

  REQUIRE_THROWS_AS(rms(AudioClip{}), Error);
}

TEST_CASE("fit_noise length handling", "[noisemix]") {
  std::mt19937_64 rng(99);
  AudioClip noise;
  noise.samples = {0.1, 0.2, 0.3};

  SECTION("equal length is unchanged") {
    REQUIRE(fit_noise(noise, 3, rng).samples == noise.samples);
  }

  SECTION("shorter noise tiles end-to-end") {
    const AudioClip fitted = fit_noise(noise, 7, rng);
    REQUIRE(fitted.samples ==
            std::vector<double>{0.1, 0.2, 0.3, 0.1, 0.2, 0.3, 0.1});
  }

  SECTION("longer noise crops deterministically under a fixed seed") {
    AudioClip longer;
    for (int i = 0; i < 10; ++i) longer.samples.push_back(i * 0.05);
    std::mt19937_64 rng_a(7);
    std::mt19937_64 rng_b(7);
    const AudioClip a = fit_noise(longer, 4, rng_a);
    const AudioClip b = fit_noise(longer, 4, rng_b);
    REQUIRE(a.samples == b.samples);
    REQUIRE(a.samples.size() == 4);
    // The crop is a contiguous window.
    const double start = a.samples[0];
    for (std::size_t i = 1; i < 4; ++i) {
      REQUIRE(a.samples[i] == Catch::Approx(start + i * 0.05));
    }
  }
}

TEST_CASE("mix_at_snr gain and realized SNR", "[noisemix]") {
  std::mt19937_64 rng(4);

  SECTION("equal rms at 0 dB means unit gain") {
    const AudioClip speech = sine(0.3, 200.0, 0.5);
    const AudioClip noise = sine(0.3, 3000.0, 0.5);
    std::mt19937_64 r(1);
    const AudioClip mix = mix_at_snr(speech, noise, 0.0, r);
    for (std::size_t i = 0; i < 32; ++i) {
      REQUIRE(mix.samples[i] ==
              Catch::Approx(speech.samples[i] + noise.samples[i]).margin(1e-9));
    }
  }

  SECTION("requested SNR is realized within 1e-6 dB") {
    for (double snr : {0.0, 10.0, 20.0, 30.0, 40.0, -5.0, 12.5}) {
      const AudioClip speech = random_clip(rng, 4000, 0.05);
      const AudioClip noise = random_clip(rng, 4000, 0.08);
      std::mt19937_64 r(2);
      const AudioClip mix = mix_at_snr(speech, noise, snr, r);
      REQUIRE(measured_snr_db(speech, mix) == Catch::Approx(snr).margin(1e-6));
    }
  }

  SECTION("40 dB leaves the noise component 100x quieter") {
    const AudioClip speech = random_clip(rng, 4000, 0.05);
    const AudioClip noise = random_clip(rng, 4000, 0.3);
    std::mt19937_64 r(3);
    const AudioClip mix = mix_at_snr(speech, noise, 40.0, r);
    AudioClip part;
    part.samples.resize(mix.samples.size());
    for (std::size_t i = 0; i < mix.samples.size(); ++i) {
      part.samples[i] = mix.samples[i] - speech.samples[i];
    }
    REQUIRE(rms(speech) / rms(part) == Catch::Approx(100.0).margin(1e-4));
  }

  SECTION("clipping rescales the whole mixture and keeps the ratio") {
    const AudioClip speech = sine(0.9, 200.0, 0.25);
    const AudioClip noise = sine(0.9, 3100.0, 0.25);
    std::mt19937_64 r(4);
    const AudioClip mix = mix_at_snr(speech, noise, 0.0, r);
    double peak = 0.0;
    for (double s : mix.samples) peak = std::max(peak, std::abs(s));
    REQUIRE(peak <= 0.999 + 1e-12);
    // Rescaling both components leaves the per-sample mixture shape: the
    // mixture must be proportional to speech + noise.
    double ratio = 0.0;
    bool first = true;
    for (std::size_t i = 0; i < mix.samples.size(); ++i) {
      const double unscaled = speech.samples[i] + noise.samples[i];
      if (std::abs(unscaled) < 1e-3) continue;
      const double r_i = mix.samples[i] / unscaled;
      if (first) {
        ratio = r_i;
        first = false;
      } else {
        REQUIRE(r_i == Catch::Approx(ratio).margin(1e-9));
      }
    }
    REQUIRE(ratio < 1.0);
  }

  SECTION("zero-energy inputs are rejected") {
    AudioClip silence;
    silence.samples.assign(100, 0.0);
    silence.sample_rate = 16000;
    const AudioClip speech = sine(0.3, 200.0, 0.01);
    std::mt19937_64 r(5);
    REQUIRE_THROWS_WITH(mix_at_snr(silence, speech, 10.0, r),
                        Catch::Matchers::ContainsSubstring("zero-energy speech"));
    REQUIRE_THROWS_WITH(mix_at_snr(speech, silence, 10.0, r),
                        Catch::Matchers::ContainsSubstring("zero-energy noise"));
  }

  SECTION("sample-rate mismatch is rejected") {
    const AudioClip speech = sine(0.3, 200.0, 0.01, 16000);
    const AudioClip noise = sine(0.3, 200.0, 0.01, 8000);
    std::mt19937_64 r(6);
    REQUIRE_THROWS_WITH(mix_at_snr(speech, noise, 10.0, r),
                        Catch::Matchers::ContainsSubstring("8000"));
  }
}

TEST_CASE("augment_corpus default plan makes five labeled copies", "[noisemix]") {
  TempDir tmp;
  write_wav(sine(0.2, 440.0, 0.2), tmp.path / "utt.wav");
  for (int k = 0; k < 3; ++k) {
    std::mt19937_64 rng(1000 + k);
    write_wav(random_clip(rng, 1600, 0.1), tmp.path / ("noise" + std::to_string(k) + ".wav"));
  }

  AugmentPlan plan;
  plan.seed = 7;
  plan.noise_pool = {tmp.path / "noise0.wav", tmp.path / "noise1.wav",
                     tmp.path / "noise2.wav"};

  const Manifest m = one_utterance_manifest("utt", "utt.wav");
  const fs::path out_dir = tmp.path / "out";
  std::vector<std::string> warnings;
  const Manifest aug = augment_corpus(m, plan, out_dir, tmp.path, 1, &warnings);

  REQUIRE(aug.records.size() == 5);
  const std::vector<std::string> expected_ids{
      "utt__snr0", "utt__snr10", "utt__snr20", "utt__snr30", "utt__snr40"};
  for (std::size_t k = 0; k < 5; ++k) {
    REQUIRE(aug.records[k].id == expected_ids[k]);
    REQUIRE(aug.records[k].audio_path == expected_ids[k] + ".wav");
    REQUIRE(fs::exists(out_dir / *aug.records[k].audio_path));
    // Labels are copied verbatim.
    REQUIRE(aug.records[k].words == m.records[0].words);
    REQUIRE(aug.records[k].slots == m.records[0].slots);
    REQUIRE(aug.records[k].intent == m.records[0].intent);
  }
  // Pool of 3 with 5 copies: replacement sampling plus a warning.
  REQUIRE(warnings.size() == 1);
  REQUIRE(warnings[0].find("replacement") != std::string::npos);

  // Strict mode refuses instead.
  plan.strict_sampling = true;
  REQUIRE_THROWS_WITH(augment_corpus(m, plan, tmp.path / "strict", tmp.path),
                      Catch::Matchers::ContainsSubstring("strict"));
}

TEST_CASE("augment_corpus is deterministic and job-count independent", "[noisemix]") {
  TempDir tmp;
  std::mt19937_64 seed_rng(2024);
  Manifest m;
  for (int u = 0; u < 6; ++u) {
    const std::string id = "utt" + std::to_string(u);
    write_wav(random_clip(seed_rng, 3200, 0.2), tmp.path / (id + ".wav"));
    UtteranceRecord r;
    r.id = id;
    r.audio_path = id + ".wav";
    r.words = {"w"};
    r.slots = {"O"};
    r.intent = "i";
    m.records.push_back(std::move(r));
  }
  AugmentPlan plan;
  plan.seed = 99;
  for (int k = 0; k < 7; ++k) {
    const std::string id = "noise" + std::to_string(k);
    write_wav(random_clip(seed_rng, 2000, 0.1), tmp.path / (id + ".wav"));
    plan.noise_pool.push_back(tmp.path / (id + ".wav"));
  }

  const Manifest a = augment_corpus(m, plan, tmp.path / "a", tmp.path, 1);
  const Manifest b = augment_corpus(m, plan, tmp.path / "b", tmp.path, 4);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    REQUIRE(a.records[k].id == b.records[k].id);
    REQUIRE(file_bytes(tmp.path / "a" / *a.records[k].audio_path) ==
            file_bytes(tmp.path / "b" / *b.records[k].audio_path));
  }

  // No clipping in anything written.
  for (const auto& r : a.records) {
    const AudioClip c = read_wav(tmp.path / "a" / *r.audio_path);
    for (double s : c.samples) REQUIRE(std::abs(s) <= 0.999 + 1.0 / 32768.0);
  }
}

TEST_CASE("check_disjoint_pools", "[noisemix]") {
  TempDir tmp;
  write_wav(sine(0.1, 100.0, 0.05), tmp.path / "a.wav");
  write_wav(sine(0.1, 200.0, 0.05), tmp.path / "b.wav");
  write_wav(sine(0.1, 300.0, 0.05), tmp.path / "c.wav");
  // d.wav: different name, identical bytes to a.wav.
  fs::copy_file(tmp.path / "a.wav", tmp.path / "d.wav");

  SECTION("disjoint pools pass") {
    REQUIRE(check_disjoint_pools({tmp.path / "a.wav"}, {tmp.path / "b.wav"}).empty());
  }

  SECTION("shared path is a violation") {
    const auto v = check_disjoint_pools({tmp.path / "a.wav", tmp.path / "b.wav"},
                                        {tmp.path / "b.wav"});
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].reason == PoolViolation::Reason::kSamePath);
    REQUIRE(v[0].test_path == tmp.path / "b.wav");
  }

  SECTION("identical bytes under distinct paths is a violation") {
    const auto v = check_disjoint_pools({tmp.path / "a.wav"}, {tmp.path / "d.wav"});
    REQUIRE(v.size() == 1);
    REQUIRE(v[0].reason == PoolViolation::Reason::kSameContent);
    REQUIRE(v[0].train_path == tmp.path / "a.wav");
  }
}
