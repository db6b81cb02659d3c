// slukit/fusion.hpp
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
// Bridging two subword tokenizations of the same word sequence: a 0/1
// selection matrix picks the first-subword row of each word out of a
// subword-level hidden-state matrix, and fuse() concatenates the selected
// rows of two such matrices along the hidden dimension. Selection
// matrices are stored sparsely (one selected row index per word column);
// rows belonging to special prefix/suffix tokens stay all-zero so row
// indices line up with raw model output.

#ifndef SLUKIT_FUSION_HPP
#define SLUKIT_FUSION_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "slukit/common.hpp"

namespace slukit {

// Subword inventory with a WordPiece-style continuation marker: "rk" is
// stored as continuation when the file lists "##rk".
class SubwordVocab {
 public:
  explicit SubwordVocab(std::string continuation_marker = "##")
      : marker_(std::move(continuation_marker)) {}

  const std::string& marker() const { return marker_; }

  void add(const std::string& piece) {
    if (piece.empty()) return;
    if (piece.size() > marker_.size() && piece.compare(0, marker_.size(), marker_) == 0) {
      const std::string body = piece.substr(marker_.size());
      continuation_.insert(body);
      max_len_ = std::max(max_len_, body.size());
    } else {
      plain_.insert(piece);
      max_len_ = std::max(max_len_, piece.size());
    }
  }

  bool has_plain(const std::string& piece) const { return plain_.count(piece) > 0; }
  bool has_continuation(const std::string& body) const { return continuation_.count(body) > 0; }
  std::size_t max_piece_length() const { return max_len_; }

  static SubwordVocab load(const std::filesystem::path& path,
                           std::string continuation_marker = "##") {
    std::ifstream in(path);
    if (!in) raise("cannot open vocabulary: ", path.string());
    SubwordVocab vocab(std::move(continuation_marker));
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) vocab.add(line);
    }
    return vocab;
  }

 private:
  std::string marker_;
  std::unordered_set<std::string> plain_;
  std::unordered_set<std::string> continuation_;
  std::size_t max_len_ = 0;
};

namespace detail {
// Byte length of the UTF-8 sequence starting at `lead`.
inline std::size_t utf8_char_len(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;  // invalid byte, treat as one char
}
}  // namespace detail

// Greedy longest-match segmentation with single-character fallback.
// Continuation pieces are emitted with the vocabulary's marker prefixed.
// Not a BPE-merge reproduction; good enough to build selection masks for
// any vocabulary file that covers the corpus characters.
inline std::vector<std::string> tokenize_greedy(const std::string& word,
                                                const SubwordVocab& vocab) {
  if (word.empty()) raise("cannot tokenize an empty word");
  std::vector<std::string> pieces;
  std::size_t pos = 0;
  while (pos < word.size()) {
    const bool at_start = pos == 0;
    const std::size_t remaining = word.size() - pos;
    std::size_t taken = 0;
    for (std::size_t len = std::min(vocab.max_piece_length(), remaining); len >= 1; --len) {
      const std::string cand = word.substr(pos, len);
      if (at_start ? vocab.has_plain(cand) : vocab.has_continuation(cand)) {
        pieces.push_back(at_start ? cand : vocab.marker() + cand);
        taken = len;
        break;
      }
    }
    if (taken == 0) {
      // Character fallback: a plain single-character entry keeps the
      // segmentation total even when no continuation piece matches.
      const std::size_t len = detail::utf8_char_len(static_cast<unsigned char>(word[pos]));
      const std::string c = word.substr(pos, std::min(len, remaining));
      if (!vocab.has_plain(c)) {
        raise("character \"", c, "\" of word \"", word,
              "\" is not covered by the vocabulary");
      }
      pieces.push_back(at_start ? c : vocab.marker() + c);
      taken = c.size();
    }
    pos += taken;
  }
  return pieces;
}

// Subword segmentation of a full word sequence, plus counts of special
// sentence-level tokens (e.g. start/end markers) that belong to no word.
struct Tokenization {
  std::vector<std::vector<std::string>> word_subwords;
  std::size_t prefix_specials = 0;
  std::size_t suffix_specials = 0;
  std::string continuation_marker = "##";

  std::size_t total_rows() const {
    std::size_t n = prefix_specials + suffix_specials;
    for (const auto& pieces : word_subwords) n += pieces.size();
    return n;
  }
};

inline Tokenization tokenize_words(std::span<const std::string> words,
                                   const SubwordVocab& vocab,
                                   std::size_t prefix_specials = 0,
                                   std::size_t suffix_specials = 0) {
  Tokenization tok;
  tok.prefix_specials = prefix_specials;
  tok.suffix_specials = suffix_specials;
  tok.continuation_marker = vocab.marker();
  tok.word_subwords.reserve(words.size());
  for (const auto& w : words) tok.word_subwords.push_back(tokenize_greedy(w, vocab));
  return tok;
}

// N_sub x N 0/1 matrix in sparse form: selected[n] is the row of word n's
// first subword. Every column holds exactly one 1; selected rows strictly
// increase left to right; special-token rows are never selected.
struct SelectionMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> selected;

  bool operator==(const SelectionMatrix&) const = default;
};

inline void validate_selection(const SelectionMatrix& m, const std::string& what) {
  if (m.selected.size() != m.cols) {
    raise(what, ": ", m.selected.size(), " selected rows for ", m.cols, " columns");
  }
  for (std::size_t n = 0; n < m.cols; ++n) {
    if (m.selected[n] >= m.rows) {
      raise(what, ": selected row ", m.selected[n], " out of range (", m.rows, " rows)");
    }
    if (n > 0 && m.selected[n] <= m.selected[n - 1]) {
      raise(what, ": selected rows must be strictly increasing");
    }
  }
}

inline SelectionMatrix build_selection_matrix(std::span<const std::string> words,
                                              const Tokenization& tok) {
  if (tok.word_subwords.size() != words.size()) {
    raise("tokenization covers ", tok.word_subwords.size(), " words, expected ",
          words.size());
  }
  for (std::size_t n = 0; n < words.size(); ++n) {
    const auto& pieces = tok.word_subwords[n];
    if (pieces.empty()) raise("word \"", words[n], "\" has no subwords");
    std::string joined;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      std::string_view piece = pieces[k];
      if (k > 0 && piece.size() >= tok.continuation_marker.size() &&
          piece.substr(0, tok.continuation_marker.size()) == tok.continuation_marker) {
        piece.remove_prefix(tok.continuation_marker.size());
      }
      joined += piece;
    }
    if (joined != words[n]) {
      raise("subwords of word ", n, " rebuild \"", joined, "\", expected \"",
            words[n], "\"");
    }
  }

  SelectionMatrix m;
  m.cols = words.size();
  m.selected.reserve(words.size());
  std::size_t row = tok.prefix_specials;
  for (const auto& pieces : tok.word_subwords) {
    m.selected.push_back(row);
    row += pieces.size();
  }
  m.rows = row + tok.suffix_specials;
  return m;
}

// Row-major dense matrix; just enough structure for select-and-
// concatenate, no BLAS needed.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  bool operator==(const DenseMatrix&) const = default;
};

// Word-level fusion of two subword-level hidden-state matrices: output
// row n is H_a's selected row for word n concatenated with H_b's.
// Algebraically equal to concat((M_a)^T H_a, (M_b)^T H_b).
inline DenseMatrix fuse(const DenseMatrix& h_a, const SelectionMatrix& m_a,
                        const DenseMatrix& h_b, const SelectionMatrix& m_b) {
  if (m_a.rows != h_a.rows || m_b.rows != h_b.rows || m_a.cols != m_b.cols) {
    raise("fuse shape mismatch: H_a ", h_a.rows, "x", h_a.cols, ", M_a ",
          m_a.rows, "x", m_a.cols, ", H_b ", h_b.rows, "x", h_b.cols, ", M_b ",
          m_b.rows, "x", m_b.cols);
  }
  validate_selection(m_a, "M_a");
  validate_selection(m_b, "M_b");

  const std::size_t n_words = m_a.cols;
  DenseMatrix out(n_words, h_a.cols + h_b.cols);
  for (std::size_t n = 0; n < n_words; ++n) {
    const double* row_a = h_a.data.data() + m_a.selected[n] * h_a.cols;
    const double* row_b = h_b.data.data() + m_b.selected[n] * h_b.cols;
    double* dst = out.data.data() + n * out.cols;
    std::copy(row_a, row_a + h_a.cols, dst);
    std::copy(row_b, row_b + h_b.cols, dst + h_a.cols);
  }
  return out;
}

// Text format: "rows cols" header line, then rows lines of cols decimals
// printed to 9 significant digits.
inline void write_matrix(const DenseMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise("cannot open for writing: ", path.string());
  out << m.rows << ' ' << m.cols << '\n';
  char buf[32];
  for (std::size_t i = 0; i < m.rows; ++i) {
    for (std::size_t j = 0; j < m.cols; ++j) {
      std::snprintf(buf, sizeof(buf), "%.9g", m.at(i, j));
      if (j > 0) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  if (!out) raise("write failed: ", path.string());
}

inline DenseMatrix read_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("cannot open matrix: ", path.string());
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(in >> rows >> cols)) raise(path.string(), ": missing \"rows cols\" header");
  constexpr std::size_t kMaxEntries = std::size_t{1} << 28;
  if (rows > kMaxEntries || cols > kMaxEntries || (cols != 0 && rows > kMaxEntries / cols)) {
    raise(path.string(), ": implausible matrix dimensions ", rows, "x", cols);
  }
  DenseMatrix m(rows, cols);
  for (std::size_t k = 0; k < rows * cols; ++k) {
    if (!(in >> m.data[k])) {
      raise(path.string(), ": expected ", rows * cols, " entries for a ", rows,
            "x", cols, " matrix, got ", k);
    }
  }
  double extra = 0.0;
  if (in >> extra) {
    raise(path.string(), ": more entries than the declared ", rows, "x", cols);
  }
  return m;
}

// Sparse selection-matrix format: "rows cols" header, then one line of
// cols selected row indices.
inline void write_selection(const SelectionMatrix& m, const std::filesystem::path& path) {
  validate_selection(m, "selection matrix");
  std::ofstream out(path, std::ios::trunc);
  if (!out) raise("cannot open for writing: ", path.string());
  out << m.rows << ' ' << m.cols << '\n';
  for (std::size_t n = 0; n < m.cols; ++n) {
    if (n > 0) out << ' ';
    out << m.selected[n];
  }
  out << '\n';
  if (!out) raise("write failed: ", path.string());
}

inline SelectionMatrix read_selection(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise("cannot open selection matrix: ", path.string());
  SelectionMatrix m;
  if (!(in >> m.rows >> m.cols)) {
    raise(path.string(), ": missing \"rows cols\" header");
  }
  m.selected.resize(m.cols);
  for (std::size_t n = 0; n < m.cols; ++n) {
    if (!(in >> m.selected[n])) {
      raise(path.string(), ": expected ", m.cols, " selected row indices");
    }
  }
  validate_selection(m, path.string());
  return m;
}

}  // namespace slukit

#endif  // SLUKIT_FUSION_HPP
