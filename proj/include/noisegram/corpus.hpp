// Copyright 2026 The noisegram Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Corpus ingestion: vocabularies over whitespace-tokenized text and
// encoding of token streams as id sequences. Input is assumed to be
// pre-tokenized; newline is the sequence boundary in per-line mode.

#ifndef NOISEGRAM_CORPUS_HPP
#define NOISEGRAM_CORPUS_HPP

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "noisegram/util.hpp"

namespace noisegram {

using TokenSequence = std::vector<TokenId>;

// Token <-> id bijection with three reserved ids. Reserved tokens are never
// produced by corpus text: encode() maps any literal reserved surface to unk.
// Immutable after construction and safe to share across threads.
class Vocabulary {
 public:
  static constexpr TokenId kUnkId = 0;
  static constexpr TokenId kBlankId = 1;
  static constexpr TokenId kBoundaryId = 2;

  static constexpr const char* kUnkSurface = "<unk>";
  static constexpr const char* kBlankSurface = "<blank>";
  static constexpr const char* kBoundarySurface = "<s>";

  Vocabulary() {
    for (const char* s : {kUnkSurface, kBlankSurface, kBoundarySurface}) {
      ids_.emplace(s, static_cast<TokenId>(tokens_.size()));
      tokens_.emplace_back(s);
    }
  }

  TokenId add(const std::string& surface) {
    if (ids_.count(surface)) {
      throw DataError("vocabulary: duplicate token '" + surface + "'");
    }
    TokenId id = static_cast<TokenId>(tokens_.size());
    ids_.emplace(surface, id);
    tokens_.push_back(surface);
    return id;
  }

  std::int64_t size() const { return static_cast<std::int64_t>(tokens_.size()); }

  // OOV and literal "<blank>"/"<s>" map to unk; "<unk>" is itself unk.
  TokenId id_of(const std::string& surface) const {
    auto it = ids_.find(surface);
    if (it == ids_.end() || it->second == kBlankId || it->second == kBoundaryId) {
      return kUnkId;
    }
    return it->second;
  }

  bool contains(const std::string& surface) const { return ids_.count(surface) > 0; }

  const std::string& surface(TokenId id) const {
    return tokens_.at(static_cast<size_t>(id));
  }

  static bool is_reserved(TokenId id) { return id >= 0 && id <= kBoundaryId; }

  static bool is_reserved_surface(const std::string& s) {
    return s == kUnkSurface || s == kBlankSurface || s == kBoundarySurface;
  }

  // Stable fingerprint over the full id -> surface table.
  std::uint64_t content_hash() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& t : tokens_) {
      h = fnv1a64(t, h);
      h = fnv1a64(std::string(1, '\n'), h);
    }
    return h;
  }

  // One token per line, line number = id, reserved tokens first.
  void save(std::ostream& os) const {
    for (const auto& t : tokens_) os << t << '\n';
  }

  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open vocabulary output: " + path);
    save(os);
  }

  static Vocabulary load(std::istream& is) {
    Vocabulary v;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(is, line)) {
      if (lineno <= kBoundaryId) {
        if (line != v.tokens_[static_cast<size_t>(lineno)]) {
          throw DataError("vocabulary file: line " + std::to_string(lineno) +
                          " must be the reserved token '" +
                          v.tokens_[static_cast<size_t>(lineno)] + "', got '" + line + "'");
        }
      } else {
        v.add(line);
      }
      ++lineno;
    }
    if (lineno <= kBoundaryId) {
      throw DataError("vocabulary file: missing reserved token lines");
    }
    return v;
  }

  static Vocabulary load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open vocabulary: " + path);
    return load(is);
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> ids_;
};

inline std::vector<std::string> split_tokens(const std::string& line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Per-line view of a pre-tokenized corpus. Empty lines are dropped.
inline std::vector<std::vector<std::string>> read_token_lines(std::istream& is) {
  std::vector<std::vector<std::string>> lines;
  std::string line;
  while (std::getline(is, line)) {
    auto toks = split_tokens(line);
    if (!toks.empty()) lines.push_back(std::move(toks));
  }
  return lines;
}

inline std::vector<std::vector<std::string>> read_token_lines(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open corpus: " + path);
  return read_token_lines(is);
}

// Builds a vocabulary from a token stream. Tokens with frequency strictly
// greater than `min_count` get their own id; everything else maps to unk.
// Ids are assigned by descending frequency, ties broken by first occurrence,
// so construction is deterministic given stream order.
template <typename TokenRange>
Vocabulary build_vocab(const TokenRange& token_stream, std::int64_t min_count) {
  if (min_count < 0) throw ConfigError("build_vocab: min_count must be >= 0");

  struct TypeStat {
    std::int64_t count = 0;
    std::int64_t first_seen = 0;
  };
  std::unordered_map<std::string, TypeStat> stats;
  std::int64_t n_tokens = 0;
  for (const auto& tok : token_stream) {
    const std::string& t = tok;
    auto [it, inserted] = stats.try_emplace(t);
    if (inserted) it->second.first_seen = n_tokens;
    ++it->second.count;
    ++n_tokens;
  }
  if (n_tokens == 0) throw DataError("build_vocab: empty corpus");

  std::vector<std::pair<std::string, TypeStat>> kept;
  kept.reserve(stats.size());
  for (auto& [surface, stat] : stats) {
    if (Vocabulary::is_reserved_surface(surface)) continue;
    if (stat.count > min_count) kept.emplace_back(surface, stat);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second.count != b.second.count) return a.second.count > b.second.count;
    return a.second.first_seen < b.second.first_seen;
  });

  Vocabulary v;
  for (auto& [surface, stat] : kept) v.add(surface);
  return v;
}

inline Vocabulary build_vocab_lines(const std::vector<std::vector<std::string>>& lines,
                                    std::int64_t min_count) {
  std::vector<std::string> flat;
  for (const auto& l : lines) flat.insert(flat.end(), l.begin(), l.end());
  return build_vocab(flat, min_count);
}

// Total over any stream: OOV maps to unk, length is preserved.
template <typename TokenRange>
TokenSequence encode(const Vocabulary& vocab, const TokenRange& token_stream) {
  TokenSequence seq;
  for (const auto& tok : token_stream) seq.push_back(vocab.id_of(tok));
  return seq;
}

inline std::vector<TokenSequence> encode_lines(
    const Vocabulary& vocab, const std::vector<std::vector<std::string>>& lines) {
  std::vector<TokenSequence> out;
  out.reserve(lines.size());
  for (const auto& l : lines) out.push_back(encode(vocab, l));
  return out;
}

inline std::vector<std::string> decode(const Vocabulary& vocab, const TokenSequence& seq) {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (TokenId id : seq) out.push_back(vocab.surface(id));
  return out;
}

inline TokenSequence concat_lines(const std::vector<TokenSequence>& lines) {
  TokenSequence out;
  for (const auto& l : lines) out.insert(out.end(), l.begin(), l.end());
  return out;
}

}  // namespace noisegram

#endif  // NOISEGRAM_CORPUS_HPP
