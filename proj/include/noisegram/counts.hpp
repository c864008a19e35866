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
// Count statistics over unnoised corpora: unigram/bigram(/trigram) counts,
// left and right continuation counts, and per-history totals. All derived
// fields are recomputed from the raw n-gram counts at finalize time, so
// merged shards stay consistent (set cardinalities are not additive).

#ifndef NOISEGRAM_COUNTS_HPP
#define NOISEGRAM_COUNTS_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "noisegram/corpus.hpp"
#include "noisegram/util.hpp"

namespace noisegram {

enum class CountMode { kContinuous, kPerLine };

inline const char* to_string(CountMode m) {
  return m == CountMode::kContinuous ? "continuous" : "per-line";
}

inline CountMode count_mode_from_string(const std::string& s) {
  if (s == "continuous") return CountMode::kContinuous;
  if (s == "per-line") return CountMode::kPerLine;
  throw ConfigError("unknown count mode: " + s + " (want continuous|per-line)");
}

class CountTable {
 public:
  using BigramMap = std::map<std::pair<TokenId, TokenId>, std::int64_t>;
  using TrigramMap = std::map<std::array<TokenId, 3>, std::int64_t>;

  CountTable() = default;
  CountTable(std::int64_t vocab_size, std::uint64_t vocab_hash, CountMode mode, int max_order)
      : vocab_size_(vocab_size),
        vocab_hash_(vocab_hash),
        mode_(mode),
        max_order_(max_order),
        unigrams_(static_cast<size_t>(vocab_size), 0) {}

  std::int64_t vocab_size() const { return vocab_size_; }
  std::uint64_t vocab_hash() const { return vocab_hash_; }
  CountMode mode() const { return mode_; }
  int max_order() const { return max_order_; }
  std::int64_t total_tokens() const { return total_tokens_; }
  std::int64_t total_bigram_types() const { return total_bigram_types_; }
  std::int64_t total_trigram_tokens() const { return total_trigram_tokens_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  std::int64_t c1(TokenId x) const { return unigrams_[static_cast<size_t>(x)]; }

  std::int64_t c2(TokenId a, TokenId b) const {
    auto it = bigrams_.find({a, b});
    return it == bigrams_.end() ? 0 : it->second;
  }

  std::int64_t c3(TokenId a, TokenId b, TokenId c) const {
    auto it = trigrams_.find({a, b, c});
    return it == trigrams_.end() ? 0 : it->second;
  }

  // N1+(x, .): number of distinct bigram types beginning with x.
  std::int64_t right_cont(TokenId x) const { return right_cont_[static_cast<size_t>(x)]; }

  // N1+(., x): number of distinct bigram types ending with x.
  std::int64_t left_cont(TokenId x) const { return left_cont_[static_cast<size_t>(x)]; }

  // Sum over continuations of c2(x, .). Equals c1(x) everywhere except at
  // stream edges (the corpus-final token has one fewer continuation).
  std::int64_t history_total(TokenId x) const { return history_total_[static_cast<size_t>(x)]; }

  const std::vector<std::int64_t>& unigram_counts() const { return unigrams_; }
  const BigramMap& bigram_counts() const { return bigrams_; }
  const TrigramMap& trigram_counts() const { return trigrams_; }

  BigramMap::const_iterator row_begin(TokenId a) const {
    return bigrams_.lower_bound({a, std::numeric_limits<TokenId>::min()});
  }
  BigramMap::const_iterator row_end(TokenId a) const {
    if (a == std::numeric_limits<TokenId>::max()) return bigrams_.end();
    return bigrams_.lower_bound({a + 1, std::numeric_limits<TokenId>::min()});
  }

  void add_unigram(TokenId x, std::int64_t n = 1) {
    unigrams_[static_cast<size_t>(x)] += n;
    total_tokens_ += n;
  }
  void add_bigram(TokenId a, TokenId b, std::int64_t n = 1) { bigrams_[{a, b}] += n; }
  void add_trigram(TokenId a, TokenId b, TokenId c, std::int64_t n = 1) {
    trigrams_[{a, b, c}] += n;
  }
  void add_warning(std::string w) { warnings_.push_back(std::move(w)); }

  // Recomputes continuation counts and totals from the raw n-gram maps.
  void finalize() {
    right_cont_.assign(static_cast<size_t>(vocab_size_), 0);
    left_cont_.assign(static_cast<size_t>(vocab_size_), 0);
    history_total_.assign(static_cast<size_t>(vocab_size_), 0);
    total_bigram_types_ = 0;
    for (const auto& [key, count] : bigrams_) {
      if (count <= 0) continue;
      ++right_cont_[static_cast<size_t>(key.first)];
      ++left_cont_[static_cast<size_t>(key.second)];
      history_total_[static_cast<size_t>(key.first)] += count;
      ++total_bigram_types_;
    }
    total_trigram_tokens_ = 0;
    for (const auto& [key, count] : trigrams_) total_trigram_tokens_ += count;
  }

  void save(std::ostream& os) const;
  void save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot open counts output: " + path);
    save(os);
  }
  static CountTable load(std::istream& is);
  static CountTable load_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open counts: " + path);
    return load(is);
  }

 private:
  std::int64_t vocab_size_ = 0;
  std::uint64_t vocab_hash_ = 0;
  CountMode mode_ = CountMode::kContinuous;
  int max_order_ = 2;
  std::int64_t total_tokens_ = 0;
  std::vector<std::int64_t> unigrams_;
  BigramMap bigrams_;
  TrigramMap trigrams_;
  std::vector<std::int64_t> right_cont_;
  std::vector<std::int64_t> left_cont_;
  std::vector<std::int64_t> history_total_;
  std::int64_t total_bigram_types_ = 0;
  std::int64_t total_trigram_tokens_ = 0;
  std::vector<std::string> warnings_;
};

namespace detail {

// Counts one contiguous token range. Tokens in [begin, end) contribute
// unigrams; bigrams/trigrams are those *ending* inside the range, reaching
// back across `begin` into the same underlying sequence. Sharded counting
// with consecutive ranges therefore merges to exactly the unsharded table.
inline void count_range(const TokenSequence& seq, size_t begin, size_t end, int max_order,
                        CountTable& table) {
  for (size_t i = begin; i < end; ++i) {
    table.add_unigram(seq[i]);
    if (i >= 1) table.add_bigram(seq[i - 1], seq[i]);
    if (max_order >= 3 && i >= 2) table.add_trigram(seq[i - 2], seq[i - 1], seq[i]);
  }
}

}  // namespace detail

// Builds the full count table for an encoded corpus.
//
// continuous mode: lines are concatenated into one stream; no boundary
// tokens are inserted, so stream edges are off by one (documented).
// per-line mode: every line gets the boundary token prepended so each real
// token has a predecessor.
inline CountTable count_ngrams(const std::vector<TokenSequence>& lines, std::int64_t vocab_size,
                               std::uint64_t vocab_hash, int max_order, CountMode mode) {
  if (max_order != 2 && max_order != 3) {
    throw ConfigError("count_ngrams: max_order must be 2 or 3");
  }
  size_t n_tokens = 0;
  for (const auto& l : lines) n_tokens += l.size();
  if (n_tokens == 0) throw DataError("count_ngrams: empty corpus");

  CountTable table(vocab_size, vocab_hash, mode, max_order);
  if (mode == CountMode::kContinuous) {
    TokenSequence stream = concat_lines(lines);
    detail::count_range(stream, 0, stream.size(), max_order, table);
    if (stream.size() < static_cast<size_t>(max_order)) {
      table.add_warning("sequence shorter than max_order; higher-order counts are empty");
    }
  } else {
    bool any_short = false;
    for (const auto& line : lines) {
      TokenSequence with_boundary;
      with_boundary.reserve(line.size() + 1);
      with_boundary.push_back(Vocabulary::kBoundaryId);
      with_boundary.insert(with_boundary.end(), line.begin(), line.end());
      detail::count_range(with_boundary, 0, with_boundary.size(), max_order, table);
      if (with_boundary.size() < static_cast<size_t>(max_order)) any_short = true;
    }
    if (any_short) {
      table.add_warning("line shorter than max_order; higher-order counts are empty there");
    }
  }
  table.finalize();
  return table;
}

inline CountTable count_ngrams(const std::vector<TokenSequence>& lines, const Vocabulary& vocab,
                               int max_order, CountMode mode) {
  return count_ngrams(lines, vocab.size(), vocab.content_hash(), max_order, mode);
}

inline CountTable count_ngrams(const TokenSequence& seq, const Vocabulary& vocab, int max_order,
                               CountMode mode = CountMode::kContinuous) {
  return count_ngrams(std::vector<TokenSequence>{seq}, vocab, max_order, mode);
}

// Adds raw counts; derived statistics are recomputed, not added.
inline CountTable merge(const CountTable& a, const CountTable& b) {
  if (a.vocab_hash() != b.vocab_hash() || a.vocab_size() != b.vocab_size()) {
    throw DataError("merge: count tables built over different vocabularies");
  }
  if (a.mode() != b.mode() || a.max_order() != b.max_order()) {
    throw DataError("merge: count tables have different mode or max_order");
  }
  CountTable out(a.vocab_size(), a.vocab_hash(), a.mode(), a.max_order());
  for (TokenId x = 0; x < a.vocab_size(); ++x) {
    std::int64_t n = a.c1(x) + b.c1(x);
    if (n != 0) out.add_unigram(x, n);
  }
  for (const auto& [key, count] : a.bigram_counts()) out.add_bigram(key.first, key.second, count);
  for (const auto& [key, count] : b.bigram_counts()) out.add_bigram(key.first, key.second, count);
  for (const auto& [key, count] : a.trigram_counts()) out.add_trigram(key[0], key[1], key[2], count);
  for (const auto& [key, count] : b.trigram_counts()) out.add_trigram(key[0], key[1], key[2], count);
  for (const auto& w : a.warnings()) out.add_warning(w);
  for (const auto& w : b.warnings()) out.add_warning(w);
  out.finalize();
  return out;
}

// Counts a continuous stream in `n_shards` consecutive ranges and merges
// them; bit-identical to the unsharded build because each shard's bigrams
// reach back across its left edge.
inline CountTable count_ngrams_sharded(const TokenSequence& seq, const Vocabulary& vocab,
                                       int max_order, size_t n_shards) {
  if (n_shards == 0) throw ConfigError("count_ngrams_sharded: need at least one shard");
  if (seq.empty()) throw DataError("count_ngrams_sharded: empty corpus");
  CountTable acc(vocab.size(), vocab.content_hash(), CountMode::kContinuous, max_order);
  acc.finalize();
  size_t chunk = (seq.size() + n_shards - 1) / n_shards;
  for (size_t begin = 0; begin < seq.size(); begin += chunk) {
    size_t end = std::min(seq.size(), begin + chunk);
    CountTable shard(vocab.size(), vocab.content_hash(), CountMode::kContinuous, max_order);
    detail::count_range(seq, begin, end, max_order, shard);
    shard.finalize();
    acc = merge(acc, shard);
  }
  if (seq.size() < static_cast<size_t>(max_order)) {
    acc.add_warning("sequence shorter than max_order; higher-order counts are empty");
  }
  return acc;
}

// --- TSV serialization ------------------------------------------------------
//
// Sections appear in fixed order with canonical (ascending id) row order, so
// identical tables serialize byte-identically. Derived sections are written
// for inspection and re-verified against the raw counts on load.

inline void CountTable::save(std::ostream& os) const {
  os << "#noisegram-counts\tv1\n";
  os << "#mode\t" << to_string(mode_) << "\tmax_order\t" << max_order_ << "\ttotal_tokens\t"
     << total_tokens_ << "\tvocab_size\t" << vocab_size_ << "\tvocab_hash\t" << to_hex(vocab_hash_)
     << "\ttotal_bigram_types\t" << total_bigram_types_ << "\n";
  os << "[unigrams]\n";
  for (std::int64_t x = 0; x < vocab_size_; ++x) {
    if (unigrams_[static_cast<size_t>(x)] != 0) {
      os << x << '\t' << unigrams_[static_cast<size_t>(x)] << '\n';
    }
  }
  os << "[bigrams]\n";
  for (const auto& [key, count] : bigrams_) {
    os << key.first << '\t' << key.second << '\t' << count << '\n';
  }
  if (max_order_ >= 3) {
    os << "[trigrams]\n";
    for (const auto& [key, count] : trigrams_) {
      os << key[0] << '\t' << key[1] << '\t' << key[2] << '\t' << count << '\n';
    }
  }
  os << "[right_continuations]\n";
  for (std::int64_t x = 0; x < vocab_size_; ++x) {
    if (right_cont_[static_cast<size_t>(x)] != 0) {
      os << x << '\t' << right_cont_[static_cast<size_t>(x)] << '\n';
    }
  }
  os << "[left_continuations]\n";
  for (std::int64_t x = 0; x < vocab_size_; ++x) {
    if (left_cont_[static_cast<size_t>(x)] != 0) {
      os << x << '\t' << left_cont_[static_cast<size_t>(x)] << '\n';
    }
  }
  os << "[warnings]\n";
  for (const auto& w : warnings_) os << w << '\n';
}

inline CountTable CountTable::load(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != "#noisegram-counts\tv1") {
    throw DataError("counts file: bad magic line");
  }
  if (!std::getline(is, line)) throw DataError("counts file: missing header");
  CountMode mode = CountMode::kContinuous;
  int max_order = 2;
  std::int64_t total_tokens = 0, vocab_size = 0, total_bigram_types = 0;
  std::uint64_t vocab_hash = 0;
  {
    std::istringstream hs(line);
    std::string key, value;
    std::getline(hs, key, '\t');  // leading "#mode"
    if (key != "#mode") throw DataError("counts file: bad header line");
    std::getline(hs, value, '\t');
    mode = count_mode_from_string(value);
    auto next = [&hs](const std::string& want) {
      std::string k, v;
      if (!std::getline(hs, k, '\t') || !std::getline(hs, v, '\t') || k != want) {
        throw DataError("counts file: malformed header field (want " + want + ")");
      }
      return v;
    };
    max_order = std::stoi(next("max_order"));
    total_tokens = std::stoll(next("total_tokens"));
    vocab_size = std::stoll(next("vocab_size"));
    vocab_hash = std::stoull(next("vocab_hash"), nullptr, 16);
    total_bigram_types = std::stoll(next("total_bigram_types"));
  }

  CountTable table(vocab_size, vocab_hash, mode, max_order);
  std::string section;
  std::vector<std::int64_t> file_right(static_cast<size_t>(vocab_size), 0);
  std::vector<std::int64_t> file_left(static_cast<size_t>(vocab_size), 0);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line;
      continue;
    }
    std::istringstream ls(line);
    if (section == "[unigrams]") {
      std::int64_t x, n;
      ls >> x >> n;
      table.add_unigram(static_cast<TokenId>(x), n);
    } else if (section == "[bigrams]") {
      std::int64_t a, b, n;
      ls >> a >> b >> n;
      table.add_bigram(static_cast<TokenId>(a), static_cast<TokenId>(b), n);
    } else if (section == "[trigrams]") {
      std::int64_t a, b, c, n;
      ls >> a >> b >> c >> n;
      table.add_trigram(static_cast<TokenId>(a), static_cast<TokenId>(b), static_cast<TokenId>(c), n);
    } else if (section == "[right_continuations]") {
      std::int64_t x, n;
      ls >> x >> n;
      file_right[static_cast<size_t>(x)] = n;
    } else if (section == "[left_continuations]") {
      std::int64_t x, n;
      ls >> x >> n;
      file_left[static_cast<size_t>(x)] = n;
    } else if (section == "[warnings]") {
      table.add_warning(line);
    } else {
      throw DataError("counts file: row outside a known section: " + line);
    }
  }
  table.finalize();
  if (table.total_tokens() != total_tokens) {
    throw DataError("counts file: unigram section does not sum to total_tokens header");
  }
  if (table.total_bigram_types() != total_bigram_types) {
    throw DataError("counts file: bigram section disagrees with total_bigram_types header");
  }
  for (std::int64_t x = 0; x < vocab_size; ++x) {
    if (file_right[static_cast<size_t>(x)] != table.right_cont(static_cast<TokenId>(x)) ||
        file_left[static_cast<size_t>(x)] != table.left_cont(static_cast<TokenId>(x))) {
      throw DataError("counts file: continuation sections inconsistent with bigrams");
    }
  }
  return table;
}

}  // namespace noisegram

#endif  // NOISEGRAM_COUNTS_HPP
