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
// Noising schemes over token sequences. Four schemes are supported, each
// pinned to its proposal distribution:
//
//   scheme             gamma          proposal              noises target?
//   blank              fixed gamma0   point mass on blank   no
//   unigram            fixed gamma0   unigram frequency     no
//   absolute_discount  adaptive       unigram frequency     no
//   bigram_kn          adaptive       left continuation     yes
//
// The adaptive rate is gamma0 * N1+(x,.) / c(x), clipped to [0,1]. All
// randomness is keyed by (seed, stream_index, position, draw), so outputs
// replay bit-identically regardless of thread count or batching. Noising is
// a training-time transform only; evaluation paths never call it.

#ifndef NOISEGRAM_NOISING_HPP
#define NOISEGRAM_NOISING_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "noisegram/counts.hpp"
#include "noisegram/rng.hpp"
#include "noisegram/util.hpp"

namespace noisegram {

enum class Scheme { kBlank, kUnigram, kAbsoluteDiscount, kBigramKn };
enum class ProposalKind { kBlankPointMass, kUnigramFrequency, kLeftContinuation };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::kBlank: return "blank";
    case Scheme::kUnigram: return "unigram";
    case Scheme::kAbsoluteDiscount: return "absolute_discount";
    case Scheme::kBigramKn: return "bigram_kn";
  }
  return "?";
}

inline const char* to_string(ProposalKind k) {
  switch (k) {
    case ProposalKind::kBlankPointMass: return "blank_point_mass";
    case ProposalKind::kUnigramFrequency: return "unigram_frequency";
    case ProposalKind::kLeftContinuation: return "left_continuation";
  }
  return "?";
}

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "blank") return Scheme::kBlank;
  if (s == "unigram") return Scheme::kUnigram;
  if (s == "absolute_discount") return Scheme::kAbsoluteDiscount;
  if (s == "bigram_kn") return Scheme::kBigramKn;
  throw ConfigError("unknown noising scheme: " + s);
}

inline ProposalKind proposal_for_scheme(Scheme s) {
  switch (s) {
    case Scheme::kBlank: return ProposalKind::kBlankPointMass;
    case Scheme::kUnigram:
    case Scheme::kAbsoluteDiscount: return ProposalKind::kUnigramFrequency;
    case Scheme::kBigramKn: return ProposalKind::kLeftContinuation;
  }
  return ProposalKind::kBlankPointMass;
}

inline bool scheme_uses_adaptive_gamma(Scheme s) {
  return s == Scheme::kAbsoluteDiscount || s == Scheme::kBigramKn;
}

struct NoisingConfig {
  Scheme scheme = Scheme::kUnigram;
  double gamma0 = 0.0;
  bool noise_target = false;
  std::uint64_t seed = 0;
  ProposalKind proposal = ProposalKind::kUnigramFrequency;

  // Canonical constructor: derives proposal and target flag from the scheme.
  static NoisingConfig for_scheme(Scheme scheme, double gamma0, std::uint64_t seed) {
    NoisingConfig c;
    c.scheme = scheme;
    c.gamma0 = gamma0;
    c.noise_target = (scheme == Scheme::kBigramKn);
    c.seed = seed;
    c.proposal = proposal_for_scheme(scheme);
    c.validate();
    return c;
  }

  // Rejects any scheme/proposal/target combination outside the table above.
  void validate() const {
    if (gamma0 < 0.0 || gamma0 > 1.0) {
      throw ConfigError("noising: gamma0 must be in [0,1]");
    }
    if (proposal != proposal_for_scheme(scheme)) {
      throw ConfigError(std::string("noising: scheme ") + to_string(scheme) +
                        " requires proposal " + to_string(proposal_for_scheme(scheme)) +
                        ", got " + to_string(proposal));
    }
    if (noise_target != (scheme == Scheme::kBigramKn)) {
      throw ConfigError(std::string("noising: noise_target must be ") +
                        (scheme == Scheme::kBigramKn ? "true" : "false") + " for scheme " +
                        to_string(scheme));
    }
  }
};

// Dense distribution over token ids with prefix sums for inverse-CDF draws.
// Blank and boundary never receive mass from count-based proposals; unk is a
// legitimate corpus token and stays drawable.
class ProposalDistribution {
 public:
  ProposalDistribution(std::vector<double> probs, ProposalKind kind)
      : kind_(kind), probs_(std::move(probs)) {
    cumulative_.resize(probs_.size());
    double acc = 0.0;
    for (size_t i = 0; i < probs_.size(); ++i) {
      acc += probs_[i];
      cumulative_[i] = acc;
    }
    if (!cumulative_.empty()) cumulative_.back() = 1.0;
  }

  ProposalKind kind() const { return kind_; }
  double prob(TokenId x) const { return probs_[static_cast<size_t>(x)]; }
  const std::vector<double>& probs() const { return probs_; }

  // Inverse CDF over ascending token id.
  TokenId sample(double u) const {
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<TokenId>(it - cumulative_.begin());
  }

 private:
  ProposalKind kind_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
};

inline ProposalDistribution build_proposal(const CountTable& table, ProposalKind kind) {
  if (table.total_tokens() == 0) throw DataError("build_proposal: empty count table");
  size_t v = static_cast<size_t>(table.vocab_size());
  std::vector<double> probs(v, 0.0);
  if (kind == ProposalKind::kBlankPointMass) {
    probs[static_cast<size_t>(Vocabulary::kBlankId)] = 1.0;
    return ProposalDistribution(std::move(probs), kind);
  }
  double total = 0.0;
  for (size_t x = 0; x < v; ++x) {
    TokenId id = static_cast<TokenId>(x);
    if (id == Vocabulary::kBlankId || id == Vocabulary::kBoundaryId) continue;
    double w = kind == ProposalKind::kUnigramFrequency
                   ? static_cast<double>(table.c1(id))
                   : static_cast<double>(table.left_cont(id));
    probs[x] = w;
    total += w;
  }
  if (total <= 0.0) throw DataError("build_proposal: proposal has no mass");
  for (auto& p : probs) p /= total;
  return ProposalDistribution(std::move(probs), kind);
}

// Noising probability for context token x. Fixed schemes return gamma0;
// adaptive schemes return clip(gamma0 * N1+(x,.) / c(x), 0, 1). Tokens with
// no counts fall back to gamma0, matching the singleton limit.
inline double gamma_for(const CountTable& table, const NoisingConfig& config, TokenId x) {
  if (!scheme_uses_adaptive_gamma(config.scheme)) return config.gamma0;
  std::int64_t c = table.c1(x);
  if (c <= 0) return config.gamma0;
  double g = config.gamma0 * static_cast<double>(table.right_cont(x)) / static_cast<double>(c);
  return std::clamp(g, 0.0, 1.0);
}

struct NoisedBatch {
  TokenSequence x_tilde;
  TokenSequence y_tilde;  // filled only by target-noising paths
  std::vector<bool> swap_mask;
};

namespace detail {

// Draw indices within one position's key space.
constexpr std::uint64_t kDrawGate = 0;
constexpr std::uint64_t kDrawReplaceX = 1;
constexpr std::uint64_t kDrawReplaceY = 2;

}  // namespace detail

// Context-only noising (blank, unigram, absolute_discount): one Bernoulli
// gate per position, replacement drawn from the scheme's proposal. The
// prediction target is whatever the caller derives from the unnoised data;
// it is never modified here.
inline NoisedBatch noise_sequence(const TokenSequence& x, const CountTable& table,
                                  const ProposalDistribution& q, const NoisingConfig& config,
                                  std::uint64_t stream_index) {
  config.validate();
  if (x.empty()) throw DataError("noise_sequence: empty sequence");
  if (config.scheme == Scheme::kBigramKn) {
    throw ConfigError("noise_sequence: bigram_kn noises the target; use noise_bigram_kn");
  }
  if (q.kind() != config.proposal) {
    throw ConfigError("noise_sequence: proposal distribution kind does not match config");
  }
  RandomStream rs(config.seed, stream_index);
  NoisedBatch out;
  out.x_tilde = x;
  out.swap_mask.assign(x.size(), false);
  for (size_t j = 0; j < x.size(); ++j) {
    double gamma = gamma_for(table, config, x[j]);
    if (rs.uniform(j, detail::kDrawGate) < gamma) {
      out.x_tilde[j] = q.sample(rs.uniform(j, detail::kDrawReplaceX));
      out.swap_mask[j] = true;
    }
  }
  return out;
}

inline NoisedBatch noise_sequence(const TokenSequence& x, const CountTable& table,
                                  const NoisingConfig& config, std::uint64_t stream_index) {
  return noise_sequence(x, table, build_proposal(table, config.proposal), config, stream_index);
}

// Bigram Kneser-Ney noising: per position, gamma = gamma0 * N1+(x_j,.)/c(x_j);
// a single Bernoulli(gamma) draw gates BOTH replacements, after which x_j and
// y_j are replaced by independent draws from q(x) proportional to N1+(.,x).
inline NoisedBatch noise_bigram_kn(const TokenSequence& x, const TokenSequence& y,
                                   const CountTable& table, const ProposalDistribution& q,
                                   const NoisingConfig& config, std::uint64_t stream_index) {
  config.validate();
  if (config.scheme != Scheme::kBigramKn) {
    throw ConfigError("noise_bigram_kn: config scheme must be bigram_kn");
  }
  if (x.empty()) throw DataError("noise_bigram_kn: empty sequence");
  if (x.size() != y.size()) throw DataError("noise_bigram_kn: input/target length mismatch");
  RandomStream rs(config.seed, stream_index);
  NoisedBatch out;
  out.x_tilde = x;
  out.y_tilde = y;
  out.swap_mask.assign(x.size(), false);
  for (size_t j = 0; j < x.size(); ++j) {
    double gamma = gamma_for(table, config, x[j]);
    if (rs.uniform(j, detail::kDrawGate) < gamma) {
      out.x_tilde[j] = q.sample(rs.uniform(j, detail::kDrawReplaceX));
      out.y_tilde[j] = q.sample(rs.uniform(j, detail::kDrawReplaceY));
      out.swap_mask[j] = true;
    }
  }
  return out;
}

inline NoisedBatch noise_bigram_kn(const TokenSequence& x, const TokenSequence& y,
                                   const CountTable& table, const NoisingConfig& config,
                                   std::uint64_t stream_index) {
  return noise_bigram_kn(x, y, table, build_proposal(table, config.proposal), config,
                         stream_index);
}

// Language-model convenience: the target is the input shifted by one (the
// successor of the final position is unavailable and kept as-is).
inline NoisedBatch noise_bigram_kn_lm(const TokenSequence& x, const CountTable& table,
                                      const ProposalDistribution& q, const NoisingConfig& config,
                                      std::uint64_t stream_index) {
  if (x.empty()) throw DataError("noise_bigram_kn: empty sequence");
  TokenSequence y(x.begin() + 1, x.end());
  y.push_back(x.back());
  return noise_bigram_kn(x, y, table, q, config, stream_index);
}

inline NoisedBatch noise_bigram_kn_lm(const TokenSequence& x, const CountTable& table,
                                      const NoisingConfig& config, std::uint64_t stream_index) {
  return noise_bigram_kn_lm(x, table, build_proposal(table, config.proposal), config,
                            stream_index);
}

enum class PairSides { kBoth, kSourceOnly, kTargetOnly };

inline const char* to_string(PairSides s) {
  switch (s) {
    case PairSides::kBoth: return "both";
    case PairSides::kSourceOnly: return "source-only";
    case PairSides::kTargetOnly: return "target-only";
  }
  return "?";
}

// Sequence-to-sequence extension: source and target are noised independently,
// each with its own count statistics, on distinct sub-streams of the seed.
// Table 5's source-only / target-only configurations are expressed by forcing
// gamma to zero on the silent side, which leaves the stream layout (and hence
// determinism) unchanged.
inline std::pair<NoisedBatch, NoisedBatch> noise_parallel_pair(
    const TokenSequence& src, const TokenSequence& tgt, const CountTable& src_table,
    const CountTable& tgt_table, const ProposalDistribution& src_q,
    const ProposalDistribution& tgt_q, const NoisingConfig& config, std::uint64_t stream_index,
    PairSides sides = PairSides::kBoth) {
  config.validate();
  if (src.empty() || tgt.empty()) throw DataError("noise_parallel_pair: empty sequence");

  auto run_side = [&](const TokenSequence& seq, const CountTable& table,
                      const ProposalDistribution& q, bool active, std::uint64_t side_tag) {
    NoisingConfig c = config;
    if (!active) c.gamma0 = 0.0;
    c.seed = mix_words(splitmix64(config.seed), side_tag);
    if (config.scheme == Scheme::kBigramKn) {
      return noise_bigram_kn_lm(seq, table, q, c, stream_index);
    }
    return noise_sequence(seq, table, q, c, stream_index);
  };
  NoisedBatch src_out = run_side(src, src_table, src_q, sides != PairSides::kTargetOnly, 1);
  NoisedBatch tgt_out = run_side(tgt, tgt_table, tgt_q, sides != PairSides::kSourceOnly, 2);
  return {std::move(src_out), std::move(tgt_out)};
}

inline std::pair<NoisedBatch, NoisedBatch> noise_parallel_pair(
    const TokenSequence& src, const TokenSequence& tgt, const CountTable& src_table,
    const CountTable& tgt_table, const NoisingConfig& config, std::uint64_t stream_index,
    PairSides sides = PairSides::kBoth) {
  return noise_parallel_pair(src, tgt, src_table, tgt_table,
                             build_proposal(src_table, config.proposal),
                             build_proposal(tgt_table, config.proposal), config, stream_index,
                             sides);
}

}  // namespace noisegram

#endif  // NOISEGRAM_NOISING_HPP
