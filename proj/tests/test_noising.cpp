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

#include "noisegram/noising.hpp"

#include <cmath>

#include "catch2/catch_amalgamated.hpp"
#include "noisegram/corpus.hpp"
#include "noisegram/counts.hpp"
#include "support/generators.hpp"

using namespace noisegram;

namespace {

struct Fixture {
  Vocabulary vocab;
  TokenSequence seq;
  CountTable table;

  explicit Fixture(const std::vector<std::string>& tokens)
      : vocab(build_vocab(tokens, 0)),
        seq(encode(vocab, tokens)),
        table(count_ngrams(seq, vocab, 2)) {}

  explicit Fixture(const std::string& text) : Fixture(split_tokens(text)) {}
};

Fixture big_fixture(size_t n_tokens, int n_types, std::uint64_t seed) {
  return Fixture(testsupport::zipf_tokens(n_tokens, n_types, 1.0, seed));
}

}  // namespace

TEST_CASE("scheme/proposal pairings are fixed and misconfiguration is rejected") {
  NoisingConfig c = NoisingConfig::for_scheme(Scheme::kBlank, 0.2, 1);
  CHECK(c.proposal == ProposalKind::kBlankPointMass);
  CHECK_FALSE(c.noise_target);
  CHECK(NoisingConfig::for_scheme(Scheme::kUnigram, 0.2, 1).proposal ==
        ProposalKind::kUnigramFrequency);
  CHECK(NoisingConfig::for_scheme(Scheme::kAbsoluteDiscount, 0.2, 1).proposal ==
        ProposalKind::kUnigramFrequency);
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.2, 1);
  CHECK(kn.proposal == ProposalKind::kLeftContinuation);
  CHECK(kn.noise_target);

  NoisingConfig bad = c;
  bad.proposal = ProposalKind::kUnigramFrequency;
  CHECK_THROWS_AS(bad.validate(), ConfigError);

  NoisingConfig bad2 = kn;
  bad2.noise_target = false;
  CHECK_THROWS_AS(bad2.validate(), ConfigError);

  CHECK_THROWS_AS(NoisingConfig::for_scheme(Scheme::kBlank, 1.5, 1), ConfigError);
  CHECK_THROWS_AS(NoisingConfig::for_scheme(Scheme::kBlank, -0.1, 1), ConfigError);
}

TEST_CASE("proposal distributions match hand-derived values on 'a b a b c'") {
  Fixture f("a b a b c");
  TokenId a = f.vocab.id_of("a"), b = f.vocab.id_of("b"), c = f.vocab.id_of("c");

  ProposalDistribution blank = build_proposal(f.table, ProposalKind::kBlankPointMass);
  CHECK(blank.prob(Vocabulary::kBlankId) == 1.0);
  CHECK(blank.prob(a) == 0.0);
  CHECK(blank.sample(0.0) == Vocabulary::kBlankId);
  CHECK(blank.sample(0.999999) == Vocabulary::kBlankId);

  ProposalDistribution uni = build_proposal(f.table, ProposalKind::kUnigramFrequency);
  CHECK(uni.prob(a) == Catch::Approx(0.4).margin(1e-15));
  CHECK(uni.prob(b) == Catch::Approx(0.4).margin(1e-15));
  CHECK(uni.prob(c) == Catch::Approx(0.2).margin(1e-15));

  // each of a, b, c completes exactly one distinct bigram type
  ProposalDistribution cont = build_proposal(f.table, ProposalKind::kLeftContinuation);
  CHECK(cont.prob(a) == Catch::Approx(1.0 / 3).margin(1e-15));
  CHECK(cont.prob(b) == Catch::Approx(1.0 / 3).margin(1e-15));
  CHECK(cont.prob(c) == Catch::Approx(1.0 / 3).margin(1e-15));
}

TEST_CASE("count-based proposals put no mass on blank or boundary and sum to one") {
  auto tokens = testsupport::zipf_tokens(3000, 50, 1.0, 5);
  Vocabulary vocab = build_vocab(tokens, 0);
  std::vector<TokenSequence> lines = {encode(vocab, tokens)};
  CountTable per_line = count_ngrams(lines, vocab, 2, CountMode::kPerLine);
  for (ProposalKind kind : {ProposalKind::kUnigramFrequency, ProposalKind::kLeftContinuation}) {
    ProposalDistribution q = build_proposal(per_line, kind);
    CHECK(q.prob(Vocabulary::kBlankId) == 0.0);
    CHECK(q.prob(Vocabulary::kBoundaryId) == 0.0);
    double sum = 0.0;
    for (TokenId x = 0; x < vocab.size(); ++x) sum += q.prob(x);
    CHECK(sum == Catch::Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("build_proposal rejects an empty table") {
  Vocabulary vocab = build_vocab(split_tokens("a"), 0);
  CountTable empty(vocab.size(), vocab.content_hash(), CountMode::kContinuous, 2);
  empty.finalize();
  CHECK_THROWS_AS(build_proposal(empty, ProposalKind::kUnigramFrequency), DataError);
}

TEST_CASE("gamma_for: fixed schemes return gamma0, adaptive schemes rescale") {
  // x appears 4 times with continuations {a, a, b, a}: N1+(x,.) = 2
  Fixture f("x a x a x b x a");
  TokenId x = f.vocab.id_of("x");
  REQUIRE(f.table.c1(x) == 4);
  REQUIRE(f.table.right_cont(x) == 2);

  NoisingConfig uni = NoisingConfig::for_scheme(Scheme::kUnigram, 0.5, 1);
  CHECK(gamma_for(f.table, uni, x) == 0.5);

  NoisingConfig ad = NoisingConfig::for_scheme(Scheme::kAbsoluteDiscount, 0.5, 1);
  CHECK(gamma_for(f.table, ad, x) == 0.25);

  NoisingConfig zero = NoisingConfig::for_scheme(Scheme::kAbsoluteDiscount, 0.0, 1);
  for (TokenId t = 0; t < f.vocab.size(); ++t) CHECK(gamma_for(f.table, zero, t) == 0.0);
}

TEST_CASE("gamma_for: a singleton token gates at exactly gamma0") {
  Fixture f("b q b b");  // q appears once, not stream-final
  TokenId q = f.vocab.id_of("q");
  REQUIRE(f.table.c1(q) == 1);
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.37, 1);
  CHECK(gamma_for(f.table, kn, q) == 0.37);
}

TEST_CASE("gamma_for: unseen tokens fall back to gamma0") {
  Fixture f("a b a");
  NoisingConfig ad = NoisingConfig::for_scheme(Scheme::kAbsoluteDiscount, 0.4, 1);
  REQUIRE(f.table.c1(Vocabulary::kBlankId) == 0);
  CHECK(gamma_for(f.table, ad, Vocabulary::kBlankId) == 0.4);
}

TEST_CASE("gamma_AD never exceeds gamma0") {
  Fixture f = big_fixture(20000, 200, 77);
  NoisingConfig ad = NoisingConfig::for_scheme(Scheme::kAbsoluteDiscount, 0.8, 1);
  for (TokenId x = 0; x < f.vocab.size(); ++x) {
    CHECK(gamma_for(f.table, ad, x) <= 0.8 + 1e-15);
  }
}

TEST_CASE("gamma=0 noising is the identity transform") {
  Fixture f("a b a b c a c b");
  for (Scheme scheme : {Scheme::kBlank, Scheme::kUnigram, Scheme::kAbsoluteDiscount}) {
    NoisingConfig c = NoisingConfig::for_scheme(scheme, 0.0, 9);
    NoisedBatch out = noise_sequence(f.seq, f.table, c, 0);
    CHECK(out.x_tilde == f.seq);
    for (bool m : out.swap_mask) CHECK_FALSE(m);
  }
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.0, 9);
  NoisedBatch out = noise_bigram_kn_lm(f.seq, f.table, kn, 0);
  CHECK(out.x_tilde == f.seq);
  TokenSequence shifted(f.seq.begin() + 1, f.seq.end());
  shifted.push_back(f.seq.back());
  CHECK(out.y_tilde == shifted);
}

TEST_CASE("gamma=1 blank noising blanks every position") {
  Fixture f("a b a b c");
  NoisingConfig c = NoisingConfig::for_scheme(Scheme::kBlank, 1.0, 42);
  NoisedBatch out = noise_sequence(f.seq, f.table, c, 3);
  for (size_t j = 0; j < out.x_tilde.size(); ++j) {
    CHECK(out.x_tilde[j] == Vocabulary::kBlankId);
    CHECK(out.swap_mask[j]);
  }
}

TEST_CASE("unchanged positions are exactly the unswapped ones") {
  Fixture f = big_fixture(5000, 60, 13);
  NoisingConfig c = NoisingConfig::for_scheme(Scheme::kUnigram, 0.3, 17);
  NoisedBatch out = noise_sequence(f.seq, f.table, c, 1);
  REQUIRE(out.x_tilde.size() == f.seq.size());
  for (size_t j = 0; j < f.seq.size(); ++j) {
    if (!out.swap_mask[j]) CHECK(out.x_tilde[j] == f.seq[j]);
  }
}

TEST_CASE("blank id appears in output only under the blank scheme") {
  Fixture f = big_fixture(5000, 60, 19);
  for (Scheme scheme : {Scheme::kUnigram, Scheme::kAbsoluteDiscount}) {
    NoisingConfig c = NoisingConfig::for_scheme(scheme, 0.9, 23);
    NoisedBatch out = noise_sequence(f.seq, f.table, c, 0);
    for (TokenId id : out.x_tilde) CHECK(id != Vocabulary::kBlankId);
  }
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.9, 23);
  NoisedBatch out = noise_bigram_kn_lm(f.seq, f.table, kn, 0);
  for (TokenId id : out.x_tilde) CHECK(id != Vocabulary::kBlankId);
  for (TokenId id : out.y_tilde) CHECK(id != Vocabulary::kBlankId);
}

TEST_CASE("swap fraction concentrates at gamma over 1e5 positions") {
  Fixture f = big_fixture(100000, 500, 101);
  double gamma = 0.25;
  NoisingConfig c = NoisingConfig::for_scheme(Scheme::kUnigram, gamma, 555);
  NoisedBatch out = noise_sequence(f.seq, f.table, c, 0);
  double n = static_cast<double>(f.seq.size());
  double swapped = 0;
  for (bool m : out.swap_mask) swapped += m;
  double sigma = std::sqrt(n * gamma * (1 - gamma));
  CHECK(std::abs(swapped - gamma * n) <= 3 * sigma);
}

TEST_CASE("adaptive swap fraction concentrates at the mean gamma_AD") {
  Fixture f = big_fixture(100000, 500, 103);
  NoisingConfig c = NoisingConfig::for_scheme(Scheme::kAbsoluteDiscount, 0.5, 556);
  double mean = 0.0, var = 0.0;
  for (TokenId x : f.seq) {
    double g = gamma_for(f.table, c, x);
    mean += g;
    var += g * (1 - g);
  }
  NoisedBatch out = noise_sequence(f.seq, f.table, c, 0);
  double swapped = 0;
  for (bool m : out.swap_mask) swapped += m;
  CHECK(std::abs(swapped - mean) <= 3 * std::sqrt(var));
}

TEST_CASE("unigram noising preserves expected unigram counts") {
  auto tokens = testsupport::zipf_tokens(5000, 40, 1.0, 21);
  Vocabulary vocab = build_vocab(tokens, 0);
  TokenSequence seq = encode(vocab, tokens);
  CountTable table = count_ngrams(seq, vocab, 2);
  NoisingConfig c = NoisingConfig::for_scheme(Scheme::kUnigram, 0.5, 777);
  ProposalDistribution q = build_proposal(table, ProposalKind::kUnigramFrequency);

  const int n_replicas = 500;
  std::vector<double> mean_counts(static_cast<size_t>(vocab.size()), 0.0);
  for (int r = 0; r < n_replicas; ++r) {
    NoisedBatch out = noise_sequence(seq, table, q, c, static_cast<std::uint64_t>(r));
    for (TokenId id : out.x_tilde) mean_counts[static_cast<size_t>(id)] += 1.0;
  }
  for (auto& m : mean_counts) m /= n_replicas;
  for (TokenId x = 0; x < vocab.size(); ++x) {
    if (table.c1(x) >= 100) {
      CHECK(std::abs(mean_counts[static_cast<size_t>(x)] - static_cast<double>(table.c1(x))) /
                static_cast<double>(table.c1(x)) <
            0.05);
    }
  }
}

TEST_CASE("noising replays bit-identically under a fixed seed") {
  Fixture f = big_fixture(20000, 300, 29);
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.4, 31337);
  NoisedBatch a = noise_bigram_kn_lm(f.seq, f.table, kn, 5);
  NoisedBatch b = noise_bigram_kn_lm(f.seq, f.table, kn, 5);
  CHECK(a.x_tilde == b.x_tilde);
  CHECK(a.y_tilde == b.y_tilde);
  CHECK(a.swap_mask == b.swap_mask);

  NoisedBatch other_stream = noise_bigram_kn_lm(f.seq, f.table, kn, 6);
  CHECK(other_stream.x_tilde != a.x_tilde);
}

TEST_CASE("bigram KN noising gates both replacements with one draw") {
  Fixture f = big_fixture(20000, 100, 37);
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.9, 99);
  TokenSequence y(f.seq.begin() + 1, f.seq.end());
  y.push_back(f.seq.back());
  NoisedBatch out = noise_bigram_kn(f.seq, y, f.table, kn, 0);
  size_t fired = 0;
  for (size_t j = 0; j < f.seq.size(); ++j) {
    if (!out.swap_mask[j]) {
      CHECK(out.x_tilde[j] == f.seq[j]);
      CHECK(out.y_tilde[j] == y[j]);
    } else {
      ++fired;
      // replacements come from the continuation proposal's support
      CHECK(f.table.left_cont(out.x_tilde[j]) > 0);
      CHECK(f.table.left_cont(out.y_tilde[j]) > 0);
    }
  }
  CHECK(fired > 0);
}

TEST_CASE("bigram KN noising rejects mismatched lengths and wrong entry point") {
  Fixture f("a b a b c");
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.4, 1);
  TokenSequence y(f.seq.begin(), f.seq.end() - 1);
  CHECK_THROWS_AS(noise_bigram_kn(f.seq, y, f.table, kn, 0), DataError);
  CHECK_THROWS_AS(noise_sequence(f.seq, f.table, kn, 0), ConfigError);
  NoisingConfig uni = NoisingConfig::for_scheme(Scheme::kUnigram, 0.4, 1);
  CHECK_THROWS_AS(noise_bigram_kn_lm(f.seq, f.table, uni, 0), ConfigError);
}

TEST_CASE("parallel pair noising: gamma=0 leaves both sides unchanged") {
  Fixture src = big_fixture(3000, 40, 41);
  Fixture tgt = big_fixture(3000, 40, 43);
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.0, 7);
  auto [s, t] = noise_parallel_pair(src.seq, tgt.seq, src.table, tgt.table, kn, 0);
  CHECK(s.x_tilde == src.seq);
  CHECK(t.x_tilde == tgt.seq);
}

TEST_CASE("parallel pair noising: source-only mode leaves the target intact") {
  Fixture src = big_fixture(3000, 40, 47);
  Fixture tgt = big_fixture(3000, 40, 53);
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.6, 7);
  auto [s, t] = noise_parallel_pair(src.seq, tgt.seq, src.table, tgt.table, kn, 2,
                                    PairSides::kSourceOnly);
  CHECK(t.x_tilde == tgt.seq);
  for (bool m : t.swap_mask) CHECK_FALSE(m);
  size_t fired = 0;
  for (bool m : s.swap_mask) fired += m;
  CHECK(fired > 0);

  // target-only is the mirror image
  auto [s2, t2] = noise_parallel_pair(src.seq, tgt.seq, src.table, tgt.table, kn, 2,
                                      PairSides::kTargetOnly);
  CHECK(s2.x_tilde == src.seq);
  size_t tgt_fired = 0;
  for (bool m : t2.swap_mask) tgt_fired += m;
  CHECK(tgt_fired > 0);
}

TEST_CASE("parallel pair noising rates track each side's own statistics") {
  Fixture src = big_fixture(100000, 300, 61);
  Fixture tgt = big_fixture(100000, 80, 67);  // different vocabulary shape
  NoisingConfig kn = NoisingConfig::for_scheme(Scheme::kBigramKn, 0.5, 1234);
  auto expected = [&kn](const Fixture& f) {
    double mean = 0.0, var = 0.0;
    for (TokenId x : f.seq) {
      double g = gamma_for(f.table, kn, x);
      mean += g;
      var += g * (1 - g);
    }
    return std::pair(mean, var);
  };
  auto [src_mean, src_var] = expected(src);
  auto [tgt_mean, tgt_var] = expected(tgt);
  auto [s, t] = noise_parallel_pair(src.seq, tgt.seq, src.table, tgt.table, kn, 0);
  double src_fired = 0, tgt_fired = 0;
  for (bool m : s.swap_mask) src_fired += m;
  for (bool m : t.swap_mask) tgt_fired += m;
  CHECK(std::abs(src_fired - src_mean) <= 3 * std::sqrt(src_var));
  CHECK(std::abs(tgt_fired - tgt_mean) <= 3 * std::sqrt(tgt_var));
  // the two sides draw from distinct sub-streams
  CHECK(s.swap_mask != t.swap_mask);
}
