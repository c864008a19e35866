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

#include "noisegram/smoothing.hpp"

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

}  // namespace

TEST_CASE("hand-computed probabilities on 'a b a b c'") {
  Fixture f("a b a b c");
  TokenId a = f.vocab.id_of("a"), b = f.vocab.id_of("b");

  SmoothedModel mle(EstimatorKind::kMle, f.table);
  CHECK(mle.prob(a, b) == 1.0);

  SmoothedModel interp(EstimatorKind::kInterpolated, f.table, 0.5);
  CHECK(interp.prob(a, b) == Catch::Approx(0.5 * 1.0 + 0.5 * 0.4).margin(1e-15));

  // Kneser-Ney with D = 0.75: discounted bigram + continuation backoff
  SmoothedModel kn(EstimatorKind::kKneserNey, f.table, 0.5, 0.75);
  // (2 - 0.75)/2 + 0.75 * (1/2) * (1/3)
  CHECK(kn.prob(a, b) == Catch::Approx(0.625 + 0.375 / 3.0).margin(1e-15));
  CHECK(kn.prob(a, a) == Catch::Approx(0.375 / 3.0).margin(1e-15));
}

TEST_CASE("degenerate interpolation weights") {
  Fixture f(testsupport::uniform_tokens(500, 12, 19));
  SmoothedModel mle(EstimatorKind::kMle, f.table);
  SmoothedModel lam1(EstimatorKind::kInterpolated, f.table, 1.0);
  SmoothedModel lam0(EstimatorKind::kInterpolated, f.table, 0.0);
  double total = static_cast<double>(f.table.total_tokens());
  for (TokenId a = 0; a < f.vocab.size(); ++a) {
    if (f.table.c1(a) == 0) continue;
    for (TokenId b = 0; b < f.vocab.size(); ++b) {
      CHECK(lam1.prob(a, b) == Catch::Approx(mle.prob(a, b)).margin(1e-15));
      CHECK(lam0.prob(a, b) ==
            Catch::Approx(static_cast<double>(f.table.c1(b)) / total).margin(1e-15));
    }
  }
}

TEST_CASE("every estimator normalizes per seen context") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Fixture f(testsupport::uniform_tokens(60 + 20 * seed, 8 + static_cast<int>(seed), seed));
    for (EstimatorKind kind : {EstimatorKind::kMle, EstimatorKind::kInterpolated,
                               EstimatorKind::kAbsoluteDiscount, EstimatorKind::kKneserNey}) {
      SmoothedModel model(kind, f.table, 0.4, 0.75);
      std::vector<double> row;
      for (TokenId a = 0; a < f.vocab.size(); ++a) {
        if (f.table.c1(a) == 0) continue;
        model.fill_row(a, row);
        KahanSum sum;
        for (double p : row) sum.add(p);
        CHECK(sum.value() == Catch::Approx(1.0).margin(1e-9));
      }
    }
  }
}

TEST_CASE("fill_row agrees with prob") {
  Fixture f(testsupport::zipf_tokens(2000, 30, 1.0, 7));
  for (EstimatorKind kind : {EstimatorKind::kMle, EstimatorKind::kInterpolated,
                             EstimatorKind::kAbsoluteDiscount, EstimatorKind::kKneserNey}) {
    SmoothedModel model(kind, f.table, 0.6, 0.5);
    std::vector<double> row;
    for (TokenId a : {f.seq[0], f.seq[10], Vocabulary::kBlankId}) {
      model.fill_row(a, row);
      for (TokenId b = 0; b < f.vocab.size(); ++b) {
        CHECK(row[static_cast<size_t>(b)] == Catch::Approx(model.prob(a, b)).margin(1e-14));
      }
    }
  }
}

TEST_CASE("an unseen context backs off to the lower-order distribution") {
  Fixture f("a b a b c");
  double total = static_cast<double>(f.table.total_tokens());
  TokenId blank = Vocabulary::kBlankId;  // no counts at all
  REQUIRE(f.table.history_total(blank) == 0);

  SmoothedModel mle(EstimatorKind::kMle, f.table);
  SmoothedModel kn(EstimatorKind::kKneserNey, f.table);
  for (TokenId b = 0; b < f.vocab.size(); ++b) {
    CHECK(mle.prob(blank, b) ==
          Catch::Approx(static_cast<double>(f.table.c1(b)) / total).margin(1e-15));
    CHECK(kn.prob(blank, b) ==
          Catch::Approx(static_cast<double>(f.table.left_cont(b)) /
                        static_cast<double>(f.table.total_bigram_types()))
              .margin(1e-15));
  }
}

TEST_CASE("discounting moves mass monotonically from seen bigrams to the backoff") {
  Fixture f(testsupport::zipf_tokens(3000, 200, 1.0, 3));
  TokenId a = f.seq[0];
  REQUIRE(f.table.history_total(a) > 0);
  TokenId seen = -1, unseen = -1;
  for (TokenId b = 0; b < f.vocab.size(); ++b) {
    if (f.table.c2(a, b) >= 2) seen = b;
    if (f.table.c2(a, b) == 0 && f.table.c1(b) > 0) unseen = b;
  }
  REQUIRE(seen >= 0);
  REQUIRE(unseen >= 0);
  double prev_seen = 2.0, prev_unseen = -1.0;
  for (double d : {0.1, 0.4, 0.7, 0.95}) {
    SmoothedModel ad(EstimatorKind::kAbsoluteDiscount, f.table, 0.5, d);
    double p_seen = ad.prob(a, seen);
    double p_unseen = ad.prob(a, unseen);
    CHECK(p_seen < prev_seen);
    CHECK(p_unseen > prev_unseen);
    prev_seen = p_seen;
    prev_unseen = p_unseen;
  }
}

TEST_CASE("perplexity of a uniform model equals the support size") {
  // every type equally frequent and every context row uniform at lambda=0
  Fixture f("a b c d a b c d a b c d");
  SmoothedModel lam0(EstimatorKind::kInterpolated, f.table, 0.0);
  PerplexityReport r = perplexity(lam0, f.seq);
  REQUIRE_FALSE(r.is_infinite);
  CHECK(r.perplexity == Catch::Approx(4.0).margin(1e-9));
}

TEST_CASE("mle perplexity is the infinity marker on unseen bigrams") {
  Fixture f("a b a b c");
  SmoothedModel mle(EstimatorKind::kMle, f.table);
  // (b,b) is unseen while b is a well-observed context
  TokenSequence heldout = encode(f.vocab, split_tokens("a b b a"));
  PerplexityReport r = perplexity(mle, heldout);
  CHECK(r.is_infinite);
  REQUIRE(r.zero_prob_positions.size() == 1);
  CHECK(r.zero_prob_positions[0] == 2);
}

TEST_CASE("a context seen only stream-finally backs off instead of zeroing out") {
  Fixture f("a b a b c");
  SmoothedModel mle(EstimatorKind::kMle, f.table);
  TokenId c = f.vocab.id_of("c");
  REQUIRE(f.table.c1(c) == 1);
  REQUIRE(f.table.history_total(c) == 0);
  CHECK(mle.prob(c, f.vocab.id_of("a")) == Catch::Approx(0.4).margin(1e-15));
}

TEST_CASE("perplexity matches an independent log-domain recomputation") {
  auto tokens = testsupport::zipf_tokens(4000, 50, 1.0, 13);
  std::vector<std::string> train(tokens.begin(), tokens.begin() + 3000);
  std::vector<std::string> held(tokens.begin() + 3000, tokens.end());
  Vocabulary vocab = build_vocab(train, 0);
  TokenSequence train_seq = encode(vocab, train);
  TokenSequence held_seq = encode(vocab, held);
  CountTable table = count_ngrams(train_seq, vocab, 2);
  SmoothedModel model(EstimatorKind::kInterpolated, table, 0.5);

  PerplexityReport r = perplexity(model, held_seq);
  REQUIRE_FALSE(r.is_infinite);

  // oracle: reverse-order long double accumulation
  long double acc = 0.0L;
  std::int64_t n = 0;
  for (size_t t = held_seq.size() - 1; t >= 1; --t) {
    acc += -std::log(static_cast<long double>(model.prob(held_seq[t - 1], held_seq[t])));
    ++n;
  }
  double oracle = static_cast<double>(std::exp(acc / n));
  CHECK(r.perplexity == Catch::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("perplexity rejects a held-out sequence shorter than 2 tokens") {
  Fixture f("a b a");
  SmoothedModel mle(EstimatorKind::kMle, f.table);
  CHECK_THROWS_AS(perplexity(mle, TokenSequence{f.seq[0]}), DataError);
}

TEST_CASE("parameter validation") {
  Fixture f("a b a");
  CHECK_THROWS_AS(SmoothedModel(EstimatorKind::kInterpolated, f.table, 1.5), ConfigError);
  CHECK_THROWS_AS(SmoothedModel(EstimatorKind::kKneserNey, f.table, 0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(SmoothedModel(EstimatorKind::kKneserNey, f.table, 0.5, -0.1), ConfigError);
}

TEST_CASE("fit_lambda avoids weights with infinite perplexity") {
  Fixture f("a b a b c");
  TokenSequence heldout = encode(f.vocab, split_tokens("a b b a"));  // contains unseen bigram
  CHECK(fit_lambda(f.table, heldout, {0.0, 1.0}) == 0.0);
  CHECK(fit_lambda(f.table, heldout, {0.5}) == 0.5);
}

TEST_CASE("fit_lambda reproduces the brute-force grid minimum") {
  auto tokens = testsupport::markov_tokens(6000, 60, 1.0, 0.4, 5);
  std::vector<std::string> train(tokens.begin(), tokens.begin() + 4500);
  std::vector<std::string> held(tokens.begin() + 4500, tokens.end());
  Vocabulary vocab = build_vocab(train, 1);
  TokenSequence train_seq = encode(vocab, train);
  TokenSequence held_seq = encode(vocab, held);
  CountTable table = count_ngrams(train_seq, vocab, 2);

  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);

  double best = fit_lambda(table, held_seq, grid);

  double oracle_best = -1.0, oracle_ppl = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    PerplexityReport r = perplexity(SmoothedModel(EstimatorKind::kInterpolated, table, lambda),
                                    held_seq);
    double ppl = r.is_infinite ? std::numeric_limits<double>::infinity() : r.perplexity;
    if (ppl < oracle_ppl || (ppl == oracle_ppl && lambda > oracle_best)) {
      oracle_ppl = ppl;
      oracle_best = lambda;
    }
  }
  CHECK(best == oracle_best);
  CHECK(0.0 < best);
  CHECK(best < 1.0);  // interior optimum on a real split
}
