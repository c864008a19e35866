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
// Validation of the noising <-> smoothing correspondences: closed-form
// pseudocounts versus Monte-Carlo noising, the blank-noising mixture
// identity, KL comparisons against lower-order references, and unseen-ngram
// behavior of the estimators.

#ifndef NOISEGRAM_VERIFY_HPP
#define NOISEGRAM_VERIFY_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "noisegram/counts.hpp"
#include "noisegram/noising.hpp"
#include "noisegram/rng.hpp"
#include "noisegram/smoothing.hpp"
#include "noisegram/util.hpp"

namespace noisegram {

using PseudocountMap = std::unordered_map<std::uint64_t, double>;

// Closed-form expected bigram counts under unigram noising of contexts:
//   c~(a, b) = (1 - gamma) c2(a, b) + gamma (c1(a) / T) c1(b)
// for every bigram with either term nonzero.
inline PseudocountMap analytic_pseudocounts(const CountTable& table, double gamma) {
  if (table.mode() != CountMode::kContinuous) {
    throw ConfigError("analytic_pseudocounts: count table must be built in continuous mode");
  }
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("analytic_pseudocounts: gamma not in [0,1]");
  double total = static_cast<double>(table.total_tokens());
  PseudocountMap out;
  if (gamma > 0.0) {
    std::vector<TokenId> seen;
    for (TokenId x = 0; x < table.vocab_size(); ++x) {
      if (table.c1(x) > 0) seen.push_back(x);
    }
    out.reserve(seen.size() * seen.size() + table.bigram_counts().size());
    for (TokenId a : seen) {
      double noise_mass = gamma * (static_cast<double>(table.c1(a)) / total);
      for (TokenId b : seen) {
        out.emplace(pack_bigram(a, b), noise_mass * static_cast<double>(table.c1(b)));
      }
    }
  }
  for (const auto& [key, count] : table.bigram_counts()) {
    out[pack_bigram(key.first, key.second)] += (1.0 - gamma) * static_cast<double>(count);
  }
  return out;
}

// Monte-Carlo estimate: mean bigram counts over n_samples independent
// unigram noisings of the stream. Only context positions are noised; the
// predicted token of each bigram stays unnoised. Replica r draws from the
// stream (seed, r), identically to noise_sequence on stream_index = r, so
// the outcome is reproducible and thread-count independent (per-replica
// contributions are integers and merge exactly).
inline PseudocountMap empirical_pseudocounts(const TokenSequence& seq, const CountTable& table,
                                             double gamma, std::int64_t n_samples,
                                             std::uint64_t seed, unsigned n_threads = 0) {
  if (seq.size() < 2) throw DataError("empirical_pseudocounts: sequence shorter than 2 tokens");
  if (n_samples < 1) throw ConfigError("empirical_pseudocounts: n_samples must be >= 1");
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("empirical_pseudocounts: gamma not in [0,1]");

  ProposalDistribution q = build_proposal(table, ProposalKind::kUnigramFrequency);

  using DeltaMap = std::unordered_map<std::uint64_t, std::int64_t>;
  auto run_replicas = [&](std::int64_t lo, std::int64_t hi, DeltaMap& delta) {
    for (std::int64_t r = lo; r < hi; ++r) {
      RandomStream rs(seed, static_cast<std::uint64_t>(r));
      for (size_t t = 0; t + 1 < seq.size(); ++t) {
        if (rs.uniform(t, detail::kDrawGate) < gamma) {
          TokenId swapped = q.sample(rs.uniform(t, detail::kDrawReplaceX));
          ++delta[pack_bigram(swapped, seq[t + 1])];
          --delta[pack_bigram(seq[t], seq[t + 1])];
        }
      }
    }
  };

  if (n_threads == 0) {
    n_threads = std::max(1u, std::thread::hardware_concurrency());
  }
  n_threads = static_cast<unsigned>(
      std::min<std::int64_t>(n_samples, static_cast<std::int64_t>(n_threads)));
  DeltaMap delta;
  if (n_threads <= 1) {
    run_replicas(0, n_samples, delta);
  } else {
    std::vector<DeltaMap> partial(n_threads);
    std::vector<std::thread> workers;
    std::int64_t chunk = (n_samples + n_threads - 1) / n_threads;
    for (unsigned i = 0; i < n_threads; ++i) {
      std::int64_t lo = std::min<std::int64_t>(n_samples, i * chunk);
      std::int64_t hi = std::min<std::int64_t>(n_samples, lo + chunk);
      workers.emplace_back(run_replicas, lo, hi, std::ref(partial[i]));
    }
    for (auto& w : workers) w.join();
    for (auto& part : partial) {
      for (const auto& [key, d] : part) delta[key] += d;
    }
  }

  PseudocountMap out;
  out.reserve(table.bigram_counts().size() + delta.size());
  for (size_t t = 0; t + 1 < seq.size(); ++t) {
    out[pack_bigram(seq[t], seq[t + 1])] += 1.0;
  }
  double inv_n = 1.0 / static_cast<double>(n_samples);
  for (const auto& [key, d] : delta) {
    out[key] += static_cast<double>(d) * inv_n;
  }
  return out;
}

struct EquivalenceEntry {
  TokenId x1 = 0;
  TokenId x2 = 0;
  double analytic = 0.0;
  double empirical = 0.0;
  double rel_error = 0.0;
};

struct EquivalenceReport {
  double gamma = 0.0;
  std::int64_t n_samples = 0;
  double floor = 5.0;
  std::int64_t n_analytic_entries = 0;
  std::int64_t n_reported = 0;  // entries with analytic >= floor
  std::vector<EquivalenceEntry> per_bigram;
  double max_rel_error = 0.0;
  double mean_rel_error = 0.0;
};

// Relative errors are reported only where the analytic count clears the
// floor (Monte-Carlo relative error is unbounded near zero expectations).
// `exclude_target` drops bigrams predicting the stream-initial token type,
// which the closed form cannot see (that token is never a prediction).
inline EquivalenceReport compare_pseudocounts(const PseudocountMap& analytic,
                                              const PseudocountMap& empirical, double gamma,
                                              std::int64_t n_samples, double floor,
                                              std::optional<TokenId> exclude_target = {}) {
  EquivalenceReport report;
  report.gamma = gamma;
  report.n_samples = n_samples;
  report.floor = floor;
  report.n_analytic_entries = static_cast<std::int64_t>(analytic.size());
  KahanSum err_sum;
  for (const auto& [key, expect] : analytic) {
    if (expect < floor) continue;
    TokenId x2 = bigram_second(key);
    if (exclude_target && x2 == *exclude_target) continue;
    auto it = empirical.find(key);
    double got = it == empirical.end() ? 0.0 : it->second;
    EquivalenceEntry e;
    e.x1 = bigram_first(key);
    e.x2 = x2;
    e.analytic = expect;
    e.empirical = got;
    e.rel_error = std::abs(got - expect) / expect;
    report.per_bigram.push_back(e);
    err_sum.add(e.rel_error);
    report.max_rel_error = std::max(report.max_rel_error, e.rel_error);
  }
  std::sort(report.per_bigram.begin(), report.per_bigram.end(),
            [](const EquivalenceEntry& a, const EquivalenceEntry& b) {
              return std::pair(a.x1, a.x2) < std::pair(b.x1, b.x2);
            });
  report.n_reported = static_cast<std::int64_t>(report.per_bigram.size());
  if (report.n_reported > 0) {
    report.mean_rel_error = err_sum.value() / static_cast<double>(report.n_reported);
  }
  return report;
}

// Bigram estimator induced by a pseudocount map: p(b|a) = m(a,b) / m(a,.).
class PseudocountModel {
 public:
  PseudocountModel(const PseudocountMap& counts, std::int64_t vocab_size) : counts_(&counts) {
    row_totals_.assign(static_cast<size_t>(vocab_size), 0.0);
    for (const auto& [key, value] : counts) {
      row_totals_[static_cast<size_t>(bigram_first(key))] += value;
    }
  }

  double prob(TokenId a, TokenId b) const {
    double total = row_totals_[static_cast<size_t>(a)];
    if (total <= 0.0) return 0.0;
    auto it = counts_->find(pack_bigram(a, b));
    return it == counts_->end() ? 0.0 : it->second / total;
  }

 private:
  const PseudocountMap* counts_;
  std::vector<double> row_totals_;
};

// --- Blank-noising mixture ---------------------------------------------------

// Per-subset mixture weights pi(|J|) = (1-gamma)^|J| gamma^(n-|J|) over all
// kept-index subsets J of a length-n context.
struct MixtureDecomposition {
  int context_len = 0;
  double gamma = 0.0;
  std::vector<double> weight_by_size;    // indexed by |J|
  std::vector<std::uint32_t> subsets;    // every kept-index bitmask

  double weight_of(std::uint32_t mask) const {
    return weight_by_size[static_cast<size_t>(std::popcount(mask))];
  }

  double total() const {
    KahanSum sum;
    for (std::uint32_t mask : subsets) sum.add(weight_of(mask));
    return sum.value();
  }
};

inline MixtureDecomposition mixture_weights(int context_len, double gamma) {
  constexpr int kMaxContext = 20;
  if (context_len < 0 || context_len > kMaxContext) {
    throw ConfigError("mixture_weights: context length must be in [0," +
                      std::to_string(kMaxContext) + "]");
  }
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("mixture_weights: gamma not in [0,1]");
  MixtureDecomposition d;
  d.context_len = context_len;
  d.gamma = gamma;
  d.weight_by_size.resize(static_cast<size_t>(context_len) + 1);
  for (int k = 0; k <= context_len; ++k) {
    d.weight_by_size[static_cast<size_t>(k)] =
        std::pow(1.0 - gamma, k) * std::pow(gamma, context_len - k);
  }
  std::uint32_t n_subsets = 1u << context_len;
  d.subsets.resize(n_subsets);
  for (std::uint32_t mask = 0; mask < n_subsets; ++mask) d.subsets[mask] = mask;
  return d;
}

// Marginal count models over trigram positions, conditioning on blanked
// contexts. Blanking a context slot marginalizes it out; the gamma factors
// cancel in the conditional, so these are plain count ratios.
class TrigramBlankModels {
 public:
  explicit TrigramBlankModels(const CountTable& table) {
    if (table.max_order() < 3) {
      throw ConfigError("blank mixture: count table lacks trigram counts (need max_order=3)");
    }
    for (const auto& [key, count] : table.trigram_counts()) {
      ctx12_total_[{key[0], key[1]}] += count;
      skip13_[{key[0], key[2]}] += count;
      ctx1_total_[key[0]] += count;
      pair23_[{key[1], key[2]}] += count;
      ctx2_total_[key[1]] += count;
      target_[key[2]] += count;
      total_ += count;
    }
    table_ = &table;
  }

  // p(x3 | x1, x2); throws if the context never occurs.
  double full(TokenId x1, TokenId x2, TokenId x3) const {
    auto it = ctx12_total_.find({x1, x2});
    if (it == ctx12_total_.end() || it->second == 0) {
      throw DataError("blank mixture: unseen trigram context (" + std::to_string(x1) + ", " +
                      std::to_string(x2) + ")");
    }
    return static_cast<double>(table_->c3(x1, x2, x3)) / static_cast<double>(it->second);
  }

  // p(x3 | x1, <blank>)
  double blank_second(TokenId x1, TokenId x3) const {
    auto den = ctx1_total_.find(x1);
    if (den == ctx1_total_.end() || den->second == 0) {
      throw DataError("blank mixture: token " + std::to_string(x1) +
                      " never opens a trigram context");
    }
    auto num = skip13_.find({x1, x3});
    return (num == skip13_.end() ? 0.0 : static_cast<double>(num->second)) /
           static_cast<double>(den->second);
  }

  // p(x3 | <blank>, x2)
  double blank_first(TokenId x2, TokenId x3) const {
    auto den = ctx2_total_.find(x2);
    if (den == ctx2_total_.end() || den->second == 0) {
      throw DataError("blank mixture: token " + std::to_string(x2) +
                      " never fills the second trigram slot");
    }
    auto num = pair23_.find({x2, x3});
    return (num == pair23_.end() ? 0.0 : static_cast<double>(num->second)) /
           static_cast<double>(den->second);
  }

  // p(x3 | <blank>, <blank>)
  double blank_both(TokenId x3) const {
    auto num = target_.find(x3);
    return total_ == 0 ? 0.0
                       : (num == target_.end() ? 0.0 : static_cast<double>(num->second)) /
                             static_cast<double>(total_);
  }

 private:
  const CountTable* table_ = nullptr;
  std::map<std::pair<TokenId, TokenId>, std::int64_t> ctx12_total_;
  std::map<std::pair<TokenId, TokenId>, std::int64_t> skip13_;
  std::map<TokenId, std::int64_t> ctx1_total_;
  std::map<std::pair<TokenId, TokenId>, std::int64_t> pair23_;
  std::map<TokenId, std::int64_t> ctx2_total_;
  std::map<TokenId, std::int64_t> target_;
  std::int64_t total_ = 0;
};

struct BlankMixtureResult {
  double lhs = 0.0;  // exhaustive enumeration over the four blank patterns
  double rhs = 0.0;  // pi-weighted combination of the context-marginal models
};

// Checks the trigram blank-noising identity for one (x1, x2, x3):
//   E over blank patterns of p(x3 | pattern(x1, x2))
//     = pi(2) p(x3|x1,x2) + pi(1) p(x3|x1,_) + pi(1) p(x3|_,x2) + pi(0) p(x3|_,_)
// with pi(i) = (1-gamma)^i gamma^(2-i). Both sides agree to float tolerance.
inline BlankMixtureResult blank_mixture_exact(const TrigramBlankModels& models, TokenId x1,
                                              TokenId x2, TokenId x3, double gamma) {
  if (gamma < 0.0 || gamma > 1.0) throw ConfigError("blank_mixture_exact: gamma not in [0,1]");
  auto pattern_prob = [&](bool keep1, bool keep2) {
    if (keep1 && keep2) return models.full(x1, x2, x3);
    if (keep1) return models.blank_second(x1, x3);
    if (keep2) return models.blank_first(x2, x3);
    return models.blank_both(x3);
  };

  BlankMixtureResult r;
  KahanSum lhs;
  for (std::uint32_t mask = 0; mask < 4; ++mask) {
    bool keep1 = (mask & 1u) != 0;
    bool keep2 = (mask & 2u) != 0;
    double w = (keep1 ? 1.0 - gamma : gamma) * (keep2 ? 1.0 - gamma : gamma);
    lhs.add(w * pattern_prob(keep1, keep2));
  }
  r.lhs = lhs.value();

  auto pi = [gamma](int i) { return std::pow(1.0 - gamma, i) * std::pow(gamma, 2 - i); };
  KahanSum rhs;
  rhs.add(pi(2) * models.full(x1, x2, x3));
  rhs.add(pi(1) * models.blank_second(x1, x3));
  rhs.add(pi(1) * models.blank_first(x2, x3));
  rhs.add(pi(0) * models.blank_both(x3));
  r.rhs = rhs.value();
  return r;
}

inline BlankMixtureResult blank_mixture_exact(const CountTable& table, TokenId x1, TokenId x2,
                                              TokenId x3, double gamma) {
  return blank_mixture_exact(TrigramBlankModels(table), x1, x2, x3, gamma);
}

// --- KL to lower-order references --------------------------------------------

enum class KlReference { kUniform, kUnigram };

inline const char* to_string(KlReference r) {
  return r == KlReference::kUniform ? "uniform" : "unigram";
}

struct KlReport {
  std::string model_name;
  std::string reference;
  std::int64_t positions = 0;           // held-out prediction positions
  std::int64_t infinite_positions = 0;  // excluded from the mean
  double mean_kl = 0.0;
};

namespace detail {

using RowFiller = std::function<void(TokenId, std::vector<double>&)>;

inline KlReport kl_report_impl(const std::string& model_name, const RowFiller& fill_row,
                               const CountTable& table, KlReference ref,
                               const TokenSequence& heldout) {
  if (heldout.size() < 2) throw DataError("kl_report: held-out sequence shorter than 2 tokens");
  size_t v = static_cast<size_t>(table.vocab_size());
  std::vector<double> reference(v, 0.0);
  if (ref == KlReference::kUniform) {
    std::fill(reference.begin(), reference.end(), 1.0 / static_cast<double>(v));
  } else {
    double total = static_cast<double>(table.total_tokens());
    for (size_t b = 0; b < v; ++b) {
      reference[b] = static_cast<double>(table.c1(static_cast<TokenId>(b))) / total;
    }
  }

  struct CachedKl {
    double kl = 0.0;
    bool infinite = false;
  };
  std::unordered_map<TokenId, CachedKl> cache;
  std::vector<double> row;
  KlReport report;
  report.model_name = model_name;
  report.reference = to_string(ref);
  KahanSum kl_sum;
  for (size_t t = 1; t < heldout.size(); ++t) {
    TokenId a = heldout[t - 1];
    auto it = cache.find(a);
    if (it == cache.end()) {
      fill_row(a, row);
      CachedKl entry;
      KahanSum s;
      for (size_t b = 0; b < v; ++b) {
        double p = row[b];
        if (p <= 0.0) continue;
        if (reference[b] <= 0.0) {
          entry.infinite = true;
          break;
        }
        s.add(p * std::log(p / reference[b]));
      }
      entry.kl = s.value();
      it = cache.emplace(a, entry).first;
    }
    ++report.positions;
    if (it->second.infinite) {
      ++report.infinite_positions;
    } else {
      kl_sum.add(it->second.kl);
    }
  }
  std::int64_t counted = report.positions - report.infinite_positions;
  if (counted > 0) report.mean_kl = kl_sum.value() / static_cast<double>(counted);
  return report;
}

}  // namespace detail

inline KlReport kl_report(const SmoothedModel& model, KlReference ref,
                          const TokenSequence& heldout) {
  return detail::kl_report_impl(
      to_string(model.kind()),
      [&model](TokenId a, std::vector<double>& row) { model.fill_row(a, row); }, model.table(),
      ref, heldout);
}

// MLE with an epsilon floor over the unigram support, renormalized. The raw
// MLE has zero-mass entries whose KL against the unigram reference is
// infinite; the floor makes the directional comparison well-defined.
inline KlReport kl_report_mle_floor(const CountTable& table, double eps, KlReference ref,
                                    const TokenSequence& heldout) {
  SmoothedModel mle(EstimatorKind::kMle, table);
  auto fill = [&table, &mle, eps](TokenId a, std::vector<double>& row) {
    mle.fill_row(a, row);
    double z = 0.0;
    for (size_t b = 0; b < row.size(); ++b) {
      if (table.c1(static_cast<TokenId>(b)) > 0) {
        row[b] += eps;
        z += row[b];
      } else {
        row[b] = 0.0;
      }
    }
    for (auto& p : row) p /= z;
  };
  return detail::kl_report_impl("mle_floor", fill, table, ref, heldout);
}

// --- Unseen n-gram behavior ---------------------------------------------------

struct NamedBigramModel {
  std::string name;
  std::function<double(TokenId, TokenId)> prob;
};

inline NamedBigramModel named_model(std::string name, const SmoothedModel& model) {
  return {std::move(name),
          [&model](TokenId a, TokenId b) { return model.prob(a, b); }};
}

inline NamedBigramModel named_model(std::string name, const PseudocountModel& model) {
  return {std::move(name),
          [&model](TokenId a, TokenId b) { return model.prob(a, b); }};
}

struct UnseenModelStats {
  std::string name;
  std::int64_t zero_prob_positions = 0;
  bool is_infinite = false;
  double perplexity = 0.0;
};

struct UnseenReport {
  std::int64_t heldout_positions = 0;
  std::int64_t unseen_bigram_positions = 0;
  std::vector<UnseenModelStats> bigram_models;
  bool has_trigrams = false;
  std::int64_t unseen_trigram_positions = 0;
  std::vector<UnseenModelStats> trigram_models;
};

namespace detail {

inline std::vector<UnseenModelStats> score_positions(const std::vector<NamedBigramModel>& models,
                                                     const TokenSequence& heldout,
                                                     const std::vector<size_t>& positions) {
  std::vector<UnseenModelStats> out;
  for (const auto& m : models) {
    UnseenModelStats stats;
    stats.name = m.name;
    KahanSum neg_log;
    for (size_t t : positions) {
      double p = m.prob(heldout[t - 1], heldout[t]);
      if (p <= 0.0) {
        stats.is_infinite = true;
        ++stats.zero_prob_positions;
      } else {
        neg_log.add(-std::log(p));
      }
    }
    if (!stats.is_infinite && !positions.empty()) {
      stats.perplexity = std::exp(neg_log.value() / static_cast<double>(positions.size()));
    }
    out.push_back(std::move(stats));
  }
  return out;
}

}  // namespace detail

// Restricts perplexity to held-out positions whose bigram (and, when trigram
// counts exist, trigram) was never seen in training. Models still score the
// final token given its bigram context at those positions.
inline UnseenReport unseen_ngram_report(const CountTable& train, const TokenSequence& heldout,
                                        const std::vector<NamedBigramModel>& models) {
  if (heldout.size() < 2) throw DataError("unseen_ngram_report: held-out shorter than 2 tokens");
  UnseenReport report;
  report.heldout_positions = static_cast<std::int64_t>(heldout.size()) - 1;
  std::vector<size_t> unseen_bigram;
  std::vector<size_t> unseen_trigram;
  report.has_trigrams = train.max_order() >= 3;
  for (size_t t = 1; t < heldout.size(); ++t) {
    if (train.c2(heldout[t - 1], heldout[t]) == 0) unseen_bigram.push_back(t);
    if (report.has_trigrams && t >= 2 &&
        train.c3(heldout[t - 2], heldout[t - 1], heldout[t]) == 0) {
      unseen_trigram.push_back(t);
    }
  }
  report.unseen_bigram_positions = static_cast<std::int64_t>(unseen_bigram.size());
  report.bigram_models = detail::score_positions(models, heldout, unseen_bigram);
  if (report.has_trigrams) {
    report.unseen_trigram_positions = static_cast<std::int64_t>(unseen_trigram.size());
    report.trigram_models = detail::score_positions(models, heldout, unseen_trigram);
  }
  return report;
}

}  // namespace noisegram

#endif  // NOISEGRAM_VERIFY_HPP
