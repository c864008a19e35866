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
// Count-based bigram estimators and perplexity evaluation. All estimators
// normalize seen contexts by the history total (the sum of that context's
// continuation counts); this equals c(x) everywhere except the stream-final
// token and keeps every conditional an exact distribution. Kneser-Ney is the
// interpolated form, with the continuation distribution as its lower order.

#ifndef NOISEGRAM_SMOOTHING_HPP
#define NOISEGRAM_SMOOTHING_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "noisegram/counts.hpp"
#include "noisegram/util.hpp"

namespace noisegram {

enum class EstimatorKind { kMle, kInterpolated, kAbsoluteDiscount, kKneserNey };

inline const char* to_string(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::kMle: return "mle";
    case EstimatorKind::kInterpolated: return "interpolated";
    case EstimatorKind::kAbsoluteDiscount: return "absolute_discount";
    case EstimatorKind::kKneserNey: return "kneser_ney";
  }
  return "?";
}

inline EstimatorKind estimator_from_string(const std::string& s) {
  if (s == "mle") return EstimatorKind::kMle;
  if (s == "interpolated") return EstimatorKind::kInterpolated;
  if (s == "absolute_discount" || s == "absolute-discount") return EstimatorKind::kAbsoluteDiscount;
  if (s == "kneser_ney" || s == "kneser-ney") return EstimatorKind::kKneserNey;
  throw ConfigError("unknown estimator: " + s);
}

class SmoothedModel {
 public:
  static constexpr double kDefaultDiscount = 0.75;

  SmoothedModel(EstimatorKind kind, const CountTable& table, double lambda = 0.5,
                double discount = kDefaultDiscount)
      : kind_(kind), lambda_(lambda), discount_(discount), table_(&table) {
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("smoothing: lambda must be in [0,1]");
    if (discount < 0.0 || discount >= 1.0) throw ConfigError("smoothing: discount must be in [0,1)");
    if (table.total_tokens() <= 0) throw DataError("smoothing: empty count table");
  }

  EstimatorKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  double discount() const { return discount_; }
  const CountTable& table() const { return *table_; }

  // Lower-order distribution: unigram frequency, except Kneser-Ney which
  // uses the left-continuation distribution.
  double lower_order(TokenId b) const {
    if (kind_ == EstimatorKind::kKneserNey) {
      std::int64_t types = table_->total_bigram_types();
      return types > 0 ? static_cast<double>(table_->left_cont(b)) / static_cast<double>(types)
                       : 0.0;
    }
    return static_cast<double>(table_->c1(b)) / static_cast<double>(table_->total_tokens());
  }

  // p(b | a). A context with no observed continuation backs off to the
  // model's lower-order distribution directly.
  double prob(TokenId a, TokenId b) const {
    double hist = static_cast<double>(table_->history_total(a));
    if (hist <= 0.0) return lower_order(b);
    double joint = static_cast<double>(table_->c2(a, b));
    switch (kind_) {
      case EstimatorKind::kMle:
        return joint / hist;
      case EstimatorKind::kInterpolated:
        return lambda_ * joint / hist + (1.0 - lambda_) * lower_order(b);
      case EstimatorKind::kAbsoluteDiscount:
      case EstimatorKind::kKneserNey: {
        double discounted = std::max(joint - discount_, 0.0) / hist;
        double backoff_mass =
            discount_ * static_cast<double>(table_->right_cont(a)) / hist;
        return discounted + backoff_mass * lower_order(b);
      }
    }
    return 0.0;
  }

  // Fills out[b] = p(b | a) for all b; out is resized to the vocabulary.
  // Equivalent to calling prob() per token but walks the context's count row
  // once instead of doing a map lookup per target.
  void fill_row(TokenId a, std::vector<double>& out) const {
    size_t v = static_cast<size_t>(table_->vocab_size());
    out.assign(v, 0.0);
    double hist = static_cast<double>(table_->history_total(a));
    if (hist <= 0.0) {
      for (size_t b = 0; b < v; ++b) out[b] = lower_order(static_cast<TokenId>(b));
      return;
    }
    switch (kind_) {
      case EstimatorKind::kMle:
        for (auto it = table_->row_begin(a); it != table_->row_end(a); ++it) {
          out[static_cast<size_t>(it->first.second)] = static_cast<double>(it->second) / hist;
        }
        break;
      case EstimatorKind::kInterpolated: {
        for (size_t b = 0; b < v; ++b) {
          out[b] = (1.0 - lambda_) * lower_order(static_cast<TokenId>(b));
        }
        for (auto it = table_->row_begin(a); it != table_->row_end(a); ++it) {
          out[static_cast<size_t>(it->first.second)] +=
              lambda_ * static_cast<double>(it->second) / hist;
        }
        break;
      }
      case EstimatorKind::kAbsoluteDiscount:
      case EstimatorKind::kKneserNey: {
        double backoff_mass = discount_ * static_cast<double>(table_->right_cont(a)) / hist;
        for (size_t b = 0; b < v; ++b) {
          out[b] = backoff_mass * lower_order(static_cast<TokenId>(b));
        }
        for (auto it = table_->row_begin(a); it != table_->row_end(a); ++it) {
          out[static_cast<size_t>(it->first.second)] +=
              std::max(static_cast<double>(it->second) - discount_, 0.0) / hist;
        }
        break;
      }
    }
  }

 private:
  EstimatorKind kind_;
  double lambda_;
  double discount_;
  const CountTable* table_;
};

struct PerplexityReport {
  std::string kind;
  double lambda = 0.0;
  double discount = 0.0;
  std::int64_t heldout_tokens = 0;
  std::int64_t positions = 0;  // scored prediction positions
  bool is_infinite = false;
  double perplexity = 0.0;  // meaningful only when !is_infinite
  std::vector<std::int64_t> zero_prob_positions;
};

// exp of the mean negative log probability over positions 2..T. Any zero
// probability makes the result the infinity marker, with offending positions
// recorded.
inline PerplexityReport perplexity(const SmoothedModel& model, const TokenSequence& heldout) {
  if (heldout.size() < 2) throw DataError("perplexity: held-out sequence shorter than 2 tokens");
  PerplexityReport report;
  report.kind = to_string(model.kind());
  report.lambda = model.lambda();
  report.discount = model.discount();
  report.heldout_tokens = static_cast<std::int64_t>(heldout.size());
  KahanSum neg_log;
  for (size_t t = 1; t < heldout.size(); ++t) {
    double p = model.prob(heldout[t - 1], heldout[t]);
    ++report.positions;
    if (p <= 0.0) {
      report.is_infinite = true;
      report.zero_prob_positions.push_back(static_cast<std::int64_t>(t));
    } else {
      neg_log.add(-std::log(p));
    }
  }
  if (!report.is_infinite) {
    report.perplexity = std::exp(neg_log.value() / static_cast<double>(report.positions));
  }
  return report;
}

// Grid search for the interpolation weight minimizing held-out perplexity.
// Infinite perplexity compares as +inf; ties break toward the larger lambda.
inline double fit_lambda(const CountTable& table, const TokenSequence& heldout,
                         const std::vector<double>& grid) {
  if (grid.empty()) throw ConfigError("fit_lambda: empty grid");
  double best_lambda = 0.0;
  double best_ppl = std::numeric_limits<double>::infinity();
  bool first = true;
  for (double lambda : grid) {
    SmoothedModel model(EstimatorKind::kInterpolated, table, lambda);
    PerplexityReport r = perplexity(model, heldout);
    double ppl = r.is_infinite ? std::numeric_limits<double>::infinity() : r.perplexity;
    if (first || ppl < best_ppl || (ppl == best_ppl && lambda > best_lambda)) {
      best_ppl = ppl;
      best_lambda = lambda;
      first = false;
    }
  }
  return best_lambda;
}

}  // namespace noisegram

#endif  // NOISEGRAM_SMOOTHING_HPP
