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
// JSON views of the report structures. Kept out of the core headers so the
// library itself stays dependency-free; the CLI and tests include this.

#ifndef NOISEGRAM_REPORT_JSON_HPP
#define NOISEGRAM_REPORT_JSON_HPP

#include "json.hpp"
#include "noisegram/smoothing.hpp"
#include "noisegram/verify.hpp"

namespace noisegram {

inline nlohmann::json to_json(const PerplexityReport& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["lambda"] = r.lambda;
  j["discount"] = r.discount;
  j["heldout_tokens"] = r.heldout_tokens;
  j["positions"] = r.positions;
  j["is_infinite"] = r.is_infinite;
  if (r.is_infinite) {
    j["perplexity"] = nullptr;
  } else {
    j["perplexity"] = r.perplexity;
  }
  j["zero_prob_positions"] = r.zero_prob_positions;
  return j;
}

inline nlohmann::json to_json(const EquivalenceReport& r) {
  nlohmann::json j;
  j["gamma"] = r.gamma;
  j["n_samples"] = r.n_samples;
  j["floor"] = r.floor;
  j["n_analytic_entries"] = r.n_analytic_entries;
  j["n_reported"] = r.n_reported;
  j["max_rel_error"] = r.max_rel_error;
  j["mean_rel_error"] = r.mean_rel_error;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& e : r.per_bigram) {
    rows.push_back({e.x1, e.x2, e.analytic, e.empirical, e.rel_error});
  }
  j["per_bigram"] = std::move(rows);
  return j;
}

inline nlohmann::json to_json(const KlReport& r) {
  nlohmann::json j;
  j["model"] = r.model_name;
  j["reference"] = r.reference;
  j["positions"] = r.positions;
  j["infinite_positions"] = r.infinite_positions;
  j["mean_kl"] = r.mean_kl;
  return j;
}

inline nlohmann::json to_json(const UnseenModelStats& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["zero_prob_positions"] = s.zero_prob_positions;
  j["is_infinite"] = s.is_infinite;
  if (s.is_infinite) {
    j["perplexity"] = nullptr;
  } else {
    j["perplexity"] = s.perplexity;
  }
  return j;
}

inline nlohmann::json to_json(const UnseenReport& r) {
  nlohmann::json j;
  j["heldout_positions"] = r.heldout_positions;
  j["unseen_bigram_positions"] = r.unseen_bigram_positions;
  nlohmann::json bm = nlohmann::json::array();
  for (const auto& m : r.bigram_models) bm.push_back(to_json(m));
  j["bigram_models"] = std::move(bm);
  j["has_trigrams"] = r.has_trigrams;
  if (r.has_trigrams) {
    j["unseen_trigram_positions"] = r.unseen_trigram_positions;
    nlohmann::json tm = nlohmann::json::array();
    for (const auto& m : r.trigram_models) tm.push_back(to_json(m));
    j["trigram_models"] = std::move(tm);
  }
  return j;
}

}  // namespace noisegram

#endif  // NOISEGRAM_REPORT_JSON_HPP
