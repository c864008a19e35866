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
// noisegram command line: reproducible corpus noising and smoothing
// pipelines. Every output is a pure function of its inputs and the resolved
// configuration; reruns are byte-identical. Text outputs get a sidecar
// <output>.meta.json with the config echo and input fingerprints; JSON
// reports embed the same block inline under "run".

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "noisegram/corpus.hpp"
#include "noisegram/counts.hpp"
#include "noisegram/noising.hpp"
#include "noisegram/report_json.hpp"
#include "noisegram/rng.hpp"
#include "noisegram/smoothing.hpp"
#include "noisegram/util.hpp"
#include "noisegram/verify.hpp"

namespace {

using nlohmann::json;
using namespace noisegram;

std::string read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open input: " + path);
  std::ostringstream buf;
  buf << is.rdbuf();
  return buf.str();
}

// Content fingerprint recorded in run metadata. Keyed by input role, never
// by path, so reruns in different directories stay byte-identical.
std::string fingerprint(const std::string& path) {
  return "fnv1a:" + to_hex(fnv1a64(read_file_bytes(path)));
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open output: " + path);
  os << content;
}

void write_json_file(const std::string& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

void write_meta(const std::string& output_path, const json& run) {
  write_json_file(output_path + ".meta.json", json{{"run", run}});
}

json run_block(const std::string& command, json config, json inputs) {
  return json{{"command", command}, {"config", std::move(config)}, {"inputs", std::move(inputs)}};
}

struct EncodedCorpus {
  std::vector<TokenSequence> lines;
  std::vector<size_t> line_lengths;
  TokenSequence stream;  // concatenation
};

EncodedCorpus load_encoded(const std::string& path, const Vocabulary& vocab) {
  EncodedCorpus c;
  c.lines = encode_lines(vocab, read_token_lines(path));
  for (const auto& l : c.lines) c.line_lengths.push_back(l.size());
  c.stream = concat_lines(c.lines);
  if (c.stream.empty()) throw DataError("empty corpus: " + path);
  return c;
}

CountTable load_counts_for(const std::string& path, const Vocabulary& vocab) {
  CountTable table = CountTable::load_file(path);
  if (table.vocab_hash() != vocab.content_hash()) {
    throw DataError("counts file " + path + " was built over a different vocabulary");
  }
  return table;
}

std::string render_tokens(const std::vector<std::string>& flat,
                          const std::vector<size_t>& line_lengths) {
  std::ostringstream os;
  size_t i = 0;
  for (size_t len : line_lengths) {
    for (size_t k = 0; k < len; ++k) {
      os << flat[i++];
      os << (k + 1 == len ? '\n' : ' ');
    }
  }
  return os.str();
}

// --- noise subcommand ---------------------------------------------------------

struct NoiseFileConfig {
  Scheme scheme;
  double gamma0;
  std::uint64_t seed;
  CountMode mode;
  json echo;
};

NoiseFileConfig parse_noise_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file_bytes(path));
  } catch (const json::parse_error& e) {
    throw DataError("noising config " + path + ": " + e.what());
  }
  for (const char* field : {"scheme", "gamma0", "seed", "mode"}) {
    if (!j.contains(field)) {
      throw DataError("noising config " + path + ": missing field '" + field + "'");
    }
  }
  NoiseFileConfig c{scheme_from_string(j.at("scheme").get<std::string>()),
                    j.at("gamma0").get<double>(), j.at("seed").get<std::uint64_t>(),
                    count_mode_from_string(j.at("mode").get<std::string>()), j};
  return c;
}

std::uint64_t line_stream_index(std::uint64_t epoch, std::uint64_t line) {
  return mix_words(splitmix64(epoch), line);
}

void run_noise_lm(const std::string& corpus_path, const std::string& vocab_path,
                  const std::string& counts_path, const std::string& config_path,
                  std::int64_t epochs, const std::string& prefix) {
  Vocabulary vocab = Vocabulary::load_file(vocab_path);
  EncodedCorpus corpus = load_encoded(corpus_path, vocab);
  CountTable table = load_counts_for(counts_path, vocab);
  NoiseFileConfig file_config = parse_noise_config(config_path);
  NoisingConfig config =
      NoisingConfig::for_scheme(file_config.scheme, file_config.gamma0, file_config.seed);
  ProposalDistribution proposal = build_proposal(table, config.proposal);

  for (std::int64_t epoch = 0; epoch < epochs; ++epoch) {
    std::vector<std::string> x_out;
    std::vector<std::string> y_out;
    bool emit_target = config.scheme == Scheme::kBigramKn;
    auto emit = [&](const NoisedBatch& batch) {
      auto x = decode(vocab, batch.x_tilde);
      x_out.insert(x_out.end(), x.begin(), x.end());
      if (emit_target) {
        auto y = decode(vocab, batch.y_tilde);
        y_out.insert(y_out.end(), y.begin(), y.end());
      }
    };
    if (file_config.mode == CountMode::kContinuous) {
      std::uint64_t stream_index = static_cast<std::uint64_t>(epoch);
      if (config.scheme == Scheme::kBigramKn) {
        emit(noise_bigram_kn_lm(corpus.stream, table, proposal, config, stream_index));
      } else {
        emit(noise_sequence(corpus.stream, table, proposal, config, stream_index));
      }
    } else {
      for (size_t line = 0; line < corpus.lines.size(); ++line) {
        std::uint64_t stream_index =
            line_stream_index(static_cast<std::uint64_t>(epoch), line);
        if (config.scheme == Scheme::kBigramKn) {
          emit(noise_bigram_kn_lm(corpus.lines[line], table, proposal, config, stream_index));
        } else {
          emit(noise_sequence(corpus.lines[line], table, proposal, config, stream_index));
        }
      }
    }
    std::string epoch_path = prefix + ".epoch" + std::to_string(epoch) + ".txt";
    write_text(epoch_path, render_tokens(x_out, corpus.line_lengths));
    if (emit_target) {
      write_text(prefix + ".epoch" + std::to_string(epoch) + ".target.txt",
                 render_tokens(y_out, corpus.line_lengths));
    }
  }

  json config_echo = file_config.echo;
  config_echo["epochs"] = epochs;
  write_meta(prefix, run_block("noise", config_echo,
                               json{{"corpus", fingerprint(corpus_path)},
                                    {"vocab", fingerprint(vocab_path)},
                                    {"counts", fingerprint(counts_path)},
                                    {"noising_config", fingerprint(config_path)}}));
}

void run_noise_pair(const std::string& src_corpus, const std::string& src_vocab_path,
                    const std::string& src_counts_path, const std::string& tgt_corpus,
                    const std::string& tgt_vocab_path, const std::string& tgt_counts_path,
                    const std::string& config_path, std::int64_t epochs,
                    const std::string& prefix, const std::string& sides_name) {
  PairSides sides = PairSides::kBoth;
  if (sides_name == "source") {
    sides = PairSides::kSourceOnly;
  } else if (sides_name == "target") {
    sides = PairSides::kTargetOnly;
  } else if (sides_name != "both") {
    throw ConfigError("noise: --sides must be both|source|target");
  }

  Vocabulary sv = Vocabulary::load_file(src_vocab_path);
  Vocabulary tv = Vocabulary::load_file(tgt_vocab_path);
  EncodedCorpus src = load_encoded(src_corpus, sv);
  EncodedCorpus tgt = load_encoded(tgt_corpus, tv);
  if (src.lines.size() != tgt.lines.size()) {
    throw DataError("noise: source and target corpora have different line counts");
  }
  CountTable st = load_counts_for(src_counts_path, sv);
  CountTable tt = load_counts_for(tgt_counts_path, tv);
  NoiseFileConfig file_config = parse_noise_config(config_path);
  NoisingConfig config =
      NoisingConfig::for_scheme(file_config.scheme, file_config.gamma0, file_config.seed);
  ProposalDistribution sq = build_proposal(st, config.proposal);
  ProposalDistribution tq = build_proposal(tt, config.proposal);

  for (std::int64_t epoch = 0; epoch < epochs; ++epoch) {
    std::vector<std::string> src_out, tgt_out;
    for (size_t line = 0; line < src.lines.size(); ++line) {
      auto [s, t] = noise_parallel_pair(
          src.lines[line], tgt.lines[line], st, tt, sq, tq, config,
          line_stream_index(static_cast<std::uint64_t>(epoch), line), sides);
      auto sd = decode(sv, s.x_tilde);
      auto td = decode(tv, t.x_tilde);
      src_out.insert(src_out.end(), sd.begin(), sd.end());
      tgt_out.insert(tgt_out.end(), td.begin(), td.end());
    }
    std::string tag = ".epoch" + std::to_string(epoch);
    write_text(prefix + tag + ".source.txt", render_tokens(src_out, src.line_lengths));
    write_text(prefix + tag + ".target.txt", render_tokens(tgt_out, tgt.line_lengths));
  }

  json config_echo = file_config.echo;
  config_echo["epochs"] = epochs;
  config_echo["sides"] = sides_name;
  write_meta(prefix, run_block("noise", config_echo,
                               json{{"corpus", fingerprint(src_corpus)},
                                    {"vocab", fingerprint(src_vocab_path)},
                                    {"counts", fingerprint(src_counts_path)},
                                    {"target_corpus", fingerprint(tgt_corpus)},
                                    {"target_vocab", fingerprint(tgt_vocab_path)},
                                    {"target_counts", fingerprint(tgt_counts_path)},
                                    {"noising_config", fingerprint(config_path)}}));
}

SmoothedModel make_model(const std::string& kind, const CountTable& table, double lambda,
                         double discount) {
  return SmoothedModel(estimator_from_string(kind), table, lambda, discount);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corpus noising and n-gram smoothing toolkit"};
  app.require_subcommand(1);

  // ---- build-vocab
  auto bv = std::make_shared<std::tuple<std::string, std::int64_t, std::string>>();
  {
    auto* sc = app.add_subcommand("build-vocab", "Build a vocabulary from a tokenized corpus");
    sc->add_option("--corpus", std::get<0>(*bv), "input corpus (UTF-8, whitespace tokenized)")
        ->required();
    sc->add_option("--min-count", std::get<1>(*bv),
                   "keep tokens with frequency strictly greater than this")
        ->default_val(0);
    sc->add_option("--output", std::get<2>(*bv), "vocabulary file to write")->required();
    sc->callback([bv]() {
      const auto& [corpus, min_count, output] = *bv;
      Vocabulary v = build_vocab_lines(read_token_lines(corpus), min_count);
      v.save(output);
      write_meta(output, run_block("build-vocab",
                                   json{{"min_count", min_count}, {"vocab_size", v.size()}},
                                   json{{"corpus", fingerprint(corpus)}}));
    });
  }

  // ---- count
  struct CountArgs {
    std::string corpus, vocab, mode = "continuous", output;
    int max_order = 2;
  };
  auto ca = std::make_shared<CountArgs>();
  {
    auto* sc = app.add_subcommand("count", "Build n-gram count statistics");
    sc->add_option("--corpus", ca->corpus)->required();
    sc->add_option("--vocab", ca->vocab)->required();
    sc->add_option("--max-order", ca->max_order, "2 or 3")->default_val(2);
    sc->add_option("--mode", ca->mode, "continuous|per-line")->default_val("continuous");
    sc->add_option("--output", ca->output, "counts TSV to write")->required();
    sc->callback([ca]() {
      Vocabulary vocab = Vocabulary::load_file(ca->vocab);
      EncodedCorpus corpus = load_encoded(ca->corpus, vocab);
      CountTable table = count_ngrams(corpus.lines, vocab, ca->max_order,
                                      count_mode_from_string(ca->mode));
      table.save(ca->output);
      write_meta(ca->output,
                 run_block("count", json{{"max_order", ca->max_order}, {"mode", ca->mode}},
                           json{{"corpus", fingerprint(ca->corpus)},
                                {"vocab", fingerprint(ca->vocab)}}));
    });
  }

  // ---- noise
  struct NoiseArgs {
    std::string corpus, vocab, counts, config, prefix;
    std::string tgt_corpus, tgt_vocab, tgt_counts;
    std::string sides = "both";
    std::int64_t epochs = 1;
  };
  auto na = std::make_shared<NoiseArgs>();
  {
    auto* sc = app.add_subcommand(
        "noise", "Write noised copies of a corpus (one file set per epoch)");
    sc->add_option("--corpus", na->corpus)->required();
    sc->add_option("--vocab", na->vocab)->required();
    sc->add_option("--counts", na->counts)->required();
    sc->add_option("--config", na->config, "JSON noising config (scheme/gamma0/seed/mode)")
        ->required();
    sc->add_option("--epochs", na->epochs)->default_val(1)->check(CLI::PositiveNumber);
    sc->add_option("--output-prefix", na->prefix)->required();
    sc->add_option("--target-corpus", na->tgt_corpus,
                   "aligned target corpus (enables parallel-pair mode)");
    sc->add_option("--target-vocab", na->tgt_vocab);
    sc->add_option("--target-counts", na->tgt_counts);
    sc->add_option("--sides", na->sides, "both|source|target (parallel-pair mode)")
        ->default_val("both");
    sc->callback([na]() {
      if (na->tgt_corpus.empty()) {
        run_noise_lm(na->corpus, na->vocab, na->counts, na->config, na->epochs, na->prefix);
      } else {
        if (na->tgt_vocab.empty() || na->tgt_counts.empty()) {
          throw ConfigError("noise: parallel-pair mode needs --target-vocab and --target-counts");
        }
        run_noise_pair(na->corpus, na->vocab, na->counts, na->tgt_corpus, na->tgt_vocab,
                       na->tgt_counts, na->config, na->epochs, na->prefix, na->sides);
      }
    });
  }

  // ---- verify-equivalence
  struct VerifyArgs {
    std::string corpus, vocab, counts, output;
    double gamma = 0.25;
    std::int64_t n_samples = 2000;
    std::uint64_t seed = 0;
    double floor = 5.0;
    unsigned threads = 0;
  };
  auto va = std::make_shared<VerifyArgs>();
  {
    auto* sc = app.add_subcommand(
        "verify-equivalence",
        "Monte-Carlo vs closed-form pseudocount equivalence report");
    sc->add_option("--corpus", va->corpus)->required();
    sc->add_option("--vocab", va->vocab)->required();
    sc->add_option("--counts", va->counts, "counts built on the same corpus, continuous mode")
        ->required();
    sc->add_option("--gamma", va->gamma)->required();
    sc->add_option("--n-samples", va->n_samples)->required()->check(CLI::PositiveNumber);
    sc->add_option("--seed", va->seed)->required();
    sc->add_option("--floor", va->floor, "report relative error only above this analytic count")
        ->default_val(5.0);
    sc->add_option("--threads", va->threads, "0 = hardware default")->default_val(0);
    sc->add_option("--output", va->output)->required();
    sc->callback([va]() {
      Vocabulary vocab = Vocabulary::load_file(va->vocab);
      EncodedCorpus corpus = load_encoded(va->corpus, vocab);
      CountTable table = load_counts_for(va->counts, vocab);
      if (table.total_tokens() != static_cast<std::int64_t>(corpus.stream.size())) {
        throw DataError("verify-equivalence: counts were not built on this corpus");
      }
      PseudocountMap analytic = analytic_pseudocounts(table, va->gamma);
      PseudocountMap empirical = empirical_pseudocounts(corpus.stream, table, va->gamma,
                                                        va->n_samples, va->seed, va->threads);
      EquivalenceReport report =
          compare_pseudocounts(analytic, empirical, va->gamma, va->n_samples, va->floor,
                               corpus.stream.front());
      json out;
      out["run"] = run_block("verify-equivalence",
                             json{{"gamma", va->gamma},
                                  {"n_samples", va->n_samples},
                                  {"seed", va->seed},
                                  {"floor", va->floor}},
                             json{{"corpus", fingerprint(va->corpus)},
                                  {"vocab", fingerprint(va->vocab)},
                                  {"counts", fingerprint(va->counts)}});
      out["result"] = to_json(report);
      write_json_file(va->output, out);
    });
  }

  // ---- eval-perplexity
  struct EvalArgs {
    std::string counts, vocab, heldout, estimator = "interpolated", output;
    double lambda = 0.5;
    double discount = SmoothedModel::kDefaultDiscount;
  };
  auto ea = std::make_shared<EvalArgs>();
  {
    auto* sc = app.add_subcommand("eval-perplexity", "Held-out perplexity of an estimator");
    sc->add_option("--counts", ea->counts)->required();
    sc->add_option("--vocab", ea->vocab)->required();
    sc->add_option("--heldout", ea->heldout)->required();
    sc->add_option("--estimator", ea->estimator,
                   "mle|interpolated|absolute-discount|kneser-ney")
        ->default_val("interpolated");
    sc->add_option("--lambda", ea->lambda)->default_val(0.5);
    sc->add_option("--discount", ea->discount)->default_val(SmoothedModel::kDefaultDiscount);
    sc->add_option("--output", ea->output)->required();
    sc->callback([ea]() {
      Vocabulary vocab = Vocabulary::load_file(ea->vocab);
      CountTable table = load_counts_for(ea->counts, vocab);
      EncodedCorpus heldout = load_encoded(ea->heldout, vocab);
      SmoothedModel model = make_model(ea->estimator, table, ea->lambda, ea->discount);
      PerplexityReport report = perplexity(model, heldout.stream);
      json out;
      out["run"] = run_block("eval-perplexity",
                             json{{"estimator", ea->estimator},
                                  {"lambda", ea->lambda},
                                  {"discount", ea->discount}},
                             json{{"counts", fingerprint(ea->counts)},
                                  {"vocab", fingerprint(ea->vocab)},
                                  {"heldout", fingerprint(ea->heldout)}});
      out["result"] = to_json(report);
      write_json_file(ea->output, out);
    });
  }

  // ---- kl-report
  struct KlArgs {
    std::string counts, vocab, heldout, model = "interpolated", reference = "unigram", output;
    double lambda = 0.75;
    double discount = SmoothedModel::kDefaultDiscount;
    double eps = 1e-10;
  };
  auto ka = std::make_shared<KlArgs>();
  {
    auto* sc = app.add_subcommand(
        "kl-report", "Mean KL divergence from a model to a lower-order reference");
    sc->add_option("--counts", ka->counts)->required();
    sc->add_option("--vocab", ka->vocab)->required();
    sc->add_option("--heldout", ka->heldout)->required();
    sc->add_option("--model", ka->model,
                   "mle|interpolated|absolute-discount|kneser-ney|mle-floor")
        ->default_val("interpolated");
    sc->add_option("--lambda", ka->lambda)->default_val(0.75);
    sc->add_option("--discount", ka->discount)->default_val(SmoothedModel::kDefaultDiscount);
    sc->add_option("--eps", ka->eps, "floor added by mle-floor before renormalizing")
        ->default_val(1e-10);
    sc->add_option("--reference", ka->reference, "uniform|unigram")->default_val("unigram");
    sc->add_option("--output", ka->output)->required();
    sc->callback([ka]() {
      Vocabulary vocab = Vocabulary::load_file(ka->vocab);
      CountTable table = load_counts_for(ka->counts, vocab);
      EncodedCorpus heldout = load_encoded(ka->heldout, vocab);
      KlReference ref;
      if (ka->reference == "uniform") {
        ref = KlReference::kUniform;
      } else if (ka->reference == "unigram") {
        ref = KlReference::kUnigram;
      } else {
        throw ConfigError("kl-report: --reference must be uniform|unigram");
      }
      KlReport report;
      if (ka->model == "mle-floor") {
        report = kl_report_mle_floor(table, ka->eps, ref, heldout.stream);
      } else {
        SmoothedModel model = make_model(ka->model, table, ka->lambda, ka->discount);
        report = kl_report(model, ref, heldout.stream);
      }
      json out;
      out["run"] = run_block("kl-report",
                             json{{"model", ka->model},
                                  {"lambda", ka->lambda},
                                  {"discount", ka->discount},
                                  {"eps", ka->eps},
                                  {"reference", ka->reference}},
                             json{{"counts", fingerprint(ka->counts)},
                                  {"vocab", fingerprint(ka->vocab)},
                                  {"heldout", fingerprint(ka->heldout)}});
      out["result"] = to_json(report);
      write_json_file(ka->output, out);
    });
  }

  // ---- unseen-report
  struct UnseenArgs {
    std::string counts, vocab, heldout, train_corpus, output;
    double lambda = 0.75;
    double discount = SmoothedModel::kDefaultDiscount;
    double empirical_gamma = -1.0;  // < 0 means disabled
    std::int64_t n_samples = 2000;
    std::uint64_t seed = 0;
  };
  auto ua = std::make_shared<UnseenArgs>();
  {
    auto* sc = app.add_subcommand(
        "unseen-report", "Per-model perplexity restricted to unseen n-gram positions");
    sc->add_option("--counts", ua->counts)->required();
    sc->add_option("--vocab", ua->vocab)->required();
    sc->add_option("--heldout", ua->heldout)->required();
    sc->add_option("--lambda", ua->lambda)->default_val(0.75);
    sc->add_option("--discount", ua->discount)->default_val(SmoothedModel::kDefaultDiscount);
    sc->add_option("--empirical-gamma", ua->empirical_gamma,
                   "also score the noised-empirical estimator at this gamma (needs "
                   "--train-corpus)")
        ->default_val(-1.0);
    sc->add_option("--train-corpus", ua->train_corpus,
                   "training corpus to noise for the empirical estimator");
    sc->add_option("--n-samples", ua->n_samples)->default_val(2000);
    sc->add_option("--seed", ua->seed)->default_val(0);
    sc->add_option("--output", ua->output)->required();
    sc->callback([ua]() {
      Vocabulary vocab = Vocabulary::load_file(ua->vocab);
      CountTable table = load_counts_for(ua->counts, vocab);
      EncodedCorpus heldout = load_encoded(ua->heldout, vocab);

      SmoothedModel mle(EstimatorKind::kMle, table);
      SmoothedModel interp(EstimatorKind::kInterpolated, table, ua->lambda);
      SmoothedModel kn(EstimatorKind::kKneserNey, table, 0.5, ua->discount);
      std::vector<NamedBigramModel> models = {named_model("mle", mle),
                                              named_model("interpolated", interp),
                                              named_model("kneser_ney", kn)};
      PseudocountMap emp;
      std::optional<PseudocountModel> emp_model;
      json inputs{{"counts", fingerprint(ua->counts)},
                  {"vocab", fingerprint(ua->vocab)},
                  {"heldout", fingerprint(ua->heldout)}};
      if (ua->empirical_gamma >= 0.0) {
        if (ua->train_corpus.empty()) {
          throw ConfigError("unseen-report: --empirical-gamma needs --train-corpus");
        }
        EncodedCorpus train = load_encoded(ua->train_corpus, vocab);
        emp = empirical_pseudocounts(train.stream, table, ua->empirical_gamma, ua->n_samples,
                                     ua->seed);
        emp_model.emplace(emp, vocab.size());
        models.push_back(named_model("noised_empirical", *emp_model));
        inputs["train_corpus"] = fingerprint(ua->train_corpus);
      }
      UnseenReport report = unseen_ngram_report(table, heldout.stream, models);
      json out;
      out["run"] = run_block("unseen-report",
                             json{{"lambda", ua->lambda},
                                  {"discount", ua->discount},
                                  {"empirical_gamma", ua->empirical_gamma},
                                  {"n_samples", ua->n_samples},
                                  {"seed", ua->seed}},
                             inputs);
      out["result"] = to_json(report);
      write_json_file(ua->output, out);
    });
  }

  try {
    app.parse(argc, argv);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    std::cerr << json{{"error", e.what()}, {"kind", "usage"}}.dump() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "config"}}.dump() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "data"}}.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}, {"kind", "internal"}}.dump() << "\n";
    return 2;
  }
}
