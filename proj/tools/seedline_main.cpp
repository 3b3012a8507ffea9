// seedline: corpus pipeline and training-curriculum toolkit, one subcommand
// per pipeline stage. Artifact-producing commands write a manifest beside
// their primary output; query commands print to stdout. Domain errors exit 1
// with one JSON object on stderr; usage errors exit 2.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "seedline/alignment.hpp"
#include "seedline/boost_round.hpp"
#include "seedline/bpe.hpp"
#include "seedline/config.hpp"
#include "seedline/curriculum.hpp"
#include "seedline/error.hpp"
#include "seedline/eval.hpp"
#include "seedline/hash.hpp"
#include "seedline/json_io.hpp"
#include "seedline/langid.hpp"
#include "seedline/manifest.hpp"
#include "seedline/mono.hpp"
#include "seedline/packing.hpp"
#include "seedline/para_filter.hpp"
#include "seedline/reward.hpp"
#include "seedline/types.hpp"

namespace {

using json = nlohmann::json;
using namespace seedline;

struct GlobalOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool force_stubs = false;
  std::string command_line;
};

PipelineConfig resolve_config(const GlobalOpts& opts) {
  PipelineConfig cfg = opts.config_path.empty() ? default_config() : load_config(opts.config_path);
  apply_env_overrides(cfg);
  if (opts.seed.has_value()) cfg.seed = *opts.seed;
  if (opts.force_stubs) cfg.force_stubs = true;
  return cfg;
}

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  long elapsed_ms() const {
    auto now = std::chrono::steady_clock::now();
    return std::chrono::duration_cast<std::chrono::milliseconds>(now - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

RunManifest start_manifest(const GlobalOpts& opts, const PipelineConfig& cfg) {
  RunManifest m;
  m.command = opts.command_line;
  m.seed = cfg.seed;
  m.config_fingerprint = config_hash(cfg);
  return m;
}

void finish_manifest(RunManifest& m, const std::string& path, const Stopwatch& watch) {
  m.wall_ms = watch.elapsed_ms();
  write_manifest(path, m);
}

std::string parent_dir(const std::string& path) {
  auto slash = path.find_last_of('/');
  return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

json scores_to_json(const RewardScore& score) {
  json doc;
  doc["kind"] = score.kind;
  doc["value"] = score.value;
  doc["components"] = json::object();
  for (const auto& [k, v] : score.components) doc["components"][k] = v;
  doc["metadata"] = json::object();
  for (const auto& [k, v] : score.metadata) doc["metadata"][k] = v;
  return doc;
}

std::vector<std::string> read_nonempty_lines(const std::string& path) {
  std::vector<std::string> out;
  for (auto& line : read_lines(path)) {
    if (!line.empty()) out.push_back(std::move(line));
  }
  return out;
}

// ---- langid ----------------------------------------------------------------

void add_langid(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("langid", "Character n-gram language identification");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("train", "Train per-language profiles from a document corpus");
    auto corpus = std::make_shared<std::string>();
    auto dir = std::make_shared<std::string>();
    auto alpha = std::make_shared<double>(langid::kDefaultAlpha);
    cmd->add_option("--corpus", *corpus, "documents JSONL")->required();
    cmd->add_option("--profiles-dir", *dir, "output directory")->required();
    cmd->add_option("--alpha", *alpha, "additive smoothing mass");
    cmd->callback([&opts, corpus, dir, alpha] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto docs = read_documents_jsonl(*corpus);
      std::vector<std::pair<Lang, std::string>> samples;
      samples.reserve(docs.size());
      for (const auto& doc : docs) samples.emplace_back(doc.lang, doc.text);
      auto profiles = langid::train_profiles(samples, *alpha);
      langid::save_profiles(*dir, profiles);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*corpus));
      for (const auto& p : profiles) {
        m.output_hashes.push_back(manifest_entry(*dir + "/" + std::string(p.lang.code()) + ".json"));
      }
      m.counts["documents"] = static_cast<long>(docs.size());
      m.counts["languages"] = static_cast<long>(profiles.size());
      finish_manifest(m, *dir + "/manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("classify", "Classify text lines");
    auto dir = std::make_shared<std::string>();
    auto text = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    cmd->add_option("--profiles-dir", *dir, "profile directory")->required();
    cmd->add_option("--text", *text, "classify this string");
    cmd->add_option("--input", *input, "file with one text per line");
    cmd->callback([dir, text, input] {
      auto profiles = langid::load_profiles(*dir);
      std::vector<std::string> lines;
      if (!text->empty()) lines.push_back(*text);
      if (!input->empty()) {
        auto more = read_nonempty_lines(*input);
        lines.insert(lines.end(), more.begin(), more.end());
      }
      if (lines.empty()) throw Error(ErrorKind::EmptyInput, "nothing to classify");
      for (const auto& line : lines) {
        auto result = langid::classify(line, profiles);
        std::cout << result.lang.code() << "\t" << format_real(result.confidence) << "\n";
      }
    });
  }
}

// ---- tok -------------------------------------------------------------------

void add_tok(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("tok", "Byte-level BPE tokenizer");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("train", "Train a vocabulary from raw text lines");
    auto corpus = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    auto target = std::make_shared<long>(0);
    cmd->add_option("--corpus", *corpus, "text file, one sample per line")->required();
    cmd->add_option("--vocab", *out, "output vocabulary JSON")->required();
    cmd->add_option("--target-size", *target, "total vocabulary size (default from config)");
    cmd->callback([&opts, corpus, out, target] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      std::size_t size = *target > 0 ? static_cast<std::size_t>(*target) : cfg.tokenizer_target_size;
      auto lines = read_nonempty_lines(*corpus);
      auto vocab = bpe::train_bpe(lines, size);
      bpe::save_vocab(*out, vocab);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*corpus));
      m.output_hashes.push_back(manifest_entry(*out));
      m.counts["lines"] = static_cast<long>(lines.size());
      m.counts["vocab_size"] = static_cast<long>(vocab.size());
      m.counts["merges"] = static_cast<long>(vocab.merges.size());
      finish_manifest(m, *out + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("encode", "Encode text to token ids");
    auto vocab_path = std::make_shared<std::string>();
    auto text = std::make_shared<std::string>();
    auto input = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "vocabulary JSON")->required();
    cmd->add_option("--text", *text, "encode this string");
    cmd->add_option("--input", *input, "file with one text per line");
    cmd->callback([vocab_path, text, input] {
      auto vocab = bpe::load_vocab(*vocab_path);
      std::vector<std::string> lines;
      if (!text->empty()) lines.push_back(*text);
      if (!input->empty()) {
        auto more = read_nonempty_lines(*input);
        lines.insert(lines.end(), more.begin(), more.end());
      }
      if (lines.empty()) throw Error(ErrorKind::EmptyInput, "nothing to encode");
      for (const auto& line : lines) {
        auto ids = bpe::encode(line, vocab);
        for (std::size_t i = 0; i < ids.size(); ++i) {
          if (i > 0) std::cout << ' ';
          std::cout << ids[i];
        }
        std::cout << "\n";
      }
    });
  }

  {
    auto* cmd = fam->add_subcommand("stats", "Vocabulary and compression statistics");
    auto vocab_path = std::make_shared<std::string>();
    auto corpus = std::make_shared<std::string>();
    cmd->add_option("--vocab", *vocab_path, "vocabulary JSON")->required();
    cmd->add_option("--corpus", *corpus, "text file to measure compression on");
    cmd->callback([vocab_path, corpus] {
      auto vocab = bpe::load_vocab(*vocab_path);
      json doc;
      doc["vocab_size"] = vocab.size();
      doc["target_size"] = vocab.target_size;
      doc["merges"] = vocab.merges.size();
      doc["specials"] = vocab.specials.size();
      if (!corpus->empty()) {
        auto lines = read_nonempty_lines(*corpus);
        doc["compression_rate"] = bpe::compression_rate(lines, vocab);
      }
      std::cout << doc.dump() << "\n";
    });
  }
}

// ---- mono ------------------------------------------------------------------

void add_mono(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("mono", "Monolingual quality tiering and balancing");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("tier", "Assign quality tiers");
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "documents JSONL")->required();
    cmd->add_option("--output", *output, "tiered documents JSONL")->required();
    cmd->callback([&opts, input, output] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto docs = read_documents_jsonl(*input);
      auto tiered = mono::tier_documents(docs, mono::heuristic_scorer(cfg.quality));
      write_documents_jsonl(*output, tiered);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*input));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["documents"] = static_cast<long>(tiered.size());
      for (const auto& doc : tiered) {
        m.counts[std::string("tier_") + to_string(doc.tier)] += 1;
      }
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("route", "Retain, paraphrase, or drop by tier");
    auto input = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "tiered documents JSONL")->required();
    cmd->add_option("--out-dir", *out_dir, "directory for retained/rewritten JSONL")->required();
    cmd->callback([&opts, input, out_dir] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto services = make_services(cfg);
      auto docs = read_documents_jsonl(*input);
      auto result = mono::route_by_tier(docs, services.paraphraser);
      write_documents_jsonl(*out_dir + "/retained.jsonl", result.retained);
      write_documents_jsonl(*out_dir + "/rewritten.jsonl", result.rewritten);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*input));
      m.output_hashes.push_back(manifest_entry(*out_dir + "/retained.jsonl"));
      m.output_hashes.push_back(manifest_entry(*out_dir + "/rewritten.jsonl"));
      m.counts["retained"] = static_cast<long>(result.retained.size());
      m.counts["rewritten"] = static_cast<long>(result.rewritten.size());
      m.counts["dropped"] = result.dropped_count;
      m.counts["paraphrase_failures"] = result.paraphrase_failures;
      finish_manifest(m, *out_dir + "/manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("balance", "Cap any topic tag's share of the corpus");
    auto input = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto share = std::make_shared<double>(0.0);
    cmd->add_option("--input", *input, "documents JSONL")->required();
    cmd->add_option("--output", *output, "balanced documents JSONL")->required();
    cmd->add_option("--max-share", *share, "per-tag share cap (default from config)");
    cmd->callback([&opts, input, output, share] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto docs = read_documents_jsonl(*input);
      docs = mono::filter_excluded_tags(docs, cfg.exclude_tags);
      mono::BalanceSpec spec;
      spec.max_tag_share = *share > 0.0 ? *share : cfg.max_tag_share;
      auto balanced = mono::balance_topics(docs, spec, cfg.seed);
      write_documents_jsonl(*output, balanced);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*input));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["input_documents"] = static_cast<long>(docs.size());
      m.counts["kept_documents"] = static_cast<long>(balanced.size());
      m.counts["unique_tags"] = static_cast<long>(mono::unique_tag_count(balanced));
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("report", "Per-language token counts and proportions");
    auto input = std::make_shared<std::string>();
    auto vocab_path = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "documents JSONL")->required();
    cmd->add_option("--vocab", *vocab_path, "vocabulary JSON")->required();
    cmd->callback([input, vocab_path] {
      auto docs = read_documents_jsonl(*input);
      auto vocab = bpe::load_vocab(*vocab_path);
      auto report = mono::language_token_report(docs, vocab);
      json doc = json::object();
      for (const auto& [lang, share] : report) {
        doc[std::string(lang.code())] = {{"tokens", share.token_count},
                                         {"proportion", share.proportion}};
      }
      std::cout << doc.dump() << "\n";
    });
  }
}

// ---- para ------------------------------------------------------------------

void add_para(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("para", "Parallel-pair alignment, filtering, and boost rounds");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("align-train", "Train a lexical alignment model");
    auto pairs_path = std::make_shared<std::string>();
    auto model_path = std::make_shared<std::string>();
    auto iterations = std::make_shared<int>(5);
    cmd->add_option("--pairs", *pairs_path, "sentence pairs JSONL")->required();
    cmd->add_option("--model", *model_path, "output model JSON")->required();
    cmd->add_option("--iterations", *iterations, "EM iterations");
    cmd->callback([&opts, pairs_path, model_path, iterations] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto pairs = read_pairs_jsonl(*pairs_path);
      para::TrainStats stats;
      auto model = para::train_alignment(pairs, *iterations, &stats);
      para::save_alignment(*model_path, model);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*pairs_path));
      m.output_hashes.push_back(manifest_entry(*model_path));
      m.counts["pairs"] = static_cast<long>(pairs.size());
      m.counts["iterations"] = *iterations;
      for (std::size_t i = 0; i < stats.log_likelihood_per_iteration.size(); ++i) {
        m.extra["log_likelihood_" + std::to_string(i)] =
            format_real(stats.log_likelihood_per_iteration[i]);
      }
      finish_manifest(m, *model_path + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("score", "Fill alignment scores on pairs");
    auto pairs_path = std::make_shared<std::string>();
    auto model_path = std::make_shared<std::string>();
    auto reverse_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto tau = std::make_shared<double>(-1.0);
    cmd->add_option("--pairs", *pairs_path, "sentence pairs JSONL")->required();
    cmd->add_option("--model", *model_path, "alignment model JSON")->required();
    cmd->add_option("--reverse-model", *reverse_path, "reverse-direction model JSON");
    cmd->add_option("--output", *output, "pairs JSONL with align_score set")->required();
    cmd->add_option("--tau", *tau, "per-token probability threshold (default from config)");
    cmd->callback([&opts, pairs_path, model_path, reverse_path, output, tau] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto pairs = read_pairs_jsonl(*pairs_path);
      auto model = para::load_alignment(*model_path);
      std::optional<para::AlignmentModel> reverse;
      if (!reverse_path->empty()) reverse = para::load_alignment(*reverse_path);
      double threshold = *tau >= 0.0 ? *tau : cfg.tau_align;
      for (auto& pair : pairs) {
        pair.align_score =
            para::alignment_score(pair, model, threshold, reverse ? &*reverse : nullptr);
      }
      write_pairs_jsonl(*output, pairs);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*pairs_path));
      m.input_hashes.push_back(manifest_entry(*model_path));
      if (!reverse_path->empty()) m.input_hashes.push_back(manifest_entry(*reverse_path));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["pairs"] = static_cast<long>(pairs.size());
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("filter", "Apply LID, alignment, and length-ratio checks");
    auto pairs_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto rejected_path = std::make_shared<std::string>();
    auto profiles_dir = std::make_shared<std::string>();
    auto model_path = std::make_shared<std::string>();
    cmd->add_option("--pairs", *pairs_path, "sentence pairs JSONL")->required();
    cmd->add_option("--output", *output, "accepted pairs JSONL")->required();
    cmd->add_option("--rejected", *rejected_path, "rejected ids + reasons JSONL");
    cmd->add_option("--profiles-dir", *profiles_dir, "LID profiles for confidence checks");
    cmd->add_option("--model", *model_path, "alignment model for the alignment check");
    cmd->callback([&opts, pairs_path, output, rejected_path, profiles_dir, model_path] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto pairs = read_pairs_jsonl(*pairs_path);
      std::vector<langid::LanguageProfile> profiles;
      if (!profiles_dir->empty()) profiles = langid::load_profiles(*profiles_dir);
      std::optional<para::AlignmentModel> model;
      if (!model_path->empty()) model = para::load_alignment(*model_path);
      auto thresholds = para::thresholds_from_config(cfg);

      std::vector<SentencePair> accepted;
      std::vector<std::string> rejected_lines;
      std::map<std::string, long> reasons;
      for (const auto& pair : pairs) {
        auto verdict = para::filter_pair(pair, profiles, model ? &*model : nullptr, thresholds);
        if (verdict.accepted) {
          accepted.push_back(pair);
          continue;
        }
        json line;
        line["id"] = pair.id;
        line["reasons"] = json::array();
        for (auto reason : verdict.reasons) {
          line["reasons"].push_back(para::to_string(reason));
          reasons[para::to_string(reason)] += 1;
        }
        rejected_lines.push_back(line.dump());
      }
      write_pairs_jsonl(*output, accepted);
      if (!rejected_path->empty()) {
        std::string blob;
        for (const auto& line : rejected_lines) {
          blob += line;
          blob += '\n';
        }
        write_file_atomic(*rejected_path, blob);
      }
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*pairs_path));
      m.output_hashes.push_back(manifest_entry(*output));
      if (!rejected_path->empty()) m.output_hashes.push_back(manifest_entry(*rejected_path));
      m.counts["pairs"] = static_cast<long>(pairs.size());
      m.counts["accepted"] = static_cast<long>(accepted.size());
      m.counts["rejected"] = static_cast<long>(rejected_lines.size());
      for (const auto& [reason, count] : reasons) m.counts["rejected_" + reason] = count;
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("pseudo", "Forward-translate documents into pseudo pairs");
    auto docs_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto tgt = std::make_shared<std::string>();
    auto round = std::make_shared<int>(0);
    auto beam = std::make_shared<int>(4);
    cmd->add_option("--docs", *docs_path, "documents JSONL")->required();
    cmd->add_option("--output", *output, "pairs JSONL")->required();
    cmd->add_option("--tgt", *tgt, "target language code")->required();
    cmd->add_option("--round", *round, "round stamp");
    cmd->add_option("--beam", *beam, "beam size");
    cmd->callback([&opts, docs_path, output, tgt, round, beam] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto services = make_services(cfg);
      auto docs = read_documents_jsonl(*docs_path);
      auto result =
          para::generate_pseudo_parallel(docs, Lang::lookup(*tgt), services.translator, *round, *beam);
      write_pairs_jsonl(*output, result.pairs);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*docs_path));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["documents"] = static_cast<long>(docs.size());
      m.counts["pairs"] = static_cast<long>(result.pairs.size());
      m.counts["skipped_same_language"] = result.skipped_same_language;
      m.counts["skipped_service_failure"] = result.skipped_service_failure;
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("rewrite", "Rewrite pair targets with the paraphrase service");
    auto pairs_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--pairs", *pairs_path, "sentence pairs JSONL")->required();
    cmd->add_option("--output", *output, "rewritten pairs JSONL")->required();
    cmd->callback([&opts, pairs_path, output] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto services = make_services(cfg);
      auto pairs = read_pairs_jsonl(*pairs_path);
      auto result = para::rewrite_pairs(pairs, services.paraphraser);
      write_pairs_jsonl(*output, result.pairs);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*pairs_path));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["pairs"] = static_cast<long>(result.pairs.size());
      m.counts["skipped_service_failure"] = result.skipped_service_failure;
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("round", "One weak-to-strong boost round");
    auto docs_path = std::make_shared<std::string>();
    auto pairs_path = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    auto tgt = std::make_shared<std::string>();
    auto round = std::make_shared<int>(0);
    auto profiles_dir = std::make_shared<std::string>();
    cmd->add_option("--docs", *docs_path, "monolingual documents JSONL");
    cmd->add_option("--pairs", *pairs_path, "existing pairs JSONL");
    cmd->add_option("--out-dir", *out_dir, "round output root")->required();
    cmd->add_option("--tgt", *tgt, "target language code")->required();
    cmd->add_option("--round", *round, "completed rounds so far");
    cmd->add_option("--profiles-dir", *profiles_dir, "LID profiles");
    cmd->callback([&opts, docs_path, pairs_path, out_dir, tgt, round, profiles_dir] {
      PipelineConfig cfg = resolve_config(opts);
      auto services = make_services(cfg);
      para::BoostInputs inputs;
      if (!docs_path->empty()) {
        inputs.docs = read_documents_jsonl(*docs_path);
        inputs.input_files.push_back(*docs_path);
      }
      if (!pairs_path->empty()) {
        inputs.pairs = read_pairs_jsonl(*pairs_path);
        inputs.input_files.push_back(*pairs_path);
      }
      if (inputs.docs.empty() && inputs.pairs.empty()) {
        throw Error(ErrorKind::EmptyInput, "give --docs, --pairs, or both");
      }
      std::vector<langid::LanguageProfile> profiles;
      if (!profiles_dir->empty()) profiles = langid::load_profiles(*profiles_dir);
      para::BoostRoundState state;
      state.round = *round;
      auto report = para::run_boost_round(state, inputs, Lang::lookup(*tgt), services, cfg,
                                          *out_dir, profiles);
      json doc;
      doc["round_dir"] = report.round_dir;
      doc["manifest"] = report.manifest_path;
      doc["round"] = report.state.round;
      doc["processed"] = report.processed;
      doc["accepted"] = report.accepted;
      doc["rejected"] = report.rejected;
      doc["skipped"] = report.skipped;
      doc["shards"] = report.state.output_shard_paths;
      std::cout << doc.dump() << "\n";
    });
  }
}

// ---- pack ------------------------------------------------------------------

const pack::PromptTemplate* resolve_template(const std::string& templates_path,
                                             const std::string& template_id,
                                             std::vector<pack::PromptTemplate>& storage,
                                             bool no_src_lang) {
  if (template_id.empty()) return nullptr;
  storage = templates_path.empty() ? pack::builtin_templates() : pack::load_templates(templates_path);
  for (auto& tmpl : storage) {
    if (no_src_lang) tmpl.include_src_lang = false;
  }
  return &pack::find_template(storage, template_id);
}

void add_pack(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("pack", "Delimiter formatting, prompt templates, packing");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("format", "Format pairs with a delimiter strategy");
    auto pairs_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto strategy = std::make_shared<std::string>("lang_code");
    auto template_id = std::make_shared<std::string>();
    auto templates_path = std::make_shared<std::string>();
    auto no_src = std::make_shared<bool>(false);
    cmd->add_option("--pairs", *pairs_path, "sentence pairs JSONL")->required();
    cmd->add_option("--output", *output, "formatted JSONL")->required();
    cmd->add_option("--strategy", *strategy, "sep|natural_language|language_name|lang_code");
    cmd->add_option("--template-id", *template_id, "template for natural_language");
    cmd->add_option("--templates", *templates_path, "template library JSON (default: built-ins)");
    cmd->add_flag("--no-src-lang", *no_src, "elide the source-language clause");
    cmd->callback([&opts, pairs_path, output, strategy, template_id, templates_path, no_src] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto pairs = read_pairs_jsonl(*pairs_path);
      auto strat = pack::strategy_from_string(*strategy);
      std::vector<pack::PromptTemplate> storage;
      const pack::PromptTemplate* tmpl =
          resolve_template(*templates_path, *template_id, storage, *no_src);
      std::string blob;
      for (const auto& pair : pairs) {
        auto item = pack::format_pair(pair, strat, tmpl);
        json line;
        line["id"] = pair.id;
        line["text"] = item.text;
        blob += line.dump();
        blob += '\n';
      }
      write_file_atomic(*output, blob);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*pairs_path));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["pairs"] = static_cast<long>(pairs.size());
      m.extra["strategy"] = *strategy;
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }

  {
    auto* cmd = fam->add_subcommand("render", "Render one prompt template");
    auto template_id = std::make_shared<std::string>();
    auto templates_path = std::make_shared<std::string>();
    auto src = std::make_shared<std::string>();
    auto tgt = std::make_shared<std::string>();
    auto text = std::make_shared<std::string>();
    auto no_src = std::make_shared<bool>(false);
    cmd->add_option("--template-id", *template_id, "template id")->required();
    cmd->add_option("--templates", *templates_path, "template library JSON (default: built-ins)");
    cmd->add_option("--src", *src, "source language")->required();
    cmd->add_option("--tgt", *tgt, "target language")->required();
    cmd->add_option("--text", *text, "source text")->required();
    cmd->add_flag("--no-src-lang", *no_src, "elide the source-language clause");
    cmd->callback([template_id, templates_path, src, tgt, text, no_src] {
      std::vector<pack::PromptTemplate> storage;
      const pack::PromptTemplate* tmpl = resolve_template(*templates_path, *template_id, storage, *no_src);
      std::cout << pack::render_prompt(*tmpl, Lang::lookup(*src), Lang::lookup(*tgt), *text) << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("validate-cot", "Validate chain-of-thought records");
    auto input = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "CoT records JSONL")->required();
    cmd->callback([input] {
      long line_number = 0;
      for (const auto& line : read_lines(*input)) {
        ++line_number;
        if (line.empty()) continue;
        json doc;
        try {
          doc = json::parse(line);
        } catch (const json::exception& e) {
          Error err(ErrorKind::SchemaViolation, e.what());
          err.line_number = line_number;
          throw err;
        }
        pack::CotRecord record;
        record.summary = doc.value("summary", "");
        record.translation_decision = doc.value("translation_decision", "");
        record.final_translation = doc.value("final_translation", "");
        if (doc.contains("term_notes")) {
          for (const auto& note : doc["term_notes"]) {
            if (note.is_array() && note.size() == 2) {
              record.term_notes.emplace_back(note[0].get<std::string>(), note[1].get<std::string>());
            } else {
              Error err(ErrorKind::SchemaViolation, "term_notes entries must be [term, explanation]");
              err.line_number = line_number;
              throw err;
            }
          }
        }
        json out;
        out["line"] = line_number;
        out["violations"] = json::array();
        for (auto v : pack::validate_cot(record)) out["violations"].push_back(pack::to_string(v));
        std::cout << out.dump() << "\n";
      }
    });
  }

  {
    auto* cmd = fam->add_subcommand("pack", "Format and pack pairs into bounded sequences");
    auto pairs_path = std::make_shared<std::string>();
    auto out_dir = std::make_shared<std::string>();
    auto vocab_path = std::make_shared<std::string>();
    auto strategy = std::make_shared<std::string>("lang_code");
    auto template_id = std::make_shared<std::string>();
    auto templates_path = std::make_shared<std::string>();
    auto max_len = std::make_shared<long>(0);
    auto reject_multi = std::make_shared<bool>(false);
    auto no_src = std::make_shared<bool>(false);
    cmd->add_option("--pairs", *pairs_path, "sentence pairs JSONL")->required();
    cmd->add_option("--out-dir", *out_dir, "directory for packed.jsonl + tokens.txt")->required();
    cmd->add_option("--vocab", *vocab_path, "vocabulary JSON")->required();
    cmd->add_option("--strategy", *strategy, "sep|natural_language|language_name|lang_code");
    cmd->add_option("--template-id", *template_id, "template for natural_language");
    cmd->add_option("--templates", *templates_path, "template library JSON");
    cmd->add_option("--max-seq-len", *max_len, "sequence bound (default from config)");
    cmd->add_flag("--reject-multiparallel", *reject_multi, "drop >2-direction source fan-outs");
    cmd->add_flag("--no-src-lang", *no_src, "elide the source-language clause");
    cmd->callback([&opts, pairs_path, out_dir, vocab_path, strategy, template_id, templates_path,
                   max_len, reject_multi, no_src] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto pairs = read_pairs_jsonl(*pairs_path);
      pairs = pack::reject_multiparallel(pairs, *reject_multi);
      auto vocab = bpe::load_vocab(*vocab_path);
      auto strat = pack::strategy_from_string(*strategy);
      std::vector<pack::PromptTemplate> storage;
      const pack::PromptTemplate* tmpl =
          resolve_template(*templates_path, *template_id, storage, *no_src);
      std::vector<pack::FormattedItem> items;
      items.reserve(pairs.size());
      for (const auto& pair : pairs) items.push_back(pack::format_pair(pair, strat, tmpl));
      std::size_t bound = *max_len > 0 ? static_cast<std::size_t>(*max_len) : cfg.max_seq_len;
      auto sequences = pack::pack_items(items, vocab, bound, strat);

      std::string packed_blob;
      std::string sidecar_blob;
      std::size_t total_tokens = 0;
      for (const auto& seq : sequences) {
        packed_blob += pack::packed_to_json_line(seq);
        packed_blob += '\n';
        sidecar_blob += pack::sidecar_line(seq);
        sidecar_blob += '\n';
        total_tokens += seq.token_len;
      }
      write_file_atomic(*out_dir + "/packed.jsonl", packed_blob);
      write_file_atomic(*out_dir + "/tokens.txt", sidecar_blob);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*pairs_path));
      m.input_hashes.push_back(manifest_entry(*vocab_path));
      m.output_hashes.push_back(manifest_entry(*out_dir + "/packed.jsonl"));
      m.output_hashes.push_back(manifest_entry(*out_dir + "/tokens.txt"));
      m.counts["pairs"] = static_cast<long>(pairs.size());
      m.counts["sequences"] = static_cast<long>(sequences.size());
      m.counts["tokens"] = static_cast<long>(total_tokens);
      m.extra["strategy"] = *strategy;
      m.extra["max_seq_len"] = std::to_string(bound);
      finish_manifest(m, *out_dir + "/manifest.json", watch);
    });
  }
}

// ---- curriculum ------------------------------------------------------------

curriculum::StagePlan plan_from_flag_or_config(const std::string& plan_path,
                                               const PipelineConfig& cfg) {
  if (!plan_path.empty()) return curriculum::load_stage_plan(plan_path);
  if (!cfg.curriculum_json.empty()) return curriculum::parse_stage_plan(cfg.curriculum_json);
  throw Error(ErrorKind::ConfigError, "no --plan given and the config has no curriculum section");
}

void add_curriculum(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("curriculum", "Stage plans, mixture sampling, LR schedule");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("validate", "Check a stage plan");
    auto plan_path = std::make_shared<std::string>();
    cmd->add_option("--plan", *plan_path, "stage plan JSON (default: config section)");
    cmd->callback([&opts, plan_path] {
      PipelineConfig cfg = resolve_config(opts);
      auto plan = plan_from_flag_or_config(*plan_path, cfg);
      json doc = json::array();
      for (auto violation : curriculum::validate_plan(plan)) {
        doc.push_back(curriculum::to_string(violation));
      }
      std::cout << doc.dump() << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("run", "Emit the staged token stream");
    auto plan_path = std::make_shared<std::string>();
    auto sources_dir = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto no_cycle = std::make_shared<bool>(false);
    cmd->add_option("--plan", *plan_path, "stage plan JSON (default: config section)");
    cmd->add_option("--sources-dir", *sources_dir, "directory with <source_id>.jsonl files")
        ->required();
    cmd->add_option("--output", *output, "emission manifest JSONL")->required();
    cmd->add_flag("--no-cycle", *no_cycle, "fail instead of wrapping a drained source");
    cmd->callback([&opts, plan_path, sources_dir, output, no_cycle] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto plan = plan_from_flag_or_config(*plan_path, cfg);
      auto violations = curriculum::validate_plan(plan);
      if (!violations.empty()) {
        std::string names;
        for (auto v : violations) {
          if (!names.empty()) names += ", ";
          names += curriculum::to_string(v);
        }
        throw Error(ErrorKind::ConfigError, "stage plan is invalid: " + names);
      }

      curriculum::SourceMap sources;
      std::vector<std::string> source_files;
      for (const auto& [name, mix] : plan.stages) {
        for (const auto& src : mix.sources) {
          if (sources.count(src.id) > 0) continue;
          std::string path = *sources_dir + "/" + src.id + ".jsonl";
          curriculum::SourceSequences seqs;
          long line_number = 0;
          for (const auto& line : read_lines(path)) {
            ++line_number;
            if (line.empty()) continue;
            json doc;
            try {
              doc = json::parse(line);
            } catch (const json::exception& e) {
              Error err(ErrorKind::SchemaViolation, std::string(e.what()));
              err.line_number = line_number;
              throw err;
            }
            if (!doc.is_object() || !doc.contains("token_len") ||
                !doc["token_len"].is_number_unsigned()) {
              Error err(ErrorKind::SchemaViolation, "sequence lines need integer 'token_len'");
              err.line_number = line_number;
              throw err;
            }
            seqs.items.emplace_back(doc["token_len"].get<std::size_t>(), line);
          }
          sources.emplace(src.id, std::move(seqs));
          source_files.push_back(path);
        }
      }

      auto result = curriculum::run_stages(plan, sources, cfg.seed, !*no_cycle);
      std::string blob;
      for (const auto& emission : result.emissions) {
        blob += curriculum::emission_to_json_line(emission);
        blob += '\n';
      }
      write_file_atomic(*output, blob);

      RunManifest m = start_manifest(opts, cfg);
      if (!plan_path->empty()) m.input_hashes.push_back(manifest_entry(*plan_path));
      for (const auto& path : source_files) m.input_hashes.push_back(manifest_entry(path));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["emissions"] = static_cast<long>(result.emissions.size());
      for (const auto& stage : result.stages) {
        m.counts["tokens_" + std::to_string(stage.stage_index) + "_" + stage.stage] =
            static_cast<long>(stage.tokens);
      }
      finish_manifest(m, *output + ".manifest.json", watch);

      json summary = json::array();
      for (const auto& stage : result.stages) {
        summary.push_back({{"stage", stage.stage},
                           {"stage_index", stage.stage_index},
                           {"tokens", stage.tokens},
                           {"emissions", stage.emissions},
                           {"cumulative", stage.cumulative}});
      }
      std::cout << summary.dump() << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("lr", "Evaluate the learning-rate schedule");
    auto step = std::make_shared<long>(0);
    auto peak = std::make_shared<double>(3e-4);
    auto warmup = std::make_shared<long>(2000);
    auto total = std::make_shared<long>(100000);
    auto floor_fraction = std::make_shared<double>(0.1);
    cmd->add_option("--step", *step, "step to evaluate")->required();
    cmd->add_option("--peak", *peak, "peak learning rate");
    cmd->add_option("--warmup", *warmup, "warmup steps");
    cmd->add_option("--total", *total, "total steps");
    cmd->add_option("--floor-fraction", *floor_fraction, "decay floor as a fraction of peak");
    cmd->callback([step, peak, warmup, total, floor_fraction] {
      curriculum::LrSchedule sched(*peak, *warmup, *total, *floor_fraction);
      std::cout << format_real(sched.lr_at(*step)) << "\n";
    });
  }
}

// ---- reward ----------------------------------------------------------------

void add_reward(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("reward", "Round-trip and preference rewards, selection");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("dual", "Round-trip reward for one text");
    auto text = std::make_shared<std::string>();
    auto src = std::make_shared<std::string>();
    auto tgt = std::make_shared<std::string>();
    cmd->add_option("--text", *text, "source-side text")->required();
    cmd->add_option("--src", *src, "source language")->required();
    cmd->add_option("--tgt", *tgt, "target language")->required();
    cmd->callback([&opts, text, src, tgt] {
      PipelineConfig cfg = resolve_config(opts);
      auto services = make_services(cfg);
      reward::DualOptions options;
      options.max_n = cfg.reward_max_n;
      options.beta = cfg.reward_beta;
      auto [score, record] = reward::dual_reward(*text, Lang::lookup(*src), Lang::lookup(*tgt),
                                                 services.translator, services.translator, options);
      json doc = scores_to_json(score);
      doc["b_text"] = record.b_text;
      doc["a_tilde"] = record.a_tilde;
      std::cout << doc.dump() << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("pref", "Preference scores for candidates");
    auto src_text = std::make_shared<std::string>();
    auto candidates = std::make_shared<std::vector<std::string>>();
    auto candidates_file = std::make_shared<std::string>();
    cmd->add_option("--src-text", *src_text, "source text")->required();
    cmd->add_option("--candidate", *candidates, "candidate translation (repeatable)");
    cmd->add_option("--candidates-file", *candidates_file, "file with one candidate per line");
    cmd->callback([&opts, src_text, candidates, candidates_file] {
      PipelineConfig cfg = resolve_config(opts);
      auto services = make_services(cfg);
      std::vector<std::string> cands = *candidates;
      if (!candidates_file->empty()) {
        auto more = read_nonempty_lines(*candidates_file);
        cands.insert(cands.end(), more.begin(), more.end());
      }
      auto scores = reward::preference_reward(*src_text, cands, services.scorer);
      json doc = json::array();
      for (const auto& score : scores) doc.push_back(scores_to_json(score));
      std::cout << doc.dump() << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("select", "Top-k rejection sampling over scored candidates");
    auto input = std::make_shared<std::string>();
    auto k = std::make_shared<long>(1);
    cmd->add_option("--input", *input, "JSONL with 'text' and 'value' per line")->required();
    cmd->add_option("--k", *k, "how many to keep");
    cmd->callback([input, k] {
      std::vector<std::string> texts;
      std::vector<RewardScore> scores;
      long line_number = 0;
      for (const auto& line : read_lines(*input)) {
        ++line_number;
        if (line.empty()) continue;
        json doc;
        try {
          doc = json::parse(line);
        } catch (const json::exception& e) {
          Error err(ErrorKind::SchemaViolation, std::string(e.what()));
          err.line_number = line_number;
          throw err;
        }
        if (!doc.is_object() || !doc.contains("text") || !doc.contains("value") ||
            !doc["value"].is_number()) {
          Error err(ErrorKind::SchemaViolation, "candidate lines need 'text' and numeric 'value'");
          err.line_number = line_number;
          throw err;
        }
        texts.push_back(doc["text"].get<std::string>());
        RewardScore score;
        score.value = doc["value"].get<double>();
        scores.push_back(std::move(score));
      }
      auto selected = reward::rejection_sample(texts, scores, static_cast<std::size_t>(*k));
      json doc = json::array();
      for (auto idx : selected) doc.push_back(idx);
      std::cout << doc.dump() << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("batch", "Assemble a scored rollout batch");
    auto queries_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    auto vocab_path = std::make_shared<std::string>();
    auto mode = std::make_shared<std::string>("dual");
    auto rollouts = std::make_shared<int>(0);
    cmd->add_option("--queries", *queries_path, "JSONL with id, src_text, src, tgt")->required();
    cmd->add_option("--output", *output, "batch JSONL")->required();
    cmd->add_option("--vocab", *vocab_path, "vocabulary JSON for token accounting")->required();
    cmd->add_option("--mode", *mode, "dual|preference");
    cmd->add_option("--rollouts", *rollouts, "rollouts per query (default from config)");
    cmd->callback([&opts, queries_path, output, vocab_path, mode, rollouts] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto services = make_services(cfg);
      auto vocab = bpe::load_vocab(*vocab_path);

      std::vector<reward::RolloutQuery> queries;
      long line_number = 0;
      for (const auto& line : read_lines(*queries_path)) {
        ++line_number;
        if (line.empty()) continue;
        json doc;
        try {
          doc = json::parse(line);
        } catch (const json::exception& e) {
          Error err(ErrorKind::SchemaViolation, std::string(e.what()));
          err.line_number = line_number;
          throw err;
        }
        if (!doc.is_object() || !doc.contains("id") || !doc.contains("src_text") ||
            !doc.contains("src") || !doc.contains("tgt")) {
          Error err(ErrorKind::SchemaViolation, "query lines need id, src_text, src, tgt");
          err.line_number = line_number;
          throw err;
        }
        reward::RolloutQuery query;
        query.id = doc["id"].get<std::string>();
        query.src_text = doc["src_text"].get<std::string>();
        query.src_lang = Lang::lookup(doc["src"].get<std::string>());
        query.tgt_lang = Lang::lookup(doc["tgt"].get<std::string>());
        queries.push_back(std::move(query));
      }

      reward::BatchOptions options;
      options.max_n = cfg.reward_max_n;
      options.beta = cfg.reward_beta;
      if (*mode == "dual") {
        options.mode = reward::RewardMode::Dual;
      } else if (*mode == "preference") {
        options.mode = reward::RewardMode::Preference;
      } else {
        throw Error(ErrorKind::ConfigError, "mode must be dual or preference, got '" + *mode + "'");
      }
      int per_query = *rollouts > 0 ? *rollouts : cfg.rollouts_per_query;
      const ServiceClient& aux =
          options.mode == reward::RewardMode::Dual ? services.translator : services.scorer;
      auto batch =
          reward::assemble_rollout_batch(queries, per_query, services.translator, aux, vocab, options);

      std::string blob;
      for (const auto& line : reward::rollout_batch_to_jsonl(batch)) {
        blob += line;
        blob += '\n';
      }
      write_file_atomic(*output, blob);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*queries_path));
      m.input_hashes.push_back(manifest_entry(*vocab_path));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["queries"] = static_cast<long>(queries.size());
      long candidates = 0;
      for (const auto& [id, entries] : batch.candidates) candidates += static_cast<long>(entries.size());
      m.counts["candidates"] = candidates;
      m.counts["batch_token_count"] = static_cast<long>(batch.batch_token_count);
      m.counts["rollouts_per_query"] = batch.rollouts_per_query;
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }
}

// ---- eval ------------------------------------------------------------------

void add_eval(CLI::App& app, GlobalOpts& opts) {
  auto* fam = app.add_subcommand("eval", "Direction grouping and score aggregation");
  fam->require_subcommand(1);

  {
    auto* cmd = fam->add_subcommand("categorize", "Group one translation direction");
    auto src = std::make_shared<std::string>();
    auto tgt = std::make_shared<std::string>();
    cmd->add_option("--src", *src, "source language")->required();
    cmd->add_option("--tgt", *tgt, "target language")->required();
    cmd->callback([&opts, src, tgt] {
      PipelineConfig cfg = resolve_config(opts);
      auto group = eval::categorize(Lang::lookup(*src), Lang::lookup(*tgt),
                                    cfg.chinese_centric_grouping);
      std::cout << eval::to_string(group) << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("agg", "Aggregate group columns into the overall average");
    auto row = std::make_shared<std::string>();
    auto tsv = std::make_shared<std::string>();
    auto system = std::make_shared<std::string>();
    auto metric = std::make_shared<std::string>();
    cmd->add_option("--row", *row, "JSON object with the six column values");
    cmd->add_option("--tsv", *tsv, "per-segment scores TSV");
    cmd->add_option("--system", *system, "filter TSV rows to one system");
    cmd->add_option("--metric", *metric, "filter TSV rows to one metric");
    cmd->callback([&opts, row, tsv, system, metric] {
      PipelineConfig cfg = resolve_config(opts);
      std::map<std::string, double> columns;
      if (!row->empty()) {
        json doc;
        try {
          doc = json::parse(*row);
        } catch (const json::exception& e) {
          throw Error(ErrorKind::SchemaViolation, std::string(e.what()));
        }
        if (!doc.is_object()) throw Error(ErrorKind::SchemaViolation, "row file must hold an object");
        for (auto it = doc.begin(); it != doc.end(); ++it) {
          if (!it.value().is_number()) {
            throw Error(ErrorKind::SchemaViolation, "column '" + it.key() + "' must be a number");
          }
          columns[it.key()] = it.value().get<double>();
        }
      } else if (!tsv->empty()) {
        auto segments = eval::parse_segment_scores(*tsv);
        std::vector<eval::SegmentScore> kept;
        for (const auto& seg : segments) {
          if (!system->empty() && seg.system != *system) continue;
          if (!metric->empty() && seg.metric != *metric) continue;
          kept.push_back(seg);
        }
        columns = eval::column_means(kept, cfg.chinese_centric_grouping);
      } else {
        throw Error(ErrorKind::ConfigError, "give --row or --tsv");
      }
      std::cout << format_real(eval::aggregate_groups(columns)) << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("human", "Aggregate 0-4 human scores");
    auto input = std::make_shared<std::string>();
    cmd->add_option("--input", *input, "human scores JSONL")->required();
    cmd->callback([input] {
      auto records = eval::load_human_scores(*input);
      auto agg = eval::aggregate_human(records);
      json doc;
      doc["directions"] = json::object();
      for (const auto& [direction, mean] : agg.direction_means) {
        doc["directions"][direction] = mean;
      }
      doc["overall"] = agg.overall;
      std::cout << doc.dump() << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("deduct", "Aggregate major/minor error deductions");
    auto input = std::make_shared<std::string>();
    auto w_major = std::make_shared<double>(1.0);
    auto w_minor = std::make_shared<double>(0.5);
    cmd->add_option("--input", *input, "deduction records JSONL")->required();
    cmd->add_option("--major-weight", *w_major, "deduction per major error");
    cmd->add_option("--minor-weight", *w_minor, "deduction per minor error");
    cmd->callback([input, w_major, w_minor] {
      auto records = eval::load_human_scores(*input);
      eval::DeductionWeights weights;
      weights.major = *w_major;
      weights.minor = *w_minor;
      std::cout << format_real(eval::deduction_score(records, weights)) << "\n";
    });
  }

  {
    auto* cmd = fam->add_subcommand("scorecards", "Emit rater worksheets");
    auto items_path = std::make_shared<std::string>();
    auto hyps_path = std::make_shared<std::string>();
    auto output = std::make_shared<std::string>();
    cmd->add_option("--items", *items_path, "challenge set JSONL")->required();
    cmd->add_option("--hyps", *hyps_path, "hypotheses JSONL")->required();
    cmd->add_option("--output", *output, "scorecards JSONL")->required();
    cmd->callback([&opts, items_path, hyps_path, output] {
      Stopwatch watch;
      PipelineConfig cfg = resolve_config(opts);
      auto items = eval::load_challenge_set(*items_path);
      auto hyps = eval::load_hypotheses(*hyps_path);
      auto cards = eval::emit_scorecards(items, hyps);
      std::string blob;
      for (const auto& card : cards) {
        blob += eval::scorecard_to_json_line(card);
        blob += '\n';
      }
      write_file_atomic(*output, blob);
      RunManifest m = start_manifest(opts, cfg);
      m.input_hashes.push_back(manifest_entry(*items_path));
      m.input_hashes.push_back(manifest_entry(*hyps_path));
      m.output_hashes.push_back(manifest_entry(*output));
      m.counts["items"] = static_cast<long>(items.size());
      m.counts["scorecards"] = static_cast<long>(cards.size());
      finish_manifest(m, *output + ".manifest.json", watch);
    });
  }
}

int emit_error(const Error& e) {
  json doc;
  doc["error"] = to_string(e.kind());
  doc["message"] = e.what();
  if (e.attempts > 0) doc["attempts"] = e.attempts;
  if (e.status > 0) doc["status"] = e.status;
  if (e.line_number > 0) doc["line"] = e.line_number;
  std::cerr << doc.dump() << "\n";
  return 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"seedline: translation-LLM corpus and curriculum toolkit"};
  app.require_subcommand(1);

  GlobalOpts opts;
  app.add_option("--config", opts.config_path, "pipeline config JSON")->envname("SEEDLINE_CONFIG");
  app.add_option("--seed", opts.seed, "override the config seed");
  app.add_flag("--stub", opts.force_stubs, "force in-process stub services");

  add_langid(app, opts);
  add_tok(app, opts);
  add_mono(app, opts);
  add_para(app, opts);
  add_pack(app, opts);
  add_curriculum(app, opts);
  add_reward(app, opts);
  add_eval(app, opts);

  for (int i = 0; i < argc; ++i) {
    if (i > 0) opts.command_line += ' ';
    opts.command_line += argv[i];
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help() << "\n";
    return 2;
  } catch (const Error& e) {
    return emit_error(e);
  } catch (const std::exception& e) {
    json doc;
    doc["error"] = "Internal";
    doc["message"] = e.what();
    std::cerr << doc.dump() << "\n";
    return 1;
  }
  return 0;
}
