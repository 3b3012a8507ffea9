#include "seedline/boost_round.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "seedline/error.hpp"
#include "seedline/hash.hpp"
#include "seedline/json_io.hpp"
#include "seedline/manifest.hpp"

namespace seedline {
namespace para {

namespace fs = std::filesystem;

GenerateResult generate_pseudo_parallel(const std::vector<Document>& docs, Lang tgt_lang,
                                        const ServiceClient& translator, int round, int beam_size) {
  GenerateResult result;
  for (const auto& doc : docs) {
    if (doc.lang == tgt_lang) {
      ++result.skipped_same_language;
      continue;
    }
    TranslateRequest req;
    req.id = doc.id;
    req.text = doc.text;
    req.src = doc.lang;
    req.tgt = tgt_lang;
    req.decode.beam_size = beam_size;
    try {
      TextResponse resp = translator.translate(req);
      SentencePair pair;
      pair.id = doc.id + "#r" + std::to_string(round);
      pair.src_lang = doc.lang;
      pair.tgt_lang = tgt_lang;
      pair.src_text = doc.text;
      pair.tgt_text = resp.text;
      pair.round = round;
      pair.provenance = Provenance::PseudoParallel;
      result.pairs.push_back(std::move(pair));
    } catch (const Error&) {
      ++result.skipped_service_failure;
    }
  }
  return result;
}

RewriteResult rewrite_pairs(const std::vector<SentencePair>& pairs, const ServiceClient& rewriter) {
  RewriteResult result;
  for (const auto& pair : pairs) {
    ParaphraseRequest req;
    req.id = pair.id;
    req.text = pair.tgt_text;
    req.lang = pair.tgt_lang;
    try {
      TextResponse resp = rewriter.paraphrase(req);
      SentencePair rewritten = pair;
      rewritten.tgt_text = resp.text;
      rewritten.provenance = Provenance::Rewritten;
      rewritten.round = pair.round + 1;
      result.pairs.push_back(std::move(rewritten));
    } catch (const Error&) {
      ++result.skipped_service_failure;
    }
  }
  return result;
}

namespace {

std::string round_dir_name(int round) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "round_%03d", round);
  return buf;
}

} // namespace

BoostRoundReport run_boost_round(const BoostRoundState& state, const BoostInputs& inputs,
                                 Lang tgt_lang, const ServiceSet& services,
                                 const PipelineConfig& config, const std::string& out_dir,
                                 const std::vector<langid::LanguageProfile>& profiles) {
  const int next_round = state.round + 1;
  BoostRoundReport report;
  report.state.round = next_round;
  report.processed = static_cast<long>(inputs.docs.size() + inputs.pairs.size());

  GenerateResult generated =
      generate_pseudo_parallel(inputs.docs, tgt_lang, services.translator, state.round);
  report.skipped += generated.skipped_same_language + generated.skipped_service_failure;

  std::vector<SentencePair> candidates = std::move(generated.pairs);
  candidates.insert(candidates.end(), inputs.pairs.begin(), inputs.pairs.end());

  if (!config.skip_rewrite) {
    RewriteResult rewritten = rewrite_pairs(candidates, services.paraphraser);
    report.skipped += rewritten.skipped_service_failure;
    candidates = std::move(rewritten.pairs);
  }

  // Alignment scoring uses a throwaway model per direction trained on this
  // round's own candidates (deterministic: candidates are ordered).
  FilterThresholds thresholds = thresholds_from_config(config);
  std::map<std::string, std::vector<SentencePair>> by_direction;
  for (const auto& pair : candidates) by_direction[pair.direction()].push_back(pair);
  std::map<std::string, AlignmentModel> models;
  if (thresholds.align_min > 0.0) {
    for (const auto& [direction, dir_pairs] : by_direction) {
      std::vector<SentencePair> trainable;
      for (const auto& p : dir_pairs) {
        if (!tokenize_for_alignment(p.src_text, p.src_lang).empty() &&
            !tokenize_for_alignment(p.tgt_text, p.tgt_lang).empty()) {
          trainable.push_back(p);
        }
      }
      if (!trainable.empty()) {
        models[direction] = train_alignment(trainable, kRoundEmIterations);
      }
    }
  }

  std::vector<SentencePair> accepted;
  for (const auto& pair : candidates) {
    auto model_it = models.find(pair.direction());
    const AlignmentModel* model = model_it == models.end() ? nullptr : &model_it->second;
    FilterVerdict verdict = filter_pair(pair, profiles, model, thresholds);
    if (verdict.accepted) {
      SentencePair out = pair;
      out.round = next_round; // shard stamp: round_{NNN} records carry round NNN
      accepted.push_back(std::move(out));
      ++report.accepted;
      report.state.counts[pair.provenance] += 1;
    } else {
      ++report.rejected;
      for (FilterReason reason : verdict.reasons) {
        report.reject_reasons[to_string(reason)] += 1;
      }
    }
  }

  // Publish atomically: everything lands in a hidden temp dir that is
  // renamed into place as the last step. A pre-existing round dir is an
  // error, never silently overwritten.
  fs::path round_path = fs::path(out_dir) / round_dir_name(next_round);
  if (fs::exists(round_path)) {
    throw Error(ErrorKind::IoError, "'" + round_path.string() + "' already exists");
  }
  fs::path tmp_path = fs::path(out_dir) / (".tmp_" + round_dir_name(next_round));
  std::error_code ec;
  fs::remove_all(tmp_path, ec);
  fs::create_directories(tmp_path);

  std::vector<std::string> shard_names;
  for (std::size_t start = 0; start < accepted.size() || start == 0; start += kShardMaxLines) {
    std::string content;
    std::size_t end = std::min(accepted.size(), start + kShardMaxLines);
    for (std::size_t i = start; i < end; ++i) {
      content += to_json_line(accepted[i]);
      content += '\n';
    }
    char name[32];
    std::snprintf(name, sizeof(name), "pairs_%03zu.jsonl", start / kShardMaxLines);
    write_file_atomic((tmp_path / name).string(), content);
    shard_names.push_back(name);
    if (accepted.empty()) break;
  }

  RunManifest manifest;
  manifest.command = "para round";
  manifest.seed = config.seed;
  manifest.config_fingerprint = config_hash(config);
  for (const auto& file : inputs.input_files) manifest.input_hashes.push_back(manifest_entry(file));
  for (const auto& name : shard_names) {
    manifest.output_hashes.push_back(name + " " + hash_file((tmp_path / name).string()));
  }
  manifest.counts["processed"] = report.processed;
  manifest.counts["accepted"] = report.accepted;
  manifest.counts["rejected"] = report.rejected;
  manifest.counts["skipped"] = report.skipped;
  for (const auto& [prov, count] : report.state.counts) {
    manifest.counts[std::string("accepted_") + to_string(prov)] = count;
  }
  for (const auto& [reason, count] : report.reject_reasons) {
    manifest.counts[std::string("rejected_") + reason] = count;
  }
  manifest.extra["round"] = std::to_string(next_round);
  manifest.extra["tgt_lang"] = std::string(tgt_lang.code());
  // comparable_json: no wall time, so identical reruns hash identically.
  write_file_atomic((tmp_path / "manifest.json").string(), manifest.comparable_json());

  fs::rename(tmp_path, round_path, ec);
  if (ec) {
    throw Error(ErrorKind::IoError,
                "publishing '" + round_path.string() + "' failed: " + ec.message());
  }

  for (const auto& name : shard_names) {
    report.state.output_shard_paths.push_back((round_path / name).string());
  }
  report.round_dir = round_path.string();
  report.manifest_path = (round_path / "manifest.json").string();
  return report;
}

} // namespace para
} // namespace seedline
