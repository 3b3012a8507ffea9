#pragma once

#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace seedline {
namespace curriculum {

enum class SourceKind { Mono, Parallel };

const char* to_string(SourceKind kind);
SourceKind source_kind_from_string(const std::string& s);

struct MixtureSource {
  std::string id;
  SourceKind kind = SourceKind::Mono;
  double weight = 0.0;
};

struct MixtureSpec {
  std::vector<MixtureSource> sources;
  long token_budget = 0;
};

// Throws ConfigError unless weights are non-negative, sum to 1 within 1e-9,
// at least one is positive, and token_budget > 0.
void validate_mixture(const MixtureSpec& spec);

// Scales raw non-negative weights to sum exactly to 1. ConfigError if all zero.
void normalize_weights(MixtureSpec& spec);

enum class StageName { S1, S2, S3 };

const char* to_string(StageName name);
StageName stage_name_from_string(const std::string& s);

enum class Transition { TokenBudget };

struct StagePlan {
  // Repeated consecutive names model sub-phases of one stage (weight tables
  // that step the mixture, S2 in particular).
  std::vector<std::pair<StageName, MixtureSpec>> stages;
  Transition transition = Transition::TokenBudget;
};

enum class PlanViolation {
  StageOrder,
  ParallelInS1,
  MonoInS3,
  MissingKindInS2,
  NonMonotoneParallelMass,
};

const char* to_string(PlanViolation violation);

std::vector<PlanViolation> validate_plan(const StagePlan& plan);

StagePlan parse_stage_plan(const std::string& json_text);
StagePlan load_stage_plan(const std::string& path);
std::string stage_plan_to_json(const StagePlan& plan);

std::string sample_source(const MixtureSpec& spec, std::mt19937_64& rng);

class LrSchedule {
public:
  LrSchedule(double peak = 3e-4, long warmup_steps = 2000, long total_steps = 100000,
             double floor_fraction = 0.1);

  double lr_at(long step) const;

  double peak() const { return peak_; }
  long warmup_steps() const { return warmup_steps_; }
  long total_steps() const { return total_steps_; }
  double floor() const { return floor_; }

private:
  double peak_;
  long warmup_steps_;
  long total_steps_;
  double floor_;
};

struct SourceSequences {
  // (token_len, payload). The payload travels untouched; the runner only
  // accounts tokens.
  std::vector<std::pair<std::size_t, std::string>> items;
};

using SourceMap = std::map<std::string, SourceSequences>;

struct Emission {
  std::string stage;
  std::size_t stage_index = 0;
  std::string source_id;
  std::size_t tokens = 0;
  std::size_t cumulative = 0; // across the whole run, after this emission
  std::string payload;
};

struct StageSummary {
  std::string stage;
  std::size_t stage_index = 0;
  std::size_t tokens = 0;
  std::size_t emissions = 0;
  std::size_t cumulative = 0;
};

struct RunResult {
  std::vector<Emission> emissions;
  std::vector<StageSummary> stages;
};

// Emits per stage entry until its token budget is met. Per-source cursors are
// shared across stages; with cycle=false a drained source raises
// ExhaustedSource, otherwise it wraps around.
RunResult run_stages(const StagePlan& plan, const SourceMap& sources, std::uint64_t seed,
                     bool cycle = true);

std::string emission_to_json_line(const Emission& e);

} // namespace curriculum
} // namespace seedline
