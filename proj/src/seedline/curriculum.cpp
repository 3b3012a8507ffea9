#include "seedline/curriculum.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "seedline/error.hpp"
#include "json_detail.hpp"
#include "seedline/json_io.hpp"
#include "seedline/rng.hpp"

namespace seedline {
namespace curriculum {

namespace {

double parallel_mass(const MixtureSpec& spec) {
  double mass = 0.0;
  for (const auto& src : spec.sources) {
    if (src.kind == SourceKind::Parallel) mass += src.weight;
  }
  return mass;
}

bool has_kind(const MixtureSpec& spec, SourceKind kind) {
  for (const auto& src : spec.sources) {
    if (src.kind == kind && src.weight > 0.0) return true;
  }
  return false;
}

// Products like 3e-4 * 0.1 land one ulp away from the decimal literal a
// reader would write down. Snapping through a short decimal round trip makes
// the floor equal that literal bit-for-bit.
double snap_decimal(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", x);
  return std::strtod(buf, nullptr);
}

} // namespace

const char* to_string(SourceKind kind) {
  return kind == SourceKind::Mono ? "mono" : "parallel";
}

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "mono") return SourceKind::Mono;
  if (s == "parallel") return SourceKind::Parallel;
  throw Error(ErrorKind::SchemaViolation, "unknown source kind: " + s);
}

const char* to_string(StageName name) {
  switch (name) {
    case StageName::S1: return "S1";
    case StageName::S2: return "S2";
    case StageName::S3: return "S3";
  }
  throw Error(ErrorKind::SchemaViolation, "bad stage name value");
}

StageName stage_name_from_string(const std::string& s) {
  if (s == "S1") return StageName::S1;
  if (s == "S2") return StageName::S2;
  if (s == "S3") return StageName::S3;
  throw Error(ErrorKind::SchemaViolation, "unknown stage name: " + s);
}

const char* to_string(PlanViolation violation) {
  switch (violation) {
    case PlanViolation::StageOrder: return "stage_order";
    case PlanViolation::ParallelInS1: return "parallel_in_s1";
    case PlanViolation::MonoInS3: return "mono_in_s3";
    case PlanViolation::MissingKindInS2: return "missing_kind_in_s2";
    case PlanViolation::NonMonotoneParallelMass: return "non_monotone_parallel_mass";
  }
  throw Error(ErrorKind::SchemaViolation, "bad plan violation value");
}

void validate_mixture(const MixtureSpec& spec) {
  if (spec.sources.empty()) throw Error(ErrorKind::ConfigError, "mixture has no sources");
  if (spec.token_budget <= 0) throw Error(ErrorKind::ConfigError, "token_budget must be positive");
  double sum = 0.0;
  bool any_positive = false;
  for (const auto& src : spec.sources) {
    if (src.id.empty()) throw Error(ErrorKind::ConfigError, "mixture source with empty id");
    if (src.weight < 0.0) throw Error(ErrorKind::ConfigError, "negative weight for source " + src.id);
    if (src.weight > 0.0) any_positive = true;
    sum += src.weight;
  }
  if (!any_positive) throw Error(ErrorKind::ConfigError, "mixture has no positive weight");
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw Error(ErrorKind::ConfigError, "mixture weights sum to " + std::to_string(sum) + ", expected 1");
  }
}

void normalize_weights(MixtureSpec& spec) {
  double sum = 0.0;
  for (const auto& src : spec.sources) {
    if (src.weight < 0.0) throw Error(ErrorKind::ConfigError, "negative weight for source " + src.id);
    sum += src.weight;
  }
  if (sum <= 0.0) throw Error(ErrorKind::ConfigError, "mixture has no positive weight");
  for (auto& src : spec.sources) src.weight /= sum;
}

std::vector<PlanViolation> validate_plan(const StagePlan& plan) {
  std::vector<PlanViolation> violations;
  auto add = [&](PlanViolation v) {
    for (auto seen : violations) {
      if (seen == v) return;
    }
    violations.push_back(v);
  };

  int prev_rank = 0;
  for (const auto& [name, mix] : plan.stages) {
    int rank = name == StageName::S1 ? 1 : name == StageName::S2 ? 2 : 3;
    if (rank < prev_rank) add(PlanViolation::StageOrder);
    prev_rank = rank;

    switch (name) {
      case StageName::S1:
        if (has_kind(mix, SourceKind::Parallel)) add(PlanViolation::ParallelInS1);
        break;
      case StageName::S2:
        if (!has_kind(mix, SourceKind::Mono) || !has_kind(mix, SourceKind::Parallel)) {
          add(PlanViolation::MissingKindInS2);
        }
        break;
      case StageName::S3:
        if (has_kind(mix, SourceKind::Mono)) add(PlanViolation::MonoInS3);
        break;
    }
  }

  double prev_mass = -1.0;
  for (const auto& [name, mix] : plan.stages) {
    double mass = parallel_mass(mix);
    if (mass < prev_mass - 1e-12) add(PlanViolation::NonMonotoneParallelMass);
    prev_mass = mass;
  }
  return violations;
}

StagePlan parse_stage_plan(const std::string& json_text) {
  auto doc = detail::parse_json(json_text);
  detail::require_object(doc, "stage plan");
  detail::check_keys(doc, {"stages", "transition"}, "stage plan");
  if (doc.contains("transition")) {
    auto transition = detail::get_string(doc, "transition", "stage plan");
    if (transition != "token_budget") {
      throw Error(ErrorKind::ConfigError, "unknown transition: " + transition);
    }
  }
  if (!doc.contains("stages") || !doc["stages"].is_array() || doc["stages"].empty()) {
    throw Error(ErrorKind::ConfigError, "stage plan needs a non-empty stages array");
  }

  StagePlan plan;
  for (const auto& stage : doc["stages"]) {
    detail::require_object(stage, "stage");
    detail::check_keys(stage, {"name", "token_budget", "sources"}, "stage");
    StageName name = stage_name_from_string(detail::get_string(stage, "name", "stage"));
    MixtureSpec mix;
    mix.token_budget = detail::get_integer(stage, "token_budget", "stage");
    if (!stage.contains("sources") || !stage["sources"].is_array()) {
      throw Error(ErrorKind::ConfigError, "stage needs a sources array");
    }
    for (const auto& src : stage["sources"]) {
      detail::require_object(src, "source");
      detail::check_keys(src, {"id", "kind", "weight"}, "source");
      MixtureSource ms;
      ms.id = detail::get_string(src, "id", "source");
      ms.kind = source_kind_from_string(detail::get_string(src, "kind", "source"));
      ms.weight = detail::get_number(src, "weight", "source");
      mix.sources.push_back(std::move(ms));
    }
    normalize_weights(mix);
    validate_mixture(mix);
    plan.stages.emplace_back(name, std::move(mix));
  }
  return plan;
}

StagePlan load_stage_plan(const std::string& path) { return parse_stage_plan(read_file(path)); }

std::string stage_plan_to_json(const StagePlan& plan) {
  detail::json doc;
  doc["transition"] = "token_budget";
  doc["stages"] = detail::json::array();
  for (const auto& [name, mix] : plan.stages) {
    detail::json stage;
    stage["name"] = to_string(name);
    stage["token_budget"] = mix.token_budget;
    stage["sources"] = detail::json::array();
    for (const auto& src : mix.sources) {
      stage["sources"].push_back({{"id", src.id}, {"kind", to_string(src.kind)}, {"weight", src.weight}});
    }
    doc["stages"].push_back(std::move(stage));
  }
  return doc.dump(2) + "\n";
}

std::string sample_source(const MixtureSpec& spec, std::mt19937_64& rng) {
  double u = next_unit(rng);
  double cum = 0.0;
  const MixtureSource* last_positive = nullptr;
  for (const auto& src : spec.sources) {
    if (src.weight <= 0.0) continue;
    last_positive = &src;
    cum += src.weight;
    if (u < cum) return src.id;
  }
  if (last_positive == nullptr) throw Error(ErrorKind::ConfigError, "mixture has no positive weight");
  return last_positive->id; // u landed in the rounding slack past the last bin
}

LrSchedule::LrSchedule(double peak, long warmup_steps, long total_steps, double floor_fraction)
    : peak_(peak), warmup_steps_(warmup_steps), total_steps_(total_steps) {
  if (!(peak > 0.0)) throw Error(ErrorKind::ConfigError, "peak learning rate must be positive");
  if (warmup_steps < 0) throw Error(ErrorKind::ConfigError, "warmup_steps must be non-negative");
  if (total_steps <= warmup_steps) {
    throw Error(ErrorKind::ConfigError, "total_steps must exceed warmup_steps");
  }
  if (!(floor_fraction > 0.0) || !(floor_fraction < 1.0)) {
    throw Error(ErrorKind::ConfigError, "floor_fraction must be in (0,1)");
  }
  floor_ = snap_decimal(peak * floor_fraction);
}

double LrSchedule::lr_at(long step) const {
  if (step < 0 || step > total_steps_) {
    throw Error(ErrorKind::StepOutOfRange,
                "step " + std::to_string(step) + " outside [0," + std::to_string(total_steps_) + "]");
  }
  if (step <= warmup_steps_) {
    if (warmup_steps_ == 0) return peak_;
    return peak_ * (static_cast<double>(step) / static_cast<double>(warmup_steps_));
  }
  if (step == total_steps_) return floor_;
  double progress = static_cast<double>(step - warmup_steps_) /
                    static_cast<double>(total_steps_ - warmup_steps_);
  return floor_ + (peak_ - floor_) * (1.0 + std::cos(M_PI * progress)) / 2.0;
}

RunResult run_stages(const StagePlan& plan, const SourceMap& sources, std::uint64_t seed, bool cycle) {
  for (const auto& [name, mix] : plan.stages) {
    validate_mixture(mix);
    for (const auto& src : mix.sources) {
      auto it = sources.find(src.id);
      if (it == sources.end() || it->second.items.empty()) {
        throw Error(ErrorKind::MissingSource, "source " + src.id + " has no sequences");
      }
      for (const auto& [len, payload] : it->second.items) {
        (void)payload;
        if (len == 0) {
          throw Error(ErrorKind::ConfigError, "source " + src.id + " contains a zero-token sequence");
        }
      }
    }
  }

  auto rng = make_engine(seed);
  std::map<std::string, std::size_t> cursors;
  RunResult result;
  std::size_t cumulative = 0;

  for (std::size_t si = 0; si < plan.stages.size(); ++si) {
    const auto& [name, mix] = plan.stages[si];
    StageSummary summary;
    summary.stage = to_string(name);
    summary.stage_index = si;

    std::size_t stage_tokens = 0;
    while (stage_tokens < static_cast<std::size_t>(mix.token_budget)) {
      std::string source_id = sample_source(mix, rng);
      const auto& items = sources.at(source_id).items;
      auto& cursor = cursors[source_id];
      if (cursor >= items.size()) {
        if (!cycle) {
          throw Error(ErrorKind::ExhaustedSource,
                      "source " + source_id + " drained after " + std::to_string(cursor) + " sequences");
        }
        cursor = 0;
      }
      const auto& [len, payload] = items[cursor];
      ++cursor;
      stage_tokens += len;
      cumulative += len;

      Emission e;
      e.stage = summary.stage;
      e.stage_index = si;
      e.source_id = source_id;
      e.tokens = len;
      e.cumulative = cumulative;
      e.payload = payload;
      result.emissions.push_back(std::move(e));
      ++summary.emissions;
    }
    summary.tokens = stage_tokens;
    summary.cumulative = cumulative;
    result.stages.push_back(std::move(summary));
  }
  return result;
}

std::string emission_to_json_line(const Emission& e) {
  detail::json doc;
  doc["stage"] = e.stage;
  doc["stage_index"] = e.stage_index;
  doc["source"] = e.source_id;
  doc["tokens"] = e.tokens;
  doc["cumulative"] = e.cumulative;
  return doc.dump();
}

} // namespace curriculum
} // namespace seedline
