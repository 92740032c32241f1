#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tbw/attack_sim.hpp"
#include "tbw/detector.hpp"
#include "tbw/kgw.hpp"
#include "tbw/metrics.hpp"
#include "tbw/partition.hpp"
#include "tbw/toy_lm.hpp"

namespace tbw {

enum class NegativePool { generated, corpus };

struct NamedAttack {
  std::string name;
  AttackConfig config;  // rng_seed is replaced by the per-cell seed
};

// "none" for the identity configuration, otherwise "lex<r>_ord<r>".
std::string attack_name(double lexical_rate, double order_rate);

/// Cross product of the two rate lists at a shared neighbour floor.
std::vector<NamedAttack> attack_grid(const std::vector<double>& lexical_rates,
                                     const std::vector<double>& order_rates,
                                     double neighbor_floor);

struct ExperimentSettings {
  WatermarkParams watermark;
  KgwParams kgw;
  std::vector<DetectionScheme> schemes{DetectionScheme::tbw, DetectionScheme::kgw};
  std::vector<NamedAttack> attacks{{"none", {}}};
  std::size_t sample_count = 100;
  std::size_t sample_length = 200;
  std::uint64_t master_seed = 0;
  double temperature = 1.0;
  std::size_t top_k = kDefaultTopK;
  NegativePool negative_pool = NegativePool::generated;
  std::size_t jobs = 1;
};

struct PromptPair {
  std::string prompt;      // fed to the generator
  std::string submission;  // paired text for TBW topic recovery
};

/// Read-only resources shared by every cell.
struct ExperimentInputs {
  const EmbeddingTable* table = nullptr;
  const TopicSet* topics = nullptr;
  const GreenListPartition* partition = nullptr;
  const ToyLM* lm = nullptr;
  std::vector<PromptPair> prompts;
  // Human-written negatives, used when negative_pool == corpus.
  std::vector<std::string> human_texts;
};

struct SampleFailure {
  std::string text_id;
  std::string error;
};

struct CellResult {
  std::size_t cell_index = 0;
  DetectionScheme scheme = DetectionScheme::tbw;
  NamedAttack attack;
  NegativePool negative_pool = NegativePool::generated;
  bool ok = false;
  std::string error;
  MetricsSummary metrics;
  double mean_pos_z = 0.0;
  RocCurve curve;
  std::vector<DetectionReport> positives;
  std::vector<DetectionReport> negatives;
  std::vector<SampleFailure> failures;
};

struct ExperimentResult {
  std::vector<CellResult> cells;
};

/// Runs every (scheme, attack) cell. Positives for a scheme are regenerated
/// identically in each of its cells, so attack columns share base samples;
/// attack randomness comes from derive_seed(master_seed, cell_index). A
/// failing cell is recorded and does not abort the run.
ExperimentResult run_experiment(const ExperimentInputs& inputs, const ExperimentSettings& settings);

std::string_view to_string(NegativePool pool);

std::string format_metrics_table(const ExperimentResult& result);
nlohmann::json cell_to_json(const CellResult& cell);
std::string format_roc(const RocCurve& curve);

/// Writes metrics/metrics.txt, metrics/metrics.jsonl, metrics/roc_<cell>.tsv
/// and reports/<cell>.jsonl under `output_dir`.
void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& output_dir);

}  // namespace tbw
