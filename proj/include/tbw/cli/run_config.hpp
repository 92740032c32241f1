#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tbw/attack_sim.hpp"
#include "tbw/detector.hpp"
#include "tbw/experiment.hpp"
#include "tbw/kgw.hpp"
#include "tbw/partition.hpp"

namespace tbw::cli {

/// A dotted configuration key; the same name (with a leading "--") is the CLI flag.
struct ConfigKey {
  std::string_view key;
  std::string_view default_value;
  std::string_view help;
};

std::span<const ConfigKey> config_keys();
bool is_config_key(std::string_view key);

/// Flat "key = value" text. '#' starts a comment; blank lines are skipped;
/// values may be wrapped in double quotes. Unknown keys are rejected.
std::map<std::string, std::string> parse_config_text(std::string_view text);
std::map<std::string, std::string> load_config_file(const std::filesystem::path& path);

struct RunConfig {
  struct Paths {
    std::filesystem::path embeddings;
    std::filesystem::path topics;
    std::filesystem::path partition;
    std::filesystem::path corpus;
    std::filesystem::path output = "out";
  } paths;

  WatermarkParams watermark;
  std::size_t top_k = 5;
  KgwParams kgw;

  double lm_alpha = 1.0;
  std::string start_symbol = "<s>";
  double temperature = 1.0;

  AttackConfig attack{0.0, 0.0, 0.5, 0};
  std::vector<double> lexical_rates{0.0};
  std::vector<double> order_rates{0.0};

  std::vector<DetectionScheme> schemes{DetectionScheme::tbw, DetectionScheme::kgw};
  std::size_t sample_count = 100;
  std::size_t sample_length = 200;
  std::uint64_t master_seed = 0;
  NegativePool negative_pool = NegativePool::generated;
  std::string prompt_template = "Please write a detailed review.";

  std::size_t jobs = 1;

  // Partition location: paths.partition, or <output>/partition.txt when unset.
  std::filesystem::path partition_path() const;
};

/// Builds a typed config from resolved key/value pairs; missing keys take
/// their defaults. Throws ErrorCode::invalid_argument for bad values.
RunConfig resolve_config(const std::map<std::string, std::string>& values);

}  // namespace tbw::cli
