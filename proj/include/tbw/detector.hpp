#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "tbw/kgw.hpp"
#include "tbw/partition.hpp"
#include "tbw/tokenizer.hpp"
#include "tbw/topic_extract.hpp"

namespace tbw {

enum class DetectionScheme { tbw, kgw };
enum class Verdict { watermarked, not_watermarked };
enum class TopicSource { paired_submission, self_text, not_applicable };

struct DetectionReport {
  std::string text_id;
  DetectionScheme scheme = DetectionScheme::tbw;
  std::optional<TopicDecision> topic;
  std::size_t n = 0;
  std::size_t g = 0;
  double gamma = 0.0;
  double z = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::not_watermarked;
  TopicSource topic_source = TopicSource::not_applicable;

  bool operator==(const DetectionReport&) const = default;
};

/// One-sided binomial z statistic (g - gamma n) / sqrt(n gamma (1 - gamma)).
/// Throws ErrorCode::invalid_argument for n == 0, g > n, or gamma outside (0, 1).
double z_score(std::size_t g, std::size_t n, double gamma);

// watermarked iff z > threshold.
Verdict verdict_for(double z, double threshold);

struct GreenCount {
  std::size_t g = 0;
  std::size_t n = 0;

  bool operator==(const GreenCount&) const = default;
};

using TokenSet = std::set<std::string, std::less<>>;

/// n counts in-vocabulary occurrences, g those also in `green`. Out-of-vocabulary
/// tokens count toward neither.
GreenCount count_green(std::span<const std::string> tokens, const TokenSet& green,
                       const TokenSet& vocab);
GreenCount count_green(std::span<const std::string> tokens, const GreenListPartition& partition,
                       std::size_t topic);

/// Topic comes from `submission_text` when given (paired_submission), else
/// from `text` itself (self_text).
DetectionReport detect_tbw(std::string_view text, std::optional<std::string_view> submission_text,
                           const GreenListPartition& partition, const TopicSet& topics,
                           const EmbeddingTable& table, const WatermarkParams& params,
                           std::size_t top_k = kDefaultTopK, std::string text_id = {});

/// Scores positions t >= 1 whose token and predecessor are both in `vocab`.
DetectionReport detect_kgw(std::string_view text, const KgwParams& params, const Vocabulary& vocab,
                           std::size_t min_tokens = 20, std::string text_id = {});

std::string_view to_string(DetectionScheme scheme);
std::string_view to_string(Verdict verdict);
std::string_view to_string(TopicSource source);

nlohmann::json to_json(const TopicDecision& decision);
TopicDecision topic_decision_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DetectionReport& report);
DetectionReport report_from_json(const nlohmann::json& j);

// Single-line JSON record.
std::string serialize_report(const DetectionReport& report);
DetectionReport parse_report(std::string_view line);

}  // namespace tbw
