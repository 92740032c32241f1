#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "tbw/kgw.hpp"
#include "tbw/partition.hpp"
#include "tbw/toy_lm.hpp"
#include "tbw/topic_extract.hpp"

namespace tbw {

struct NoWatermark {};

/// Topic-conditioned green list, resolved once from the prompt.
struct TbwScheme {
  const GreenListPartition* partition = nullptr;
  const TopicSet* topics = nullptr;
  const EmbeddingTable* table = nullptr;
  WatermarkParams params;
  std::size_t top_k = kDefaultTopK;
};

struct KgwScheme {
  KgwParams params;
};

using Scheme = std::variant<NoWatermark, TbwScheme, KgwScheme>;

struct GenerationOptions {
  std::size_t length = 200;
  std::uint64_t seed = 0;
  double temperature = 1.0;
};

struct GenerationResult {
  TokenSequence sequence;
  // Set for TBW only.
  std::optional<TopicDecision> topic;
};

/// Green-list token indices (LM vocabulary order) for one topic.
std::vector<std::size_t> green_indices(const GreenListPartition& partition, std::size_t topic,
                                       const Vocabulary& vocab);

/// Autoregressive sampling from softmax(logits [+ bias] / temperature).
///
/// The first context is the last in-vocabulary prompt token, or the start
/// symbol when the prompt has none. TBW resolves the topic once from the
/// prompt (ErrorCode::topic_resolution on failure); KGW re-derives its green
/// list from the previous token at every step.
GenerationResult generate(const ToyLM& lm, std::string_view prompt, const Scheme& scheme,
                          const GenerationOptions& options);

}  // namespace tbw
