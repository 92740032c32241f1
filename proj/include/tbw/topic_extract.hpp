#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tbw/embedding_store.hpp"

namespace tbw {

inline constexpr std::size_t kDefaultTopK = 5;

struct Keyword {
  std::string token;
  double score = 0.0;

  bool operator==(const Keyword&) const = default;
};

struct TopicDecision {
  std::size_t topic_index = 0;
  std::string topic_name;
  double score = 0.0;
  std::vector<Keyword> keywords;

  bool operator==(const TopicDecision&) const = default;
};

/// Ranks distinct in-vocabulary tokens of `text` by cosine similarity to the
/// document mean embedding (occurrences weighted by multiplicity). Scores
/// within kTieEpsilon tie and are ordered bytewise by token.
std::vector<Keyword> extract_keywords(std::string_view text, const EmbeddingTable& table,
                                      std::size_t top_k = kDefaultTopK);
std::vector<Keyword> extract_keywords(std::span<const std::string> tokens,
                                      const EmbeddingTable& table,
                                      std::size_t top_k = kDefaultTopK);

/// Pools the top_k keyword embeddings (uniform mean, renormalized) and picks
/// the most similar topic, lowest index on ties.
TopicDecision identify_topic(std::string_view text, const EmbeddingTable& table,
                             const TopicSet& topics, std::size_t top_k = kDefaultTopK);

// Final step of identify_topic, exposed for callers that already hold a pooled vector.
TopicDecision topic_for_vector(std::span<const double> pooled, const TopicSet& topics);

}  // namespace tbw
