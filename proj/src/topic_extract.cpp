#include "tbw/topic_extract.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tbw/error.hpp"
#include "tbw/tokenizer.hpp"

namespace tbw {

namespace {

long long tie_key(double score) { return std::llround(score / kTieEpsilon); }

}  // namespace

std::vector<Keyword> extract_keywords(std::span<const std::string> tokens,
                                      const EmbeddingTable& table, std::size_t top_k) {
  if (top_k == 0) {
    throw Error(ErrorCode::invalid_argument, "top_k must be >= 1");
  }
  const Vector doc = mean_embedding(tokens, table);

  std::map<std::string_view, std::size_t> distinct;
  for (const auto& token : tokens) {
    if (auto idx = table.index_of(token)) distinct.emplace(token, *idx);
  }
  std::vector<Keyword> ranked;
  ranked.reserve(distinct.size());
  for (const auto& [token, idx] : distinct) {
    ranked.push_back({std::string(token), std::clamp(dot(table.vector(idx), doc), -1.0, 1.0)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const Keyword& a, const Keyword& b) {
    const auto ka = tie_key(a.score);
    const auto kb = tie_key(b.score);
    if (ka != kb) return ka > kb;
    return a.token < b.token;
  });
  if (ranked.size() > top_k) ranked.resize(top_k);
  return ranked;
}

std::vector<Keyword> extract_keywords(std::string_view text, const EmbeddingTable& table,
                                      std::size_t top_k) {
  const auto seq = tokenize(text);
  return extract_keywords(std::span<const std::string>(seq.tokens), table, top_k);
}

TopicDecision topic_for_vector(std::span<const double> pooled, const TopicSet& topics) {
  const Vector unit = normalized(pooled);
  const TopicMatch best = closest_topic(unit, topics);
  TopicDecision decision;
  decision.topic_index = best.index;
  decision.topic_name = topics.name(best.index);
  decision.score = best.score;
  return decision;
}

TopicDecision identify_topic(std::string_view text, const EmbeddingTable& table,
                             const TopicSet& topics, std::size_t top_k) {
  if (table.dim() != topics.dim()) {
    throw Error(ErrorCode::dimension_mismatch, "embedding and topic dimensions differ");
  }
  auto keywords = extract_keywords(text, table, top_k);
  std::vector<std::string> words;
  words.reserve(keywords.size());
  for (const auto& kw : keywords) words.push_back(kw.token);
  TopicDecision decision = topic_for_vector(mean_embedding(words, table), topics);
  decision.keywords = std::move(keywords);
  return decision;
}

}  // namespace tbw
