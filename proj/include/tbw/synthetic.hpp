#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "tbw/embedding_store.hpp"

namespace tbw {

/// Recipe for a clustered embedding vocabulary.
///
/// Topic words sit at an exact cosine (drawn from [matched_sim_min,
/// matched_sim_max]) to their topic vector. Filler groups are synonym sets:
/// every member sits at `group_sim` to a random group centre, so members are
/// each other's nearest neighbours while matching no topic.
struct SyntheticSpec {
  std::size_t dim = 32;
  std::uint64_t seed = 1;
  std::vector<std::string> topic_names;
  std::vector<std::vector<std::string>> topic_words;  // parallel to topic_names
  std::vector<std::vector<std::string>> filler_groups;
  double matched_sim_min = 0.80;
  double matched_sim_max = 0.95;
  double group_sim = 0.92;
};

struct SyntheticVocabulary {
  EmbeddingTable table;
  TopicSet topics;
};

SyntheticVocabulary make_synthetic_vocabulary(const SyntheticSpec& spec);

/// Spec with generated names: topic i's words are "t<i>w<j>", filler group
/// g's members are "g<g>m<m>" (zero-padded, all [a-z0-9]).
SyntheticSpec numbered_spec(std::size_t topic_count, std::size_t words_per_topic,
                            std::size_t group_count, std::size_t group_size, std::size_t dim,
                            std::uint64_t seed);

// Unstructured table of isotropic random unit vectors named "v<i>".
EmbeddingTable random_table(std::size_t size, std::size_t dim, std::uint64_t seed);
TopicSet random_topics(std::size_t count, std::size_t dim, std::uint64_t seed);

}  // namespace tbw
